"""Per-period decision rules of the aggregate household and the aggregate firm."""

from __future__ import annotations

import math
from dataclasses import dataclass

from pricedyn.expectations import (
    DemandExpectation,
    SupplyExpectation,
    eval_demand,
    eval_supply,
)
from pricedyn.params import ModelParams, Version

# price is quoted at this jelly quantity when the firm plans to produce nothing
J_MIN = 1e-9
# the expected wage diverges at L_f, so labour plans stay this far below it
_LF_MARGIN = 1e-12
# posted wages are clamped to this range (reached only when supply beliefs degenerate)
W_MIN, W_MAX = 1e-9, 1e12


@dataclass(frozen=True)
class HouseholdPlan:
    labour_supply: float
    planned_jelly_demand: float


@dataclass(frozen=True)
class FirmPlan:
    labour_demand: float
    planned_jelly_supply: float
    price: float
    wage: float = 1.0
    price_floored: bool = False
    wage_clamped: bool = False


def utility(params: ModelParams, labour: float, jelly: float) -> float:
    """Cobb-Douglas utility ``(L_f - L)**alpha * J**beta``."""
    if labour < 0 or jelly < 0:
        raise ValueError("labour and jelly must be >= 0")
    if labour > params.labour_force:
        raise ValueError("labour cannot exceed the labour force")
    return (params.labour_force - labour) ** params.alpha * jelly**params.beta


def produce(params: ModelParams, labour_hired: float) -> float:
    if labour_hired < 0:
        raise ValueError("labour_hired must be >= 0")
    return labour_hired**params.gamma


def household_plan(
    params: ModelParams, price: float, wage: float = 1.0, m_household: float = 0.0
) -> HouseholdPlan:
    """Utility-maximising labour supply and jelly demand at the posted price and wage.

    In NoMoney/MoneyStore the whole wage income is planned to be spent and cash
    plays no role. In MoneyCommodity a fraction ``s`` of wage income is kept and
    the cash ``m_household`` is planned to be spent.
    """
    if not price > 0:
        raise ValueError("price must be > 0")
    if not wage > 0:
        raise ValueError("wage must be > 0")
    if params.version is Version.MONEY_COMMODITY:
        s, cash = params.s, m_household
    else:
        s, cash = 0.0, 0.0
    total = params.alpha + params.beta
    labour = params.target_labour
    if cash:
        labour -= params.alpha * cash / (total * (1 - s) * wage)
    labour = min(max(labour, 0.0), params.labour_force)
    income = (1 - s) * wage * params.labour_force + cash
    jelly = max(params.beta * income / (total * price), 0.0)
    return HouseholdPlan(labour_supply=labour, planned_jelly_demand=jelly)


def _bisect_decreasing(g, lo: float, hi: float, max_iter: int = 200) -> float:
    """Largest bracketed ``L`` with ``g(L) >= 0`` for decreasing ``g`` (``g(lo) >= 0``).

    Iterates until the bracket cannot shrink further in floating point.
    """
    if g(hi) >= 0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def _posted_wage(supply_exp: SupplyExpectation, labour: float, lf: float) -> tuple[float, bool]:
    """``psi(labour)`` clamped to ``[W_MIN, W_MAX]``, and whether the clamp fired."""
    log_w = (math.log(supply_exp.x) - math.log(lf - labour)) / supply_exp.xi
    if log_w < math.log(W_MIN):
        return W_MIN, True
    if log_w > math.log(W_MAX):
        return W_MAX, True
    return eval_supply(supply_exp, labour, lf), False


def _degenerate_plan(params, demand_exp, supply_exp) -> FirmPlan:
    wage, clamped = 1.0, False
    if params.version is Version.MONEY_COMMODITY:
        wage, clamped = _posted_wage(supply_exp, 0.0, params.labour_force)
    return FirmPlan(0.0, 0.0, eval_demand(demand_exp, J_MIN), wage, True, clamped)


def firm_plan(
    params: ModelParams,
    demand_exp: DemandExpectation,
    supply_exp: SupplyExpectation | None = None,
    budget: float | None = None,
) -> FirmPlan:
    """Labour demand, planned output, price (and wage) from zero expected profit.

    The firm looks for the labour input at which expected revenue
    ``rho(L) * phi(rho(L))`` equals the expected wage bill. ``L = 0`` is a
    trivial zero-profit point and is never chosen while production is
    possible. If the zero-profit point lies beyond what the firm may hire, it
    hires as much as it may, which minimises the relative profit margin.

    ``budget`` is last period's jelly revenue (NoMoney) or the firm's cash
    (money versions); ``None`` means unlimited.
    """
    lf = params.labour_force
    commodity = params.version is Version.MONEY_COMMODITY
    if commodity and supply_exp is None:
        raise ValueError("MoneyCommodity firm plan needs a supply expectation")
    if budget is not None and budget < 0:
        raise ValueError("budget must be >= 0")

    if not commodity:
        cap = lf if budget is None else min(lf, budget)
        if cap <= 0:
            return _degenerate_plan(params, demand_exp, supply_exp)
        elasticity = params.gamma * (1 - demand_exp.zeta)
        root = demand_exp.z ** (1.0 / (1.0 - elasticity))
        labour = root if root <= cap else cap
        wage = 1.0
    else:
        top = lf * (1 - _LF_MARGIN)
        gamma, zeta = params.gamma, demand_exp.zeta
        log_z = math.log(demand_exp.z)
        log_x, inv_xi = math.log(supply_exp.x), 1.0 / supply_exp.xi

        def log_margin(L: float) -> float:
            # log(revenue / wage bill), strictly decreasing in L
            if L <= 0:
                return math.inf
            return (
                log_z
                + (gamma * (1 - zeta) - 1) * math.log(L)
                - inv_xi * (log_x - math.log(lf - L))
            )

        labour = _bisect_decreasing(log_margin, 0.0, top)
        if budget is not None:
            if budget <= 0:
                return _degenerate_plan(params, demand_exp, supply_exp)

            def slack(L: float) -> float:
                return math.log(budget) - math.log(L) - inv_xi * (log_x - math.log(lf - L))

            labour = min(labour, _bisect_decreasing(slack, 0.0, labour))
        if labour <= 0:
            return _degenerate_plan(params, demand_exp, supply_exp)
        wage, clamped = _posted_wage(supply_exp, labour, lf)

    jelly = produce(params, labour)
    floored = jelly < J_MIN
    price = eval_demand(demand_exp, J_MIN if floored else jelly)
    return FirmPlan(labour, jelly, price, wage, floored, clamped if commodity else False)
