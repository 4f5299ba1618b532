"""Period-by-period evolution of the two-agent economy.

One period runs, in order: firm plans production (capped by its budget),
household decides labour, labour market clears on the short side, firm
produces, household decides jelly demand (capped by its budget), jelly market
clears on the short side, firm cash is updated, the firm updates its demand
(and, with commodity money, labour-supply) expectations, household cash is
updated.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from pricedyn.expectations import (
    DemandExpectation,
    Observation,
    SupplyExpectation,
    update_demand,
    update_supply,
)
from pricedyn.model import firm_plan, household_plan, produce, utility
from pricedyn.params import Balances, EconomicState, ModelParams, Version

TRACE_COLUMNS = (
    "t", "L_D", "L_S", "L_M", "J_D", "J_S", "J_M", "p", "w", "m_H", "m_F", "utility", "flags",
)  # fmt: skip


class Classification(str, Enum):
    ECONOMIC_EQUILIBRIUM = "EconomicEquilibrium"
    BORDER_EQUILIBRIUM = "BorderEquilibrium"
    NON_CONVERGED = "NonConverged"


@dataclass(frozen=True)
class StepRecord:
    t: int
    state: EconomicState
    labour_transacted: float
    jelly_transacted: float
    balances: Balances
    utility: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunResult:
    trace: tuple[StepRecord, ...]
    classification: Classification
    demand_exp: DemandExpectation
    supply_exp: SupplyExpectation | None = None

    @property
    def final_utility(self) -> float:
        return self.trace[-1].utility

    @property
    def periods(self) -> int:
        return len(self.trace)

    @property
    def final_state(self) -> EconomicState:
        return self.trace[-1].state


@dataclass(frozen=True)
class ClassifyOptions:
    window: int = 5
    tol_fix: float = 1e-6
    tol_clear: float = 1e-3
    eps: float = 1e-12


@dataclass(frozen=True)
class StepOutcome:
    record: StepRecord
    balances: Balances
    demand_exp: DemandExpectation
    supply_exp: SupplyExpectation | None = None

    def __iter__(self):
        return iter((self.record, self.balances, (self.demand_exp, self.supply_exp)))


def _firm_budget(params: ModelParams, balances: Balances) -> float:
    if params.version is Version.NO_MONEY:
        return balances.last_jelly_revenue
    return balances.m_firm


def step(
    params: ModelParams,
    state: EconomicState | None,
    balances: Balances,
    demand_exp: DemandExpectation,
    supply_exp: SupplyExpectation | None = None,
    *,
    t: int = 1,
    limited: bool = True,
) -> StepOutcome:
    """Advance the economy one period.

    ``state`` is the previous period's economic state (``None`` in the first
    period); it supplies the older observation for learning. With
    ``limited=False`` no budget limits apply and cash is left untouched.
    Unpacks as ``(record, balances, (demand_exp, supply_exp))``.
    """
    commodity = params.version is Version.MONEY_COMMODITY
    if commodity and supply_exp is None:
        raise ValueError("MoneyCommodity needs a supply expectation")
    flags = []

    # firm plans production
    plan = firm_plan(
        params,
        demand_exp,
        supply_exp if commodity else None,
        _firm_budget(params, balances) if limited else None,
    )
    if plan.price_floored:
        flags.append("price_floor")
    if plan.wage_clamped:
        flags.append("wage_clamp")
    price, wage = plan.price, plan.wage

    # household decides labour; labour market; production
    hh = household_plan(params, price, wage, balances.m_household)
    labour_m = min(plan.labour_demand, hh.labour_supply)
    jelly_s = produce(params, labour_m)
    wage_bill = wage * labour_m

    # household decides jelly demand
    if not limited:
        cash = math.inf
        jelly_d = hh.planned_jelly_demand
    elif params.version is Version.NO_MONEY:
        cash = wage_bill
        jelly_d = cash / price
    else:
        cash = balances.m_household
        if params.wage_income_spendable:
            cash += wage_bill
        jelly_d = min(hh.planned_jelly_demand, cash / price)
    jelly_m = min(jelly_d, jelly_s)
    spend = min(price * jelly_m, cash)

    # cash flows
    if not limited:
        new_balances = balances
    elif params.version is Version.NO_MONEY:
        new_balances = Balances(last_jelly_revenue=spend, last_labour_income=wage_bill)
    else:
        new_balances = Balances(
            m_household=max(balances.m_household - spend + wage_bill, 0.0),
            m_firm=max(balances.m_firm + spend - wage_bill, 0.0),
        )

    # expectation updates
    previous_demand = previous_supply = None
    if state is not None:
        previous_demand = Observation(state.price, state.jelly_demand)
        previous_supply = Observation(state.wage, state.labour_supply)
    new_demand, skipped = update_demand(
        demand_exp, Observation(price, jelly_d), previous_demand, params.eps1, params.eps2
    )
    if skipped:
        flags.append("demand_skip")
    new_supply = supply_exp
    if commodity:
        new_supply, skipped = update_supply(
            supply_exp,
            Observation(wage, hh.labour_supply),
            previous_supply,
            params.eps1,
            params.eps2,
            params.labour_force,
        )
        if skipped:
            flags.append("supply_skip")

    econ = EconomicState(
        labour_demand=plan.labour_demand,
        labour_supply=hh.labour_supply,
        jelly_demand=jelly_d,
        jelly_supply=jelly_s,
        price=price,
        wage=wage,
    )
    record = StepRecord(
        t=t,
        state=econ,
        labour_transacted=labour_m,
        jelly_transacted=jelly_m,
        balances=new_balances,
        utility=utility(params, labour_m, jelly_m),
        flags=tuple(flags),
    )
    return StepOutcome(record, new_balances, new_demand, new_supply if commodity else None)


def classify(
    trace: Sequence[StepRecord],
    window_k: int = 5,
    tol_fix: float = 1e-6,
    tol_clear: float = 1e-3,
    eps: float = 1e-12,
) -> Classification:
    """Label the end of a trace as economic equilibrium, border equilibrium or neither.

    A fixed point means every state component of the last ``window_k`` periods
    is within ``tol_fix`` (relative) of its final value. A fixed point where
    both markets clear to ``tol_clear`` (relative excess demand) is an
    economic equilibrium; any other fixed point is a border equilibrium.
    """
    if window_k < 1:
        raise ValueError("window_k must be >= 1")
    if len(trace) < window_k:
        raise ValueError(f"trace has {len(trace)} periods, classification needs {window_k}")
    final = trace[-1].state.as_tuple()
    for record in trace[-window_k:]:
        for x, ref in zip(record.state.as_tuple(), final):
            if abs(x - ref) / max(abs(ref), eps) >= tol_fix:
                return Classification.NON_CONVERGED
    last = trace[-1].state
    labour_gap = abs(last.labour_demand - last.labour_supply) / max(last.labour_supply, eps)
    jelly_gap = abs(last.jelly_demand - last.jelly_supply) / max(last.jelly_supply, eps)
    if labour_gap < tol_clear and jelly_gap < tol_clear:
        return Classification.ECONOMIC_EQUILIBRIUM
    return Classification.BORDER_EQUILIBRIUM


def _iterate(params, demand_exp, supply_exp, balances, max_periods, limited):
    if max_periods < 1:
        raise ValueError("max_periods must be >= 1")
    trace = []
    state = None
    for t in range(1, max_periods + 1):
        out = step(params, state, balances, demand_exp, supply_exp, t=t, limited=limited)
        trace.append(out.record)
        state = out.record.state
        balances, demand_exp, supply_exp = out.balances, out.demand_exp, out.supply_exp
    return tuple(trace), demand_exp, supply_exp


def run(
    params: ModelParams,
    demand_exp: DemandExpectation,
    balances: Balances,
    max_periods: int = 50,
    supply_exp: SupplyExpectation | None = None,
    options: ClassifyOptions = ClassifyOptions(),
) -> RunResult:
    """Simulate ``max_periods`` periods with budget limits and classify the outcome."""
    trace, demand_exp, supply_exp = _iterate(
        params, demand_exp, supply_exp, balances, max_periods, limited=True
    )
    window = min(options.window, len(trace))
    label = classify(trace, window, options.tol_fix, options.tol_clear, options.eps)
    return RunResult(trace, label, demand_exp, supply_exp)


def learning_trajectory(
    params: ModelParams,
    demand_exp: DemandExpectation,
    max_periods: int = 200,
    supply_exp: SupplyExpectation | None = None,
    balances: Balances = Balances(),
) -> tuple[StepRecord, ...]:
    """Evolve without any budget limits. Cash is frozen at ``balances``."""
    trace, _, _ = _iterate(params, demand_exp, supply_exp, balances, max_periods, limited=False)
    return trace


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal text for ``x``."""
    return repr(float(x))


def trace_rows(trace: Iterable[StepRecord]) -> list[list[str]]:
    rows = []
    for r in trace:
        s = r.state
        rows.append(
            [str(r.t)]
            + [
                fmt_float(v)
                for v in (
                    s.labour_demand,
                    s.labour_supply,
                    r.labour_transacted,
                    s.jelly_demand,
                    s.jelly_supply,
                    r.jelly_transacted,
                    s.price,
                    s.wage,
                    r.balances.m_household,
                    r.balances.m_firm,
                    r.utility,
                )
            ]
            + ["|".join(r.flags)]
        )
    return rows


def trace_to_csv(trace: Iterable[StepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    writer.writerows(trace_rows(trace))
    return buf.getvalue()
