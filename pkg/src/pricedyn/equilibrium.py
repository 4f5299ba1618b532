"""Closed-form market-clearing equilibria and budget viability checks."""

from __future__ import annotations

from dataclasses import dataclass

from pricedyn.params import Balances, EconomicState, ModelParams, Version

# relative slack for affordability comparisons
_SLACK = 1e-12


@dataclass(frozen=True)
class EquilibriumPoint:
    labour: float
    jelly: float
    price: float
    wage: float = 1.0
    household_cash: float = 0.0  # cash the household must hold for stationarity

    @property
    def wage_price_ratio(self) -> float:
        return self.wage / self.price


@dataclass(frozen=True)
class EquilibriumFamily:
    """Equilibria of the money-commodity economy, one per wage level.

    Labour, jelly and the wage/price ratio are pinned down; the nominal wage is
    free. :meth:`at` evaluates the member with a given wage.
    """

    labour: float
    jelly: float
    wage_price_ratio: float
    savings_fraction: float

    def at(self, wage: float) -> EquilibriumPoint:
        if not wage > 0:
            raise ValueError("wage must be > 0")
        return EquilibriumPoint(
            labour=self.labour,
            jelly=self.jelly,
            price=wage / self.wage_price_ratio,
            wage=wage,
            household_cash=self.savings_fraction * wage * self.labour,
        )


def equilibrium_labour(params: ModelParams) -> float:
    s = params.s
    if s == 0:
        return params.target_labour
    kept = params.beta * (1 - s)
    return kept * params.labour_force / (params.alpha + kept)


def analytic_equilibrium(params: ModelParams) -> EquilibriumPoint | EquilibriumFamily:
    """Market-clearing point (NoMoney/MoneyStore) or wage-indexed family (MoneyCommodity)."""
    labour = equilibrium_labour(params)
    jelly = labour**params.gamma
    if params.version is Version.MONEY_COMMODITY:
        return EquilibriumFamily(
            labour=labour,
            jelly=jelly,
            wage_price_ratio=labour ** (params.gamma - 1),
            savings_fraction=params.s,
        )
    return EquilibriumPoint(labour=labour, jelly=jelly, price=labour ** (1 - params.gamma))


def equilibrium_point(params: ModelParams, wage: float = 1.0) -> EquilibriumPoint:
    """Like :func:`analytic_equilibrium` but always a point (family evaluated at ``wage``)."""
    eq = analytic_equilibrium(params)
    if isinstance(eq, EquilibriumFamily):
        return eq.at(wage)
    return eq


def min_money_for_equilibrium(params: ModelParams, wage: float | None = None) -> float:
    """Smallest total money stock with which the equilibrium can be sustained."""
    if params.version is Version.NO_MONEY:
        raise ValueError("the NoMoney economy has no money stock")
    labour = equilibrium_labour(params)
    if params.version is Version.MONEY_STORE:
        return labour
    if wage is None:
        raise ValueError("MoneyCommodity threshold depends on the wage; pass wage=")
    if not wage > 0:
        raise ValueError("wage must be > 0")
    return (1 + params.s) * wage * labour


def _affordable(cost: float, budget: float) -> bool:
    return cost <= budget * (1 + _SLACK) + _SLACK


def is_viable(params: ModelParams, candidate: EconomicState, budgets: Balances) -> bool:
    """Can both agents pay for the short-side transactions of ``candidate``?

    The firm pays the wage bill from last period's jelly revenue (NoMoney) or
    its cash. The household pays for jelly from this period's labour income
    (NoMoney) or from its cash, plus the wage income when
    ``params.wage_income_spendable`` is set.
    """
    wage_bill = candidate.wage * candidate.labour_transacted
    jelly_bill = candidate.price * candidate.jelly_transacted
    if params.version is Version.NO_MONEY:
        firm_budget = budgets.last_jelly_revenue
        household_budget = wage_bill
    else:
        firm_budget = budgets.m_firm
        household_budget = budgets.m_household
        if params.wage_income_spendable:
            household_budget += wage_bill
    return _affordable(wage_bill, firm_budget) and _affordable(jelly_bill, household_budget)


def viability_closure_contains(
    params: ModelParams, total_money: float, candidate: EconomicState
) -> bool:
    """Is ``candidate`` affordable when each agent may dispose of the whole stock ``M``?

    Wages paid to the household come out of the same stock, so the cash it can
    spend on jelly is bounded by ``M`` as well.
    """
    if total_money < 0:
        raise ValueError("total_money must be >= 0")
    wage_bill = candidate.wage * candidate.labour_transacted
    jelly_bill = candidate.price * candidate.jelly_transacted
    return _affordable(wage_bill, total_money) and _affordable(jelly_bill, total_money)
