"""Exogenous parameters and the plain value types shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Version(str, Enum):
    """Which kind of money (if any) the economy has."""

    NO_MONEY = "NoMoney"
    MONEY_STORE = "MoneyStore"
    MONEY_COMMODITY = "MoneyCommodity"

    @property
    def has_money(self) -> bool:
        return self is not Version.NO_MONEY


@dataclass(frozen=True)
class ModelParams:
    """All exogenous constants of one economy.

    ``wage_income_spendable`` selects how the household's jelly purchases are
    capped in the money versions: ``True`` lets it spend this period's wage on
    top of its cash, ``False`` caps purchases by the cash held before the labour
    market opens.
    """

    version: Version
    alpha: float = 1.0
    beta: float = 4.0
    gamma: float = 0.5
    labour_force: float = 400.0
    savings_fraction: float = 0.0
    eps1: float = 0.5
    eps2: float = 0.1
    wage_income_spendable: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "version", Version(self.version))
        checks = (
            (self.alpha > 0, "alpha must be > 0"),
            (self.beta > 0, "beta must be > 0"),
            (0 < self.gamma < 1, "gamma must lie in (0, 1)"),
            (self.labour_force > 0, "labour_force must be > 0"),
            (0 <= self.savings_fraction < 1, "savings_fraction must lie in [0, 1)"),
            (self.eps1 >= 0, "eps1 must be >= 0"),
            (self.eps2 >= 0, "eps2 must be >= 0"),
        )
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        for name in ("alpha", "beta", "gamma", "labour_force", "eps1", "eps2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def s(self) -> float:
        """Savings fraction actually in force (zero outside MoneyCommodity)."""
        return self.savings_fraction if self.version is Version.MONEY_COMMODITY else 0.0

    @property
    def target_labour(self) -> float:
        """Labour supply beta/(alpha+beta)*L_f chosen when no cash is held."""
        return self.beta * self.labour_force / (self.alpha + self.beta)


@dataclass(frozen=True)
class Balances:
    """Money holdings, plus the revenue/income carriers used without money."""

    m_household: float = 0.0
    m_firm: float = 0.0
    last_jelly_revenue: float = 0.0
    last_labour_income: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m_household", "m_firm", "last_jelly_revenue", "last_labour_income"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def total_money(self) -> float:
        return self.m_household + self.m_firm


@dataclass(frozen=True)
class EconomicState:
    """Supplies, demands and prices of one period (the economic projection)."""

    labour_demand: float
    labour_supply: float
    jelly_demand: float
    jelly_supply: float
    price: float
    wage: float = 1.0

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.labour_demand,
            self.labour_supply,
            self.jelly_demand,
            self.jelly_supply,
            self.price,
            self.wage,
        )

    @property
    def labour_transacted(self) -> float:
        return min(self.labour_demand, self.labour_supply)

    @property
    def jelly_transacted(self) -> float:
        return min(self.jelly_demand, self.jelly_supply)
