"""The firm's expected demand and labour-supply curves and how it learns them.

Demand is believed to follow ``phi(J) = z / J**zeta``; labour supply
``psi(L) = (x / (L_f - L))**(1/xi)``. After each period the firm refits the
parameters to its last two observations, penalised by how far the parameters
move (log distance), and keeps the refit only if it lowers that objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from pricedyn.equilibrium import equilibrium_point
from pricedyn.params import ModelParams
from pricedyn.simplex import nelder_mead

# observations with quantity at or below this are not used for learning
OBS_FLOOR = 1e-6

_LOGIT_CLAMP = 36.0  # keeps 0 < zeta < 1 strictly representable; also bounds |log xi|
# search box in log space; only reachable when eps2 == 0 and the data cannot be fitted
_LOG_BOUND = 700.0
# a refit must lower the objective by more than this; smaller gains are rounding noise
MIN_GAIN = 1e-12


@dataclass(frozen=True)
class DemandExpectation:
    z: float
    zeta: float

    def __post_init__(self) -> None:
        if not (self.z > 0 and math.isfinite(self.z)):
            raise ValueError(f"demand scale z must be finite and > 0, got {self.z!r}")
        if not 0 < self.zeta < 1:
            raise ValueError(f"demand elasticity zeta must lie in (0, 1), got {self.zeta!r}")


@dataclass(frozen=True)
class SupplyExpectation:
    x: float
    xi: float

    def __post_init__(self) -> None:
        if not (self.x > 0 and math.isfinite(self.x)):
            raise ValueError(f"supply scale x must be finite and > 0, got {self.x!r}")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise ValueError(f"supply curvature xi must be finite and > 0, got {self.xi!r}")


@dataclass(frozen=True)
class Observation:
    """A posted price (or wage) and the quantity the household answered with."""

    price: float
    quantity: float

    def __post_init__(self) -> None:
        if not self.price > 0:
            raise ValueError("observed price/wage must be > 0")
        if not self.quantity >= 0:
            raise ValueError("observed quantity must be >= 0")


class UpdateResult(NamedTuple):
    expectation: DemandExpectation | SupplyExpectation
    skipped: bool


def eval_demand(exp: DemandExpectation, jelly: float) -> float:
    if not jelly > 0:
        raise ValueError("expected demand curve is only defined for jelly > 0")
    return exp.z / jelly**exp.zeta


def eval_supply(exp: SupplyExpectation, labour: float, labour_force: float) -> float:
    if not 0 <= labour < labour_force:
        raise ValueError("expected supply curve is only defined for 0 <= L < L_f")
    return (exp.x / (labour_force - labour)) ** (1.0 / exp.xi)


def init_demand_expectation(
    params: ModelParams, zeta0: float, delta_z: float, wage: float = 1.0
) -> DemandExpectation:
    """Demand beliefs with elasticity ``zeta0`` and scale off by factor ``delta_z``.

    ``delta_z = 1`` makes the curve pass through the equilibrium point
    (``phi(J_E) = p_E``). For MoneyCommodity the equilibrium at ``wage`` is used.
    """
    if not 0 < zeta0 < 1:
        raise ValueError("zeta0 must lie in (0, 1)")
    if not delta_z > 0:
        raise ValueError("delta_z must be > 0")
    eq = equilibrium_point(params, wage)
    return DemandExpectation(z=eq.price * eq.jelly**zeta0 * delta_z, zeta=zeta0)


def init_supply_expectation(
    params: ModelParams, xi0: float, delta_x: float, wage: float = 1.0
) -> SupplyExpectation:
    """Supply beliefs with curvature ``xi0``; ``delta_x = 1`` gives ``psi(L_E) = wage``."""
    if not xi0 > 0:
        raise ValueError("xi0 must be > 0")
    if not delta_x > 0:
        raise ValueError("delta_x must be > 0")
    eq = equilibrium_point(params, wage)
    return SupplyExpectation(x=(params.labour_force - eq.labour) * wage**xi0 * delta_x, xi=xi0)


def _usable(obs: Observation | None, upper: float = math.inf) -> bool:
    return obs is None or OBS_FLOOR < obs.quantity < upper


def _misfit(r_now: float, r_prev: float | None, eps1: float) -> float:
    if r_prev is None:
        return abs(r_now)
    return math.sqrt((r_now * r_now + eps1 * r_prev * r_prev) / (1.0 + eps1))


def demand_objective(
    candidate: DemandExpectation,
    incumbent: DemandExpectation,
    current: Observation,
    previous: Observation | None,
    eps1: float,
    eps2: float,
) -> float:
    """Learning objective for the demand curve (lower is better)."""
    return _demand_objective(
        math.log(candidate.z), candidate.zeta, incumbent, current, previous, eps1, eps2
    )


def _demand_objective(log_z, zeta, incumbent, current, previous, eps1, eps2):
    r_now = math.log(current.price) - log_z + zeta * math.log(current.quantity)
    r_prev = None
    if previous is not None:
        r_prev = math.log(previous.price) - log_z + zeta * math.log(previous.quantity)
    move = math.hypot(math.log(zeta / incumbent.zeta), log_z - math.log(incumbent.z))
    return _misfit(r_now, r_prev, eps1) + eps2 * move


def supply_objective(
    candidate: SupplyExpectation,
    incumbent: SupplyExpectation,
    current: Observation,
    previous: Observation | None,
    eps1: float,
    eps2: float,
    labour_force: float,
) -> float:
    """Learning objective for the labour-supply curve (lower is better)."""
    return _supply_objective(
        math.log(candidate.x),
        math.log(candidate.xi),
        incumbent,
        current,
        previous,
        eps1,
        eps2,
        labour_force,
    )


def _supply_objective(log_x, log_xi, incumbent, current, previous, eps1, eps2, labour_force):
    inv_xi = math.exp(-log_xi)
    r_now = math.log(current.price) - inv_xi * (log_x - math.log(labour_force - current.quantity))
    r_prev = None
    if previous is not None:
        r_prev = math.log(previous.price) - inv_xi * (
            log_x - math.log(labour_force - previous.quantity)
        )
    move = math.hypot(log_xi - math.log(incumbent.xi), log_x - math.log(incumbent.x))
    return _misfit(r_now, r_prev, eps1) + eps2 * move


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def _expit(u: float) -> float:
    u = min(max(u, -_LOGIT_CLAMP), _LOGIT_CLAMP)
    return 1.0 / (1.0 + math.exp(-u))


def _best_of_starts(objective, starts, scale):
    """Run the simplex from each start and keep the lowest objective found.

    ``scale`` (the incumbent misfit) sizes the initial simplex: the log-space
    move needed to fit the data is of that order.
    """
    step = min(max(scale, 1e-9), 0.5)
    best_x, best_f = None, math.inf
    for i, x0 in enumerate(starts):
        if x0 in starts[:i]:
            continue
        x, fx, _ = nelder_mead(objective, x0, step=step, xatol=1e-11, fatol=1e-15, max_iter=400)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def update_demand(
    exp: DemandExpectation,
    current: Observation,
    previous: Observation | None,
    eps1: float,
    eps2: float,
) -> UpdateResult:
    """Refit ``(z, zeta)`` to the current and previous (price, demand) observations.

    ``previous=None`` drops the older observation's term (first period). An
    observation with quantity at or below :data:`OBS_FLOOR` skips the update.
    """
    if not (_usable(current) and _usable(previous)):
        return UpdateResult(exp, True)

    def objective(u: tuple[float, ...]) -> float:
        if abs(u[0]) > _LOG_BOUND:
            return math.inf
        return _demand_objective(u[0], _expit(u[1]), exp, current, previous, eps1, eps2)

    incumbent = (math.log(exp.z), _logit(exp.zeta))
    f_incumbent = objective(incumbent)
    if f_incumbent <= MIN_GAIN:
        return UpdateResult(exp, False)

    log_p1, log_j1 = math.log(current.price), math.log(current.quantity)
    fit = None
    if previous is not None:
        log_p0, log_j0 = math.log(previous.price), math.log(previous.quantity)
        if log_j1 != log_j0:
            zeta = (log_p0 - log_p1) / (log_j1 - log_j0)
            if 0 < zeta < 1:
                fit = (log_p1 + zeta * log_j1, _logit(zeta))
    if fit is None:
        # only the current observation can be matched: keep zeta, move z
        fit = (log_p1 + exp.zeta * log_j1, incumbent[1])

    (log_z, u_zeta), f_best = _best_of_starts(objective, (incumbent, fit), f_incumbent)
    if not f_best < f_incumbent - MIN_GAIN:
        return UpdateResult(exp, False)
    return UpdateResult(DemandExpectation(z=math.exp(log_z), zeta=_expit(u_zeta)), False)


def update_supply(
    exp: SupplyExpectation,
    current: Observation,
    previous: Observation | None,
    eps1: float,
    eps2: float,
    labour_force: float,
) -> UpdateResult:
    """Refit ``(x, xi)`` to the current and previous (wage, labour supply) observations.

    Observations must have ``OBS_FLOOR < L < L_f``; otherwise the update is skipped.
    """
    if not (_usable(current, labour_force) and _usable(previous, labour_force)):
        return UpdateResult(exp, True)

    def objective(u: tuple[float, ...]) -> float:
        if abs(u[0]) > _LOG_BOUND or abs(u[1]) > _LOGIT_CLAMP:
            return math.inf
        return _supply_objective(u[0], u[1], exp, current, previous, eps1, eps2, labour_force)

    incumbent = (math.log(exp.x), math.log(exp.xi))
    f_incumbent = objective(incumbent)
    if f_incumbent <= MIN_GAIN:
        return UpdateResult(exp, False)

    log_w1 = math.log(current.price)
    gap1 = math.log(labour_force - current.quantity)
    fit = None
    if previous is not None:
        log_w0 = math.log(previous.price)
        gap0 = math.log(labour_force - previous.quantity)
        if gap1 != gap0:
            inv_xi = (log_w0 - log_w1) / (gap1 - gap0)
            if inv_xi > 0:
                fit = (log_w1 / inv_xi + gap1, -math.log(inv_xi))
    if fit is None:
        fit = (exp.xi * log_w1 + gap1, incumbent[1])

    (log_x, log_xi), f_best = _best_of_starts(objective, (incumbent, fit), f_incumbent)
    if not f_best < f_incumbent - MIN_GAIN:
        return UpdateResult(exp, False)
    return UpdateResult(SupplyExpectation(x=math.exp(log_x), xi=math.exp(log_xi)), False)
