"""Parameter sweeps over run configurations, plus the standard scenarios."""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from pricedyn import __version__
from pricedyn.config import Axis, RunConfig, with_values
from pricedyn.engine import Classification, RunResult, fmt_float, run
from pricedyn.equilibrium import equilibrium_point
from pricedyn.params import Balances, ModelParams, Version

DEFAULT_ZETA_AXIS = Axis("zeta0", 0.1, 0.9, 33)
DEFAULT_DELTA_AXIS = Axis("delta_z", 0.1, 2.0, 33)

EE = Classification.ECONOMIC_EQUILIBRIUM


def run_config(config: RunConfig) -> RunResult:
    demand, supply = config.initial_expectations()
    return run(
        config.params,
        demand,
        config.balances,
        max_periods=config.horizon,
        supply_exp=supply,
        options=config.classify,
    )


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig
    axes: tuple[Axis, ...]
    horizon: int | None = None

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("a sweep needs at least one axis")
        for axis in self.axes:
            if axis.count < 1:
                raise ValueError(f"axis {axis.name}: count must be >= 1")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ValueError("duplicate axis name")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    def cell_configs(self) -> list[RunConfig]:
        """Configurations of all cells in row-major (C) order."""
        base = self.base if self.horizon is None else replace(self.base, horizon=self.horizon)
        names = [a.name for a in self.axes]
        try:
            return [
                with_values(base, dict(zip(names, point)))
                for point in itertools.product(*(a.values() for a in self.axes))
            ]
        except (TypeError, ValueError) as exc:
            raise ValueError(f"invalid sweep axis value: {exc}") from None


@dataclass
class SweepResult:
    axes: tuple[Axis, ...]
    utility: np.ndarray
    classification: np.ndarray  # Classification objects, same shape as utility
    final_price: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.utility.shape

    def count(self, label: Classification) -> int:
        return int(sum(1 for c in self.classification.flat if c is label))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([a.name for a in self.axes] + ["utility", "classification"])
        grids = [a.values() for a in self.axes]
        for index in itertools.product(*(range(a.count) for a in self.axes)):
            coords = [fmt_float(grids[k][i]) for k, i in enumerate(index)]
            writer.writerow(
                coords + [fmt_float(self.utility[index]), self.classification[index].value]
            )
        return buf.getvalue()


def _summarise(result: RunResult) -> tuple[float, Classification, float]:
    return result.final_utility, result.classification, result.final_state.price


def _run_cell(config: RunConfig) -> tuple[float, Classification, float]:
    return _summarise(run_config(config))


def sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every grid cell; results are placed by position, whatever the worker count."""
    configs = spec.cell_configs()
    if workers > 1 and len(configs) > 1:
        chunk = max(1, len(configs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, configs, chunksize=chunk))
    else:
        cells = [_run_cell(c) for c in configs]
    shape = spec.shape
    utility = np.array([c[0] for c in cells], dtype=float).reshape(shape)
    labels = np.empty(len(cells), dtype=object)
    labels[:] = [c[1] for c in cells]
    price = np.array([c[2] for c in cells], dtype=float).reshape(shape)
    base = spec.base if spec.horizon is None else replace(spec.base, horizon=spec.horizon)
    meta = sweep_metadata(base, spec.axes)
    return SweepResult(spec.axes, utility, labels.reshape(shape), price, meta)


def sweep_metadata(base: RunConfig, axes: Sequence[Axis]) -> dict[str, Any]:
    config = replace(base, axes=tuple(axes)).to_dict()
    return {
        "software": {"name": "pricedyn", "version": __version__},
        "config": config,
        "defaults_applied": list(base.defaults_applied),
    }


@dataclass
class CellComparison:
    utility_diff: np.ndarray  # b - a
    changed: np.ndarray  # classification differs
    gained: np.ndarray  # b reaches economic equilibrium, a does not
    lost: np.ndarray  # a reaches economic equilibrium, b does not

    @property
    def summary(self) -> dict[str, int]:
        return {
            "cells": int(self.changed.size),
            "changed": int(self.changed.sum()),
            "gained_equilibrium": int(self.gained.sum()),
            "lost_equilibrium": int(self.lost.sum()),
        }


def compare_cells(a: SweepResult, b: SweepResult) -> CellComparison:
    if a.shape != b.shape:
        raise ValueError(f"sweep shapes differ: {a.shape} vs {b.shape}")
    a_ee = np.vectorize(lambda c: c is EE, otypes=[bool])(a.classification)
    b_ee = np.vectorize(lambda c: c is EE, otypes=[bool])(b.classification)
    changed = np.vectorize(lambda x, y: x is not y, otypes=[bool])(
        a.classification, b.classification
    )
    return CellComparison(b.utility - a.utility, changed, b_ee & ~a_ee, a_ee & ~b_ee)


# standard scenarios (default economy: alpha=1, beta=4, gamma=0.5, L_f=400)

SCENARIOS = ("no_money", "firm_cash", "ample_money")


def scenario_config(
    name: str, zeta0: float = 0.55, delta_z: float = 0.3, params: ModelParams | None = None
) -> RunConfig:
    """Starting positions for utility-vs-expectations sweeps.

    ``no_money``: firm starts with the equilibrium revenue ``p_E*J_E``.
    ``firm_cash``: money; the firm holds that revenue as cash, the household none.
    ``ample_money``: money; both hold ``L_f``.
    """
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    version = Version.NO_MONEY if name == "no_money" else Version.MONEY_STORE
    params = replace(params or ModelParams(version), version=version)
    eq = equilibrium_point(params)
    revenue = eq.price * eq.jelly
    if name == "no_money":
        balances = Balances(last_jelly_revenue=revenue)
    elif name == "firm_cash":
        balances = Balances(m_firm=revenue, m_household=0.0)
    else:
        balances = Balances(m_firm=params.labour_force, m_household=params.labour_force)
    return RunConfig(params=params, balances=balances, zeta0=zeta0, delta_z=delta_z)


def household_share_config(
    zeta0: float = 0.55, delta_z: float = 0.3, household_share: float = 0.05
) -> RunConfig:
    """``firm_cash`` with a share of the same money stock moved to the household."""
    base = scenario_config("firm_cash", zeta0, delta_z)
    return with_values(base, {"household_share": household_share})


def expectation_sweep(
    name: str, zeta_axis: Axis = DEFAULT_ZETA_AXIS, delta_axis: Axis = DEFAULT_DELTA_AXIS
) -> SweepSpec:
    return SweepSpec(scenario_config(name), (zeta_axis, delta_axis))


def money_sweep(
    money: Axis = Axis("total_money", 0.0, 800.0, 21),
    share: Axis = Axis("household_share", 0.0, 0.9, 10),
    zeta0: float = 0.5,
    delta_z: float = 1.0,
) -> SweepSpec:
    """Utility vs total money and initial household share of it."""
    base = scenario_config("ample_money", zeta0, delta_z)
    return SweepSpec(base, (money, share))
