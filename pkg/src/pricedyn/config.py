"""Run configuration: a YAML document, validated into a :class:`RunConfig`.

Schema (every key optional except ``model.version`` and the balances the
version needs)::

    model:
      version: MoneyStore        # NoMoney | MoneyStore | MoneyCommodity
      alpha: 1.0
      beta: 4.0
      gamma: 0.5
      labour_force: 400.0
      savings_fraction: 0.0      # MoneyCommodity only
      eps1: 0.5
      eps2: 0.1
      wage_income_spendable: true
    expectations:
      zeta0: 0.5
      delta_z: 1.0
      xi0: 1.0                   # MoneyCommodity only
      delta_x: 1.0               # MoneyCommodity only
      wage0: 1.0                 # MoneyCommodity only: wage of the reference equilibrium
    balances:
      m_firm: 400.0              # money versions
      m_household: 400.0         # money versions
      initial_revenue: 320.0     # NoMoney: firm's jelly revenue before period 1
    run:
      horizon: 50
    classify:
      window: 5
      tol_fix: 1.0e-6
      tol_clear: 1.0e-3
    sweep:
      axes:
        - {name: zeta0, min: 0.1, max: 0.9, count: 33}
        - {name: delta_z, min: 0.1, max: 2.0, count: 33}
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import yaml

from pricedyn.engine import ClassifyOptions
from pricedyn.expectations import (
    DemandExpectation,
    SupplyExpectation,
    init_demand_expectation,
    init_supply_expectation,
)
from pricedyn.params import Balances, ModelParams, Version


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


MODEL_DEFAULTS = {
    "alpha": 1.0,
    "beta": 4.0,
    "gamma": 0.5,
    "labour_force": 400.0,
    "savings_fraction": 0.0,
    "eps1": 0.5,
    "eps2": 0.1,
    "wage_income_spendable": True,
}
EXPECTATION_DEFAULTS = {"zeta0": 0.5, "delta_z": 1.0, "xi0": 1.0, "delta_x": 1.0, "wage0": 1.0}
RUN_DEFAULTS = {"horizon": 50}
CLASSIFY_DEFAULTS = {"window": 5, "tol_fix": 1e-6, "tol_clear": 1e-3}

SECTIONS = {
    "model": {"version", *MODEL_DEFAULTS},
    "expectations": set(EXPECTATION_DEFAULTS),
    "balances": {"m_firm", "m_household", "initial_revenue"},
    "run": set(RUN_DEFAULTS),
    "classify": set(CLASSIFY_DEFAULTS),
    "sweep": {"axes"},
}
COMMODITY_ONLY = {
    "model.savings_fraction",
    "expectations.xi0",
    "expectations.delta_x",
    "expectations.wage0",
}
AXIS_KEYS = {"name", "min", "max", "count"}


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [float(self.min)]
        span = self.max - self.min
        return [self.min + span * i / (self.count - 1) for i in range(self.count)]


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    balances: Balances
    zeta0: float = 0.5
    delta_z: float = 1.0
    xi0: float = 1.0
    delta_x: float = 1.0
    wage0: float = 1.0
    horizon: int = 50
    classify: ClassifyOptions = ClassifyOptions()
    axes: tuple[Axis, ...] = ()
    defaults_applied: tuple[str, ...] = field(default=(), compare=False)

    def initial_expectations(self) -> tuple[DemandExpectation, SupplyExpectation | None]:
        demand = init_demand_expectation(self.params, self.zeta0, self.delta_z, self.wage0)
        supply = None
        if self.params.version is Version.MONEY_COMMODITY:
            supply = init_supply_expectation(self.params, self.xi0, self.delta_x, self.wage0)
        return demand, supply

    def to_dict(self) -> dict[str, Any]:
        """Fully resolved configuration as a plain nested dict (YAML-ready)."""
        p = self.params
        commodity = p.version is Version.MONEY_COMMODITY
        model = {"version": p.version.value}
        model.update({k: getattr(p, k) for k in MODEL_DEFAULTS})
        expectations = {"zeta0": self.zeta0, "delta_z": self.delta_z}
        if commodity:
            expectations.update(xi0=self.xi0, delta_x=self.delta_x, wage0=self.wage0)
        else:
            del model["savings_fraction"]
        if p.version is Version.NO_MONEY:
            balances = {"initial_revenue": self.balances.last_jelly_revenue}
        else:
            balances = {"m_firm": self.balances.m_firm, "m_household": self.balances.m_household}
        doc = {
            "model": model,
            "expectations": expectations,
            "balances": balances,
            "run": {"horizon": self.horizon},
            "classify": {
                "window": self.classify.window,
                "tol_fix": self.classify.tol_fix,
                "tol_clear": self.classify.tol_clear,
            },
        }
        if self.axes:
            doc["sweep"] = {
                "axes": [
                    {"name": a.name, "min": a.min, "max": a.max, "count": a.count}
                    for a in self.axes
                ]
            }
        return doc


def _number(value: Any, path: str, integer: bool = False) -> float | int:
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    try:
        number = float(value)  # YAML 1.1 reads "1e-6" as a string
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None
    if integer:
        if number != int(number):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(number)
    return number


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    return value


def set_path(doc: dict, dotted: str, value: Any) -> None:
    """Set ``doc["a"]["b"] = value`` for ``dotted = "a.b"`` (creating sections)."""
    keys = dotted.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{dotted}: {key} is not a section")
    node[keys[-1]] = value


def parse_overrides(items: list[str]) -> dict[str, Any]:
    """``["model.gamma=0.4", ...]`` -> ``{"model.gamma": 0.4}`` (values parsed as YAML)."""
    out = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r}: expected key=value")
        out[key.strip()] = yaml.safe_load(raw) if raw.strip() else None
    return out


def parse_config(
    text: str, overrides: Mapping[str, Any] | None = None, require_balances: bool = True
) -> RunConfig:
    """Parse and validate a YAML configuration document, applying dotted overrides.

    ``require_balances=False`` lets missing balances default to zero (for
    commands that never simulate).
    """
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"<document>: not valid YAML ({exc})") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("<document>: top level must be a mapping")
    doc = copy.deepcopy(doc)
    for key, value in (overrides or {}).items():
        set_path(doc, key, value)
    return build_config(doc, require_balances)


def build_config(doc: Mapping[str, Any], require_balances: bool = True) -> RunConfig:
    for section, body in doc.items():
        if section not in SECTIONS:
            raise ConfigError(f"{section}: unknown section")
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: must be a mapping")
        for key in body:
            if key not in SECTIONS[section]:
                raise ConfigError(f"{section}.{key}: unknown key")

    model = dict(doc.get("model", {}))
    if "version" not in model:
        raise ConfigError("model.version: version missing")
    try:
        version = Version(model["version"])
    except ValueError:
        allowed = ", ".join(v.value for v in Version)
        raise ConfigError(f"model.version: must be one of {allowed}") from None

    defaults = []
    present = {f"{s}.{k}" for s, body in doc.items() for k in body}
    if version is not Version.MONEY_COMMODITY:
        for path in sorted(COMMODITY_ONLY & present):
            raise ConfigError(f"{path}: only valid for version MoneyCommodity")

    def pick(section: str, key: str, fallback: Any) -> Any:
        body = doc.get(section, {})
        if key in body:
            return body[key]
        if version is Version.MONEY_COMMODITY or f"{section}.{key}" not in COMMODITY_ONLY:
            defaults.append(f"{section}.{key}")
        return fallback

    kwargs = {}
    for key, fallback in MODEL_DEFAULTS.items():
        value = pick("model", key, fallback)
        path = f"model.{key}"
        kwargs[key] = _bool(value, path) if key == "wage_income_spendable" else _number(value, path)
    try:
        params = ModelParams(version=version, **kwargs)
    except ValueError as exc:
        key = str(exc).split(" ")[0]
        raise ConfigError(f"model.{key}: {exc}") from None

    exp = {
        k: _number(pick("expectations", k, v), f"expectations.{k}")
        for k, v in EXPECTATION_DEFAULTS.items()
    }
    if not 0 < exp["zeta0"] < 1:
        raise ConfigError("expectations.zeta0: must lie in (0, 1)")
    for key in ("delta_z", "xi0", "delta_x", "wage0"):
        if not exp[key] > 0:
            raise ConfigError(f"expectations.{key}: must be > 0")

    bal = doc.get("balances", {})
    if version is Version.NO_MONEY:
        for key in ("m_firm", "m_household"):
            if key in bal:
                raise ConfigError(f"balances.{key}: not valid for version NoMoney")
        if "initial_revenue" not in bal and require_balances:
            raise ConfigError("balances.initial_revenue: required for version NoMoney")
        revenue = _number(bal.get("initial_revenue", 0.0), "balances.initial_revenue")
        if not revenue >= 0:
            raise ConfigError("balances.initial_revenue: must be >= 0")
        balances = Balances(last_jelly_revenue=revenue)
    else:
        if "initial_revenue" in bal:
            raise ConfigError(f"balances.initial_revenue: not valid for version {version.value}")
        cash = {}
        for key in ("m_firm", "m_household"):
            if key not in bal and require_balances:
                raise ConfigError(f"balances.{key}: required for version {version.value}")
            cash[key] = _number(bal.get(key, 0.0), f"balances.{key}")
            if not cash[key] >= 0:
                raise ConfigError(f"balances.{key}: must be >= 0")
        balances = Balances(**cash)

    horizon = _number(pick("run", "horizon", RUN_DEFAULTS["horizon"]), "run.horizon", True)
    if horizon < 1:
        raise ConfigError("run.horizon: must be >= 1")
    window = _number(pick("classify", "window", 5), "classify.window", True)
    tol_fix = _number(pick("classify", "tol_fix", 1e-6), "classify.tol_fix")
    tol_clear = _number(pick("classify", "tol_clear", 1e-3), "classify.tol_clear")
    if window < 1:
        raise ConfigError("classify.window: must be >= 1")
    if not (tol_fix > 0 and tol_clear > 0):
        raise ConfigError("classify: tolerances must be > 0")

    axes = _parse_axes(doc.get("sweep", {}).get("axes", []), version)

    return RunConfig(
        params=params,
        balances=balances,
        horizon=horizon,
        classify=ClassifyOptions(window=window, tol_fix=tol_fix, tol_clear=tol_clear),
        axes=axes,
        defaults_applied=tuple(defaults),
        **exp,
    )


AXIS_TARGETS = {
    "zeta0", "delta_z", "xi0", "delta_x", "wage0",
    "m_firm", "m_household", "initial_revenue", "total_money", "household_share",
    "alpha", "beta", "gamma", "labour_force", "savings_fraction", "eps1", "eps2",
}  # fmt: skip


def _parse_axes(raw: Any, version: Version) -> tuple[Axis, ...]:
    if not isinstance(raw, list):
        raise ConfigError("sweep.axes: must be a list")
    axes = []
    for i, item in enumerate(raw):
        path = f"sweep.axes[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{path}: must be a mapping")
        for key in item:
            if key not in AXIS_KEYS:
                raise ConfigError(f"{path}.{key}: unknown key")
        for key in AXIS_KEYS:
            if key not in item:
                raise ConfigError(f"{path}.{key}: required")
        name = item["name"]
        if name not in AXIS_TARGETS:
            raise ConfigError(f"{path}.name: unknown sweep parameter {name!r}")
        money_axis = name in {"m_firm", "m_household", "total_money", "household_share"}
        if money_axis and version is Version.NO_MONEY:
            raise ConfigError(f"{path}.name: {name} needs a money version")
        if name == "initial_revenue" and version is not Version.NO_MONEY:
            raise ConfigError(f"{path}.name: initial_revenue needs version NoMoney")
        count = _number(item["count"], f"{path}.count", integer=True)
        if count < 2:
            raise ConfigError(f"{path}.count: must be >= 2")
        lo, hi = _number(item["min"], f"{path}.min"), _number(item["max"], f"{path}.max")
        if not lo <= hi:
            raise ConfigError(f"{path}: min must not exceed max")
        axes.append(Axis(name, lo, hi, count))
    if len({a.name for a in axes}) != len(axes):
        raise ConfigError("sweep.axes: duplicate axis name")
    return tuple(axes)


def with_values(config: RunConfig, values: Mapping[str, float]) -> RunConfig:
    """Copy of ``config`` with sweep parameters set (validated by the constructors)."""
    exp_keys = {"zeta0", "delta_z", "xi0", "delta_x", "wage0"}
    param_keys = {"alpha", "beta", "gamma", "labour_force", "savings_fraction", "eps1", "eps2"}
    changes = {k: v for k, v in values.items() if k in exp_keys}
    params = replace(config.params, **{k: v for k, v in values.items() if k in param_keys})

    bal = config.balances
    if "total_money" in values or "household_share" in values:
        total = values.get("total_money", bal.total_money)
        if "household_share" in values:
            share = values["household_share"]
        else:
            share = bal.m_household / bal.total_money if bal.total_money > 0 else 0.0
        if not 0 <= share <= 1:
            raise ValueError("household_share must lie in [0, 1]")
        bal = Balances(m_household=share * total, m_firm=(1 - share) * total)
    cash = {k: values[k] for k in ("m_firm", "m_household") if k in values}
    if cash:
        bal = replace(bal, **cash)
    if "initial_revenue" in values:
        bal = replace(bal, last_jelly_revenue=values["initial_revenue"])
    return replace(config, params=params, balances=bal, **changes)
