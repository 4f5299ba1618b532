"""Command-line entry point: ``pricedyn {run,sweep,trajectory,equilibrium}``.

Outputs go to ``--out`` (default: current directory):

* ``run`` / ``trajectory``: ``trace.csv`` / ``trajectory.csv`` with columns
  ``t,L_D,L_S,L_M,J_D,J_S,J_M,p,w,m_H,m_F,utility,flags``
* ``sweep``: ``sweep.csv`` with one row per cell (axis values, utility, classification)
* ``equilibrium``: ``equilibrium.csv``
* every command: ``meta.yaml`` with the resolved configuration, applied
  defaults and software version.

Numbers are written as shortest round-trip decimals, so identical inputs give
byte-identical files. Exit status: 0 ok, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any

import yaml

from pricedyn import __version__
from pricedyn.config import ConfigError, RunConfig, parse_config, parse_overrides
from pricedyn.engine import learning_trajectory, trace_to_csv
from pricedyn.equilibrium import (
    EquilibriumFamily,
    analytic_equilibrium,
    min_money_for_equilibrium,
)
from pricedyn.experiments import (
    DEFAULT_DELTA_AXIS,
    DEFAULT_ZETA_AXIS,
    SweepSpec,
    run_config,
    sweep,
)
from pricedyn.params import Version

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class RuntimeFailure(RuntimeError):
    pass


def _meta(command: str, config: RunConfig, extra: dict[str, Any] | None = None) -> str:
    doc = {
        "software": {"name": "pricedyn", "version": __version__},
        "command": command,
        "config": config.to_dict(),
        "defaults_applied": list(config.defaults_applied),
    }
    if extra:
        doc["results"] = extra
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def _write(out: Path, files: dict[str, str]) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise RuntimeFailure(f"cannot write to {out}: {exc}") from None


def cmd_run(config: RunConfig, out: Path) -> str:
    result = run_config(config)
    summary = {
        "classification": result.classification.value,
        "final_utility": result.final_utility,
        "periods": result.periods,
    }
    _write(out, {"trace.csv": trace_to_csv(result.trace), "meta.yaml": _meta("run", config, summary)})
    return f"{result.classification.value} after {result.periods} periods, final utility {result.final_utility!r}"


def cmd_trajectory(config: RunConfig, out: Path) -> str:
    demand, supply = config.initial_expectations()
    trace = learning_trajectory(
        config.params, demand, config.horizon, supply_exp=supply, balances=config.balances
    )
    final = trace[-1].state
    summary = {"final_price": final.price, "final_labour_demand": final.labour_demand}
    _write(
        out,
        {"trajectory.csv": trace_to_csv(trace), "meta.yaml": _meta("trajectory", config, summary)},
    )
    return f"learning trajectory: {len(trace)} periods, final price {final.price!r}"


def cmd_sweep(config: RunConfig, out: Path, workers: int = 1) -> str:
    axes = config.axes or (DEFAULT_ZETA_AXIS, DEFAULT_DELTA_AXIS)
    config = replace(config, axes=axes)
    try:
        spec = SweepSpec(config, axes)
        result = sweep(spec, workers=workers)
    except ValueError as exc:
        raise ConfigError(f"sweep.axes: {exc}") from None
    counts = {c.value: 0 for c in sorted({*result.classification.flat}, key=lambda c: c.value)}
    for c in result.classification.flat:
        counts[c.value] += 1
    _write(out, {"sweep.csv": result.to_csv(), "meta.yaml": _meta("sweep", config, counts)})
    return ", ".join(f"{k}: {v}" for k, v in counts.items())


def cmd_equilibrium(config: RunConfig, out: Path) -> str:
    params = config.params
    eq = analytic_equilibrium(params)
    if isinstance(eq, EquilibriumFamily):
        eq = eq.at(config.wage0)
    threshold = None
    if params.version is Version.MONEY_STORE:
        threshold = min_money_for_equilibrium(params)
    elif params.version is Version.MONEY_COMMODITY:
        threshold = min_money_for_equilibrium(params, eq.wage)
    row = {
        "L_E": eq.labour,
        "J_E": eq.jelly,
        "p_E": eq.price,
        "w_E": eq.wage,
        "wage_price_ratio": eq.wage_price_ratio,
        "household_cash": eq.household_cash,
        "min_money": threshold,
    }
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(row))
    writer.writerow(["" if v is None else repr(float(v)) for v in row.values()])
    _write(out, {"equilibrium.csv": buf.getvalue(), "meta.yaml": _meta("equilibrium", config, row)})
    return " ".join(f"{k}={v!r}" for k, v in row.items() if v is not None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pricedyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pricedyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "trajectory", "equilibrium"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="YAML configuration file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--horizon", type=int, help="number of periods (overrides run.horizon)")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("overrides", nargs="*", metavar="KEY=VALUE", help="e.g. model.gamma=0.4")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        overrides = parse_overrides(args.overrides)
        if args.horizon is not None:
            overrides["run.horizon"] = args.horizon
        config = parse_config(text, overrides, require_balances=args.command != "equilibrium")
        if args.command == "run":
            message = cmd_run(config, args.out)
        elif args.command == "trajectory":
            message = cmd_trajectory(config, args.out)
        elif args.command == "sweep":
            if args.workers < 1:
                raise ConfigError("--workers: must be >= 1")
            message = cmd_sweep(config, args.out, args.workers)
        else:
            message = cmd_equilibrium(config, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeFailure, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(message)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
