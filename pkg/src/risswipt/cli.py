"""Command-line entry point: single runs, parameter sweeps and convergence traces.

Exit codes: 0 converged / completed, 1 bad configuration or arguments,
2 infeasible, 3 stalled or iteration cap reached, 130 interrupted.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bcd
from .bf_stage import StageInfeasible
from .scene import SCHEMA_VERSION, ConfigError, Scenario, gen_channels, load_config

log = logging.getLogger("risswipt")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_STALLED, EXIT_INTERRUPTED = 0, 1, 2, 3, 130

SWEEP_COLUMNS = ("schema_version", "scheme", "axis", "axis_value", "trial", "seed", "converged",
                 "iterations", "f1_W", "reflect_W", "total_W", "min_sinr_margin", "min_eh_margin",
                 "wall_ms")
CONVERGENCE_COLUMNS = ("schema_version", "seed", "p_max_mW", "iteration", "f1_W", "reflect_W",
                       "total_W", "status")


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    """Locale-independent, round-trippable text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(x) if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    return str(x)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _scenario(args) -> Scenario:
    return load_config(args.config) if args.config else Scenario()


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    if not vals:
        raise UsageError(f"{name}: no values given")
    return vals


def _ints(text: str, name: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    if not vals:
        raise UsageError(f"{name}: no values given")
    return vals


def _schemes(text: str) -> list[str]:
    out = [s.strip() for s in text.split(",") if s.strip()]
    try:
        for s in out:
            bcd.parse_scheme(s)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not out:
        raise UsageError("--schemes: no schemes given")
    return out


def _complex_list(z) -> list:
    z = np.asarray(z)
    return np.stack([z.real, z.imag], axis=-1).tolist()


# ---------------------------------------------------------------------------
# solve

def cmd_solve(args) -> int:
    scn = _scenario(args)
    _schemes(args.scheme)
    ch = gen_channels(scn, args.seed)
    report = {"schema_version": SCHEMA_VERSION, "scenario": scn.as_dict(), "scheme": args.scheme,
              "seed": args.seed}
    try:
        res = bcd.run_scheme(args.scheme, ch, scn, args.seed)
    except (bcd.RunInfeasible, StageInfeasible) as exc:
        report.update(status=bcd.INFEASIBLE, error=str(exc))
        _emit(args.out, report)
        log.error("infeasible: %s", exc)
        return EXIT_INFEASIBLE
    tr = res.trace
    fa = tr.final_audit
    record = bcd.RunRecord(
        schema_version=SCHEMA_VERSION, scheme=args.scheme, axis="", axis_value=float("nan"), trial=0,
        seed=args.seed, converged=tr.converged and fa["ok"], iterations=tr.iterations,
        f1_W=tr.f1[-1], reflect_W=tr.reflect[-1], total_W=tr.total[-1],
        min_sinr_margin=min(fa["sinr_margin"]), min_eh_margin=min(fa["eh_margin"]),
        wall_ms=1e3 * tr.wall_time, status=tr.status, feasible=bool(fa["ok"]),
        sinr_margins=fa["sinr_margin"], eh_margins=fa["eh_margin"])
    report.update(status=tr.status, record=dataclasses.asdict(record), trace=tr.to_dict(),
                  solution={"w": _complex_list(res.sol.w), "rho": res.sol.rho.tolist(),
                            "theta": _complex_list(res.theta.theta), "active": res.theta.active})
    if not _non_increasing(tr.f1):
        log.warning("f1 trace is not non-increasing: %s", tr.f1)
    _emit(args.out, report)
    if record.converged:
        return EXIT_OK
    return EXIT_STALLED


def _emit(out, report) -> None:
    if out:
        write_json(Path(out), report)
    else:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n")


def _non_increasing(xs, rtol: float = 1e-6) -> bool:
    return all(b <= a * (1 + rtol) for a, b in zip(xs, xs[1:]))


# ---------------------------------------------------------------------------
# sweep

def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.json")


def cmd_sweep(args) -> int:
    scn = _scenario(args)
    if args.axis not in bcd.AXES:
        raise UsageError(f"--axis must be one of {bcd.AXES}")
    values = _floats(args.values, "--values")
    if args.axis in ("M", "N"):
        values = [int(v) for v in values]
    if args.axis == "p_max":
        values = [v * 1e-3 for v in values]     # given in mW
    schemes = _schemes(args.schemes)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    records = []
    interrupted = False
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        fh.flush()

        def on_record(rec):
            if not args.wall_time:
                rec.wall_ms = 0.0
            records.append(rec)
            writer.writerow([fmt(getattr(rec, c)) for c in SWEEP_COLUMNS])
            fh.flush()

        try:
            bcd.sweep(scn, args.axis, values, args.trials, args.seed, schemes,
                      workers=args.workers, on_record=on_record)
        except KeyboardInterrupt:
            interrupted = True
            log.warning("interrupted; %d records written to %s", len(records), out)
    summary = {"schema_version": SCHEMA_VERSION, "scenario": scn.as_dict(), "axis": args.axis,
               "values": values, "trials": args.trials, "seed": args.seed, "schemes": schemes,
               "complete": not interrupted, "cells": bcd.summarize(records)}
    write_json(summary_path(out), summary)
    for cell in summary["cells"]:
        if cell["flagged"]:
            log.warning("cell %s=%s %s: %.0f%% failures", args.axis, cell["axis_value"],
                        cell["scheme"], 100 * cell["failure_rate"])
    return EXIT_INTERRUPTED if interrupted else EXIT_OK


# ---------------------------------------------------------------------------
# convergence

def cmd_convergence(args) -> int:
    scn = _scenario(args)
    seeds = _ints(args.seeds, "--seeds")
    pmax = _floats(args.pmax_list, "--pmax-list")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    worst = EXIT_OK
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CONVERGENCE_COLUMNS)
        for p in pmax:
            cell = scn.replace(p_max=p * 1e-3)
            for seed in seeds:
                ch = gen_channels(cell, seed)
                try:
                    res = bcd.bcd_solve(ch, cell, seed, scheme="active")
                except bcd.RunInfeasible as exc:
                    log.error("seed %d p_max %g mW infeasible: %s", seed, p, exc)
                    worst = max(worst, EXIT_INFEASIBLE)
                    continue
                tr = res.trace
                if not _non_increasing(tr.f1):
                    log.warning("seed %d p_max %g mW: f1 trace is not non-increasing", seed, p)
                if not tr.converged:
                    worst = max(worst, EXIT_STALLED)
                for i, (f1, refl, tot) in enumerate(zip(tr.f1, tr.reflect, tr.total)):
                    writer.writerow([fmt(x) for x in (SCHEMA_VERSION, seed, p, i, f1, refl, tot, tr.status)])
                fh.flush()
    return worst


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="risswipt", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", help="INI scenario file (built-in defaults if omitted)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="run one scheme on one channel draw")
    common(p)
    p.add_argument("--scheme", default="active", help="scheme tag, e.g. active, active@15, passive")
    p.add_argument("--out", help="JSON report path (stdout if omitted)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over one axis")
    common(p)
    p.add_argument("--axis", required=True, choices=bcd.AXES)
    p.add_argument("--values", required=True, help="comma list; p_max values in mW")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--schemes", default="active")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-wall-time", dest="wall_time", action="store_false",
                   help="write wall_ms as 0 so repeated sweeps are byte-identical")
    p.add_argument("--out", required=True, help="CSV path; summary goes to <stem>.summary.json")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("convergence", help="per-iteration f1 trajectories")
    p.add_argument("config", nargs="?")
    p.add_argument("--seeds", default="0")
    p.add_argument("--pmax-list", default="10,15", help="comma list in mW")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convergence)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
