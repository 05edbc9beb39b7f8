"""Command-line entry point ``metapop-hj``.

Exit status: 0 on success, 2 for regime or precondition errors, 3 for
numerical failures. Diagnostics go to stderr; data only to files.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .correctors import corrector_set, source_sink_correctors
from .errors import NumericalError, RegimeError
from .ess import DIMORPHIC, solve_ess, source_sink_ess
from .fd import (DEFAULT_N_PTS, SWEEP_COLUMNS, asymptotic_predictor,
                 epsilon_sweep_compare, steady_state_solve)
from .hj import default_grid, source_sink_u, u_profile, u_taylor
from .model import INVALID, SOURCE_SINK, check_assumptions
from .moments import MOMENT_COLUMNS

log = logging.getLogger("metapop_hj")

COMMANDS = ("check", "ess", "profile", "correctors", "moments", "solve", "compare")
DEFAULT_EPS_LIST = (0.1, 0.05, 0.025)
PROFILE_N_PTS = 4001


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metapop-hj",
                                 description="Two-habitat selection-mutation-migration equilibria.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="key = value parameter file")
    eps = ap.add_mutually_exclusive_group()
    eps.add_argument("--eps", type=float)
    eps.add_argument("--eps-list", help="comma-separated, strictly decreasing")
    ap.add_argument("--out", help="output directory (default: current directory)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--L", type=float, dest="L", help="grid half-width (default theta + 3)")
    ap.add_argument("--n-pts", type=int, dest="n_pts")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _resolve(args) -> dict:
    params, opts = io.read_config(args.config)
    cfg = {"params": params, "command": args.command}
    cfg["eps"] = args.eps if args.eps is not None else opts.get("eps")
    if args.eps_list is not None:
        cfg["eps_list"] = io.parse_eps_list(args.eps_list)
        cfg["eps"] = None
    else:
        cfg["eps_list"] = opts.get("eps_list")
    cfg["L"] = args.L if args.L is not None else opts.get("L")
    cfg["n_pts"] = args.n_pts if args.n_pts is not None else opts.get("n_pts")
    cfg["format"] = args.format or opts.get("format", "csv")
    if cfg["format"] not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {cfg['format']!r}")
    cfg["out"] = Path(args.out or opts.get("out", "."))
    p = params
    if cfg["L"] is not None and cfg["L"] < p.theta + 2.0:
        raise ValueError(f"grid half-width L={cfg['L']:g} must be at least theta + 2")
    if cfg["n_pts"] is not None and cfg["n_pts"] < 801:
        raise ValueError(f"n_pts={cfg['n_pts']} must be at least 801")
    if cfg["eps"] is not None and not cfg["eps"] > 0:
        raise ValueError(f"eps must be positive, got {cfg['eps']}")
    return cfg


def _eps_values(cfg, default=None) -> list:
    if cfg["eps_list"]:
        return list(cfg["eps_list"])
    if cfg["eps"] is not None:
        return [cfg["eps"]]
    if default is None:
        raise ValueError(f"{cfg['command']} needs --eps or --eps-list")
    return list(default)


def _ext(cfg) -> str:
    return "json" if cfg["format"] == "json" else "csv"


def _regime(p):
    report = check_assumptions(p)
    if report.regime == INVALID:
        raise RegimeError(report.message)
    return report.regime


def cmd_check(cfg) -> list:
    report = check_assumptions(cfg["params"])
    rec = {"regime": report.regime, "violated": report.violated, "message": report.message}
    path = cfg["out"] / f"check.{_ext(cfg)}"
    io.write_record(path, rec, cfg["format"])
    if not report.ok:
        raise RegimeError(report.message)
    return [path]


def cmd_ess(cfg) -> list:
    p = cfg["params"]
    if _regime(p) == SOURCE_SINK:
        rec = source_sink_ess(p).to_record()
    else:
        rec = {"regime": "two-way", **solve_ess(p).to_record()}
    path = cfg["out"] / f"ess.{_ext(cfg)}"
    io.write_record(path, rec, cfg["format"])
    return [path]


def _grid(cfg, n_default):
    p = cfg["params"]
    pad = 3.0 if cfg["L"] is None else cfg["L"] - p.theta
    return default_grid(p, cfg["n_pts"] or n_default, pad)


def cmd_profile(cfg) -> list:
    p = cfg["params"]
    grid = _grid(cfg, PROFILE_N_PTS)
    if _regime(p) == SOURCE_SINK:
        prof = source_sink_u(grid, source_sink_ess(p), p)
        cols = ("z", "u1", "u2_upper")
        rows = list(zip(prof.grid, prof.u1, prof.u2_upper))
    else:
        prof = u_profile(grid, solve_ess(p), p)
        cols = ("z", "u")
        rows = prof.to_rows()
    path = cfg["out"] / f"profile.{_ext(cfg)}"
    io.write_table(path, cols, rows, cfg["format"])
    return [path]


def cmd_correctors(cfg) -> list:
    p = cfg["params"]
    if _regime(p) == SOURCE_SINK:
        sse = source_sink_ess(p)
        if sse.patch2.kind == DIMORPHIC:
            rec = {"regime": SOURCE_SINK, "available": False,
                   "notes": ["corrector data is only provided for a monomorphic patch 2"]}
        else:
            rec = {"available": True, **source_sink_correctors(sse, p).to_record()}
    else:
        ess = solve_ess(p)
        if ess.kind == DIMORPHIC:
            rec = {"regime": "two-way", "available": False,
                   "notes": ["corrector data is not provided for a dimorphic ESS"]}
        else:
            ut = u_taylor(ess.z_star, ess.N_star, p)
            rec = {"available": True, **corrector_set(ess, ut, p).to_record(),
                   "A": ut.A, "B": ut.B, "C": ut.C}
    if not rec["available"]:
        log.warning(rec["notes"][0])
    path = cfg["out"] / f"correctors.{_ext(cfg)}"
    io.write_record(path, rec, cfg["format"])
    return [path]


def cmd_moments(cfg) -> list:
    p = cfg["params"]
    _regime(p)
    predict = asymptotic_predictor(p)
    rows = []
    for eps in _eps_values(cfg):
        rows.extend(predict(eps).rows())
    path = cfg["out"] / f"moments.{_ext(cfg)}"
    io.write_table(path, MOMENT_COLUMNS, rows, cfg["format"])
    return [path]


def _solve_kwargs(cfg) -> dict:
    kw = {"n_pts": cfg["n_pts"] or DEFAULT_N_PTS}
    if cfg["L"] is not None:
        kw["L"] = cfg["L"]
    return kw


def cmd_solve(cfg) -> list:
    p = cfg["params"]
    eps_values = _eps_values(cfg)
    paths = []
    for eps in eps_values:
        gs = steady_state_solve(p, eps, **_solve_kwargs(cfg))
        log.info("eps=%g converged in %d steps (residual %.3g)", eps, gs.iterations, gs.residual)
        stem = "solution" if len(eps_values) == 1 else f"solution_eps{eps:g}"
        data = cfg["out"] / f"{stem}.{_ext(cfg)}"
        io.write_table(data, ("z", "n1", "n2"), zip(gs.z, gs.n1, gs.n2), cfg["format"])
        summary = cfg["out"] / f"{stem}_summary.json"
        io.write_json(summary, gs.summary())
        paths += [data, summary]
    return paths


def cmd_compare(cfg) -> list:
    p = cfg["params"]
    _regime(p)
    rows = epsilon_sweep_compare(p, _eps_values(cfg, DEFAULT_EPS_LIST), **_solve_kwargs(cfg))
    path = cfg["out"] / f"compare.{_ext(cfg)}"
    io.write_table(path, SWEEP_COLUMNS, rows, cfg["format"])
    return [path]


HANDLERS = {"check": cmd_check, "ess": cmd_ess, "profile": cmd_profile,
            "correctors": cmd_correctors, "moments": cmd_moments,
            "solve": cmd_solve, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    stage = "config"
    try:
        cfg = _resolve(args)
        cfg["out"].mkdir(parents=True, exist_ok=True)
        stage = args.command
        for path in HANDLERS[args.command](cfg):
            log.info("wrote %s", path)
    except (RegimeError, ValueError, OSError) as exc:
        print(f"error [{stage}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error [{stage}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
