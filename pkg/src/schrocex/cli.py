"""Command-line entry point.

Every subcommand prints one JSON report (or writes it to --out). Exit status is
0 when every asserted bound holds, 1 when one fails and 2 for a rejected
configuration.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable

from . import __version__, audit
from .bump import build_bump
from .counterexample import (
    ConstraintViolation,
    Constants,
    CounterexampleParams,
    QuadratureBudgetError,
    baseline_quarter,
    reports_to_csv,
    verify_reduction,
)
from .expsum import census, parseval_check, sum_table, weil_margin
from .modular import is_prime, primes_in_range
from .omega import (
    CapExceeded,
    NoAdmissibleShift,
    build_omega,
    choose_t,
    map_to_omega_star,
    measure_report,
    verify_lower_bound,
)
from .optimizer import solve_exponents, verify_optimality


class ConfigError(ValueError):
    pass


CONSTANT_KEYS = ("c0", "c1", "c2", "c3", "c4", "c5")

DEFAULTS: dict[str, dict[str, Any]] = {
    "expsum census": {"k": 2, "q": 5, "qmax": None, "alpha1": 0.5},
    "expsum weil": {"k": 2, "q": 5, "qmax": None},
    "expsum parseval": {"k": 2, "q": 5, "qmax": None},
    "omega build": {"Q": 2048, "n": 2, "k": 3, "c4": 1 / 32, "c5": 1 / 32, "lines": None, "limit": None},
    "omega measure": {"Q": 2048, "n": 2, "k": 3, "c4": 1 / 32, "c5": 1 / 32, "mc_samples": 0, "seed": 0, "cap": None},
    "omega verify": {
        "Q": 2048, "n": 2, "k": 3, "ratio_mult": 64, "S1": 64.0, "points": 200, "seed": 0, "jitter": 0.9,
        **{c: None for c in CONSTANT_KEYS},
    },
    "counterexample run": {
        "Q": 2048, "n": 2, "k": 3, "ratio_mult": 64, "S1": 64.0, "points": 10, "seed": 0, "jitter": 0.9,
        "quad_order": 64, **{c: None for c in CONSTANT_KEYS},
    },
    "counterexample baseline": {"n": 2, "k": 3, "R": 1e6, "factor": 16, "grid": 201},
    "optimize": {"n": 2, "k": 3},
    "optimize grid": {"n": 2, "k": 3, "step": 1e-3},
}


def _audit_constants() -> dict:
    return {k: v for k, v in vars(audit).items() if k.isupper()}


def _primes(cfg: dict) -> list[int]:
    if cfg.get("qmax"):
        return [p for p in primes_in_range(3, int(cfg["qmax"]) + 1)]
    q = int(cfg["q"])
    if not is_prime(q):
        raise ConfigError(f"q = {q} is not prime")
    return [q]


# ---------------------------------------------------------------------------
# Commands. Each returns (result, passed, csv_rows).


def cmd_census(cfg):
    rows = [census(int(cfg["k"]), q, float(cfg["alpha1"])) for q in _primes(cfg)]
    res = [r.to_dict() | {"ok": r.ok} for r in rows]
    csv_rows = [{"q": r.q, "k": r.k, "count": r.count, "count_nonzero": r.count_nonzero, "fraction": r.fraction} for r in rows]
    return res, all(r.ok for r in rows), csv_rows


def cmd_weil(cfg):
    k = int(cfg["k"])
    rows = [weil_margin(k, q, sum_table(k, q)) for q in _primes(cfg)]
    res = [asdict(r) | {"ok": r.ok} for r in rows]
    return res, all(r.ok for r in rows), [{"q": r.q, "k": r.k, "max_ratio": r.max_ratio} for r in rows if r.applicable]


def cmd_parseval(cfg):
    rows = [parseval_check(int(cfg["k"]), q) for q in _primes(cfg)]
    res = [asdict(r) | {"ok": r.ok} for r in rows]
    return res, all(r.ok for r in rows), [{"q": r.q, "k": r.k, "residual": r.residual} for r in rows]


def _system(cfg, threads):
    return build_omega(int(cfg["Q"]), int(cfg["n"]), int(cfg["k"]), float(cfg["c4"]), float(cfg["c5"]), threads)


def cmd_omega_build(cfg, threads):
    S = _system(cfg, threads)
    if cfg.get("lines"):
        limit = int(cfg["limit"]) if cfg.get("limit") else None
        Path(cfg["lines"]).write_text(S.to_lines(limit))
    B0, B1 = S.measure_range
    res = {
        "primes": len(S.primes),
        "boxes": S.box_count,
        "total_measure": S.total_measure,
        "B0": B0,
        "B1": B1,
        "count_spread": S.count_spread,
    }
    rows = [{"q": q, "count": c} for q, c in S.counts.items()]
    return res, True, rows


def cmd_omega_measure(cfg, threads):
    S = _system(cfg, threads)
    cap = int(cfg["cap"]) if cfg.get("cap") else None
    rep = measure_report(S, int(cfg["mc_samples"]), int(cfg["seed"]), cap, threads)
    res = rep.to_dict()
    checks = {}
    if rep.exact is not None:
        checks["overlap_floor"] = rep.exact >= rep.overlap_floor
        if rep.mc_ci is not None:
            checks["mc_agrees"] = rep.mc_ci[0] <= rep.exact <= rep.mc_ci[1]
    res["checks"] = checks
    return res, all(checks.values()), []


def _params(cfg, profile) -> CounterexampleParams:
    c = Constants()
    over = {k: float(cfg[k]) for k in CONSTANT_KEYS if cfg.get(k) is not None}
    c = Constants(**(asdict(c) | over))
    Q = int(cfg["Q"])
    return CounterexampleParams.desk(int(cfg["n"]), int(cfg["k"]), Q, int(cfg["ratio_mult"]) * Q, float(cfg["S1"]), c, profile=profile)


def _validated(cfg):
    profile = build_bump()
    p = _params(cfg, profile)
    bad = p.violations()
    if bad:
        raise bad[0]
    return p, profile


def cmd_omega_verify(cfg, threads):
    p, _ = _validated(cfg)
    c = p.constants
    S = build_omega(p.Q, p.n, p.k, c.c4, c.c5, threads)
    pts = map_to_omega_star(S, p, int(cfg["points"]), int(cfg["seed"]), float(cfg["jitter"]))
    rows = []
    for pt in pts:
        ch = choose_t(pt, p)
        r = verify_lower_bound(pt, ch, p)
        rows.append(
            {"q": pt.q, "a": " ".join(map(str, pt.a)), "t": ch.to_dict()["t"], "S": r.S, "floor": r.floor,
             "E2_budget": r.E2_budget, "decomposition_ok": r.decomposition_ok, "passed": r.passed}
        )
    passed = all(r["passed"] and r["decomposition_ok"] for r in rows)
    res = {
        "params": _jsonable(p.to_dict()),
        "points": len(rows),
        "failures": sum(not (r["passed"] and r["decomposition_ok"]) for r in rows),
        "min_S_over_floor": min(r["S"] / r["floor"] for r in rows) if rows else None,
    }
    return res, passed, rows


def cmd_counterexample_run(cfg, threads):
    p, profile = _validated(cfg)
    c = p.constants
    S = build_omega(p.Q, p.n, p.k, c.c4, c.c5, threads)
    pts = map_to_omega_star(S, p, int(cfg["points"]), int(cfg["seed"]), float(cfg["jitter"]))
    rows = []
    for pt in pts:
        ch = choose_t(pt, p)
        r = verify_reduction(pt.x, ch.t, p, profile, ch.top, int(cfg["quad_order"]))
        rows.append({"q": pt.q, "a": " ".join(map(str, pt.a))} | r.to_dict() | {"weights": " ".join(f"{w:.12g}" for w in r.weights)})
    res = {"params": _jsonable(p.to_dict()), "points": len(rows), "failures": sum(not r["passed"] for r in rows)}
    return res, all(r["passed"] for r in rows), rows


def cmd_baseline(cfg):
    n, k, R, f = int(cfg["n"]), int(cfg["k"]), float(cfg["R"]), float(cfg["factor"])
    profile = build_bump()
    a = baseline_quarter(n, k, R, profile, int(cfg["grid"]))
    b = baseline_quarter(n, k, R * f, profile, int(cfg["grid"]))
    pa, pb = math.sqrt(a.S1) * a.mass, math.sqrt(b.S1) * b.mass
    growth = pb / pa if pa else math.inf
    expected = f**0.25
    res = {"runs": [a.to_dict(), b.to_dict()], "proxy": [pa, pb], "growth": growth, "expected": expected}
    return res, abs(growth / expected - 1) <= 0.1 and a.ok and b.ok, [a.to_dict(), b.to_dict()]


def cmd_optimize(cfg):
    e = solve_exponents(int(cfg["n"]), int(cfg["k"]))
    return e.to_dict(), all(v >= 0 for v in e.slack.values()), []


def cmd_optimize_grid(cfg):
    n, k = int(cfg["n"]), int(cfg["k"])
    e = solve_exponents(n, k)
    g = verify_optimality(n, k, float(cfg["step"]))
    return e.to_dict() | g.to_dict(), 0 <= g.gap <= 1e-3, []


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out[k] = _jsonable(v)
        elif isinstance(v, float) and not math.isfinite(v):
            out[k] = str(v)
        else:
            out[k] = v
    return out


COMMANDS: dict[str, Callable] = {
    "expsum census": lambda c, t: cmd_census(c),
    "expsum weil": lambda c, t: cmd_weil(c),
    "expsum parseval": lambda c, t: cmd_parseval(c),
    "omega build": cmd_omega_build,
    "omega measure": cmd_omega_measure,
    "omega verify": cmd_omega_verify,
    "counterexample run": cmd_counterexample_run,
    "counterexample baseline": lambda c, t: cmd_baseline(c),
    "optimize": lambda c, t: cmd_optimize(c),
    "optimize grid": lambda c, t: cmd_optimize_grid(c),
}


# ---------------------------------------------------------------------------
# Argument parsing


def _add_options(p: argparse.ArgumentParser, command: str) -> None:
    for key, default in DEFAULTS[command].items():
        kind = type(default) if default is not None else (float if key in CONSTANT_KEYS else str)
        if key in ("qmax", "limit", "cap"):
            kind = int
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=kind, default=None)
    p.add_argument("--config", help="JSON file with parameters; flags override it")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="write the per-row table here")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schrocex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="group", required=True)

    ex = top.add_parser("expsum").add_subparsers(dest="action", required=True)
    for name in ("census", "weil", "parseval"):
        _add_options(ex.add_parser(name), f"expsum {name}")

    om = top.add_parser("omega").add_subparsers(dest="action", required=True)
    for name in ("build", "measure", "verify"):
        _add_options(om.add_parser(name), f"omega {name}")

    ce = top.add_parser("counterexample").add_subparsers(dest="action", required=True)
    for name in ("run", "baseline"):
        _add_options(ce.add_parser(name), f"counterexample {name}")

    op = top.add_parser("optimize")
    _add_options(op, "optimize")
    op_sub = op.add_subparsers(dest="action")
    _add_options(op_sub.add_parser("grid"), "optimize grid")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS[command]:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    command = args.group if args.group == "optimize" and not args.action else f"{args.group} {args.action}"
    try:
        cfg = resolve_config(command, args)
        result, passed, rows = COMMANDS[command](cfg, max(1, args.threads))
    except (ConfigError, ConstraintViolation, NoAdmissibleShift, CapExceeded, QuadratureBudgetError) as e:
        name = getattr(e, "name", type(e).__name__)
        sys.stderr.write(f"schrocex: configuration rejected ({name}): {e}\n")
        return 2
    report = {
        "command": command,
        "version": __version__,
        "config": _jsonable(cfg),
        "audit": _audit_constants(),
        "result": result,
        "passed": bool(passed),
    }
    _emit(report, args.out)
    if args.csv:
        Path(args.csv).write_text(reports_to_csv(rows))
    if not passed:
        sys.stderr.write(f"schrocex: {command}: an asserted bound failed; see the report\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
