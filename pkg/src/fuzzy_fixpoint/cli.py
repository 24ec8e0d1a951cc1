"""Command-line entry point.

Exit status: 0 when the check passes or the run converges, 1 on a
mathematical failure (divergence, axiom violation, non-contraction), 2 on
usage or configuration errors.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .contraction import (
    AffineMap,
    certify_affine_contraction,
    check_contractive,
    check_implication,
    operator_lipschitz,
    sample_pairs,
)
from .errors import CertificationRefused, FuzzyFixpointError, NotAContraction
from .fuzzy_space import FuzzySeminorm, check_fuzzy_axioms, check_literal_scaling, lattice_triangle_check
from .scenario import ScenarioError, parse_scenario
from .solver import Termination, cauchy_diagnostic, iterate, uniqueness_probe, verify_fixed_point
from .tnorm import check_tnorm_axioms

log = logging.getLogger("fuzzy_fixpoint")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _configure_logging() -> None:
    level_name = os.environ.get("FUZZY_FIXPOINT_LOG", "quiet").lower()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(LOG_LEVELS.get(level_name, logging.WARNING))
    log.propagate = False


def _plain(x: Any) -> Any:
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if x is None:
        return "-"
    return str(x)


def render_text(payload: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for k, item in enumerate(value):
                lines.append(f"{pad}  [{k}]")
                lines.append(render_text(item, indent + 2))
        else:
            lines.append(f"{pad}{key}: {_fmt(value)}")
    return "\n".join(lines)


def _emit(payload: dict, as_json: bool) -> None:
    payload = _plain(payload)
    if as_json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(render_text(payload) + "\n")


# --- subcommands ---------------------------------------------------------------


def cmd_run(args) -> int:
    scenario = parse_scenario(args.scenario)
    cfg = scenario.solver_config()
    log.info("iterating from %s for at most %d steps", cfg.y0.tolist(), cfg.max_iters)
    result = iterate(cfg)
    trace = result.trace
    if args.trace_out:
        Path(args.trace_out).write_text(trace.to_csv())

    checks = [verify_fixed_point(result.point, cfg.map, p, cfg.t_probe, cfg.alpha_tol) for p in cfg.fuzzy]
    oracle_tol = 10.0 * cfg.classical_tolerance
    payload = {
        "status": trace.terminated.value,
        "iterations": len(trace),
        "U": result.point,
        "verified": all(c.holds for c in checks),
        "membership_fix": [c.membership for c in checks],
        "residual_fix": [c.residual for c in checks],
        "oracle_point": result.oracle_point,
        "oracle_gap": result.oracle_gap,
        "oracle_tolerance": oracle_tol if result.oracle_point is not None else None,
    }
    if trace.diverged_at is not None:
        payload["diverged_at"] = trace.diverged_at
    _emit(payload, args.json)

    ok = result.converged and payload["verified"]
    if result.oracle_gap is not None:
        ok = ok and result.oracle_gap <= oracle_tol
    return EXIT_OK if ok else EXIT_FAIL


def cmd_certify(args) -> int:
    scenario = parse_scenario(args.scenario)
    cfg = scenario.solver_config()
    F = cfg.map
    entries, ok = [], True
    for i, q in enumerate(cfg.family):
        entry: dict = {"seminorm": q.describe()}
        try:
            cert = certify_affine_contraction(F, q, args.epsilon, args.alpha, i, seed=scenario.seed)
        except NotAContraction as exc:
            entry.update(status="not-a-contraction", lipschitz=exc.lipschitz)
            ok = False
        except CertificationRefused as exc:
            entry.update(status="refused", reason=str(exc))
            ok = False
        else:
            p = FuzzySeminorm(q)
            pairs = sample_pairs(F.dim, q, cert.hypothesis_radius, args.pairs, scenario.seed)
            contractive = check_contractive(F, p, cert.epsilon, cert.delta, pairs)
            implication = check_implication(F, p, cert, pairs)
            entry.update(
                status="certified" if cert.proven else "sampled, not proven",
                certificate=cert.as_dict(),
                contractive_check={
                    "passed": contractive.passed, "checked": contractive.checked, "violations": contractive.violations,
                    "first_violation": contractive.first_violation,
                },
                implication_check={
                    "passed": implication.passed, "in_scope": implication.hypotheses_met,
                    "excluded_by_cap": implication.cap_excluded, "cap_binding": implication.cap_binding,
                    "violations": implication.violations,
                },
            )
            ok = ok and cert.holds() and contractive.passed and implication.passed
        entries.append(entry)
    _emit({"map": "affine" if isinstance(F, AffineMap) else F.name, "seminorms": entries}, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_axioms(args) -> int:
    scenario = parse_scenario(args.scenario)
    tn = scenario.tnorm_kind()
    family = scenario.family()
    t_reports = check_tnorm_axioms(tn, args.samples, scenario.seed)
    payload: dict = {"tnorm": {"name": tn.value, "reports": [r.describe() for r in t_reports]}}
    ok = all(r.passed for r in t_reports)
    for i, q in enumerate(family):
        p = FuzzySeminorm(q)
        lattice = lattice_triangle_check(p, tn)
        reports = check_fuzzy_axioms(p, tn, args.samples, scenario.seed) if lattice.passed else []
        literal = check_literal_scaling(p, args.samples, scenario.seed)
        payload[f"seminorm_{i}"] = {
            "seminorm": q.describe(),
            "lattice_triangle": lattice.describe(),
            "reports": [r.describe() for r in reports] or ["skipped: lattice check failed"],
            "info_literal_scaling": literal.describe(),
        }
        ok = ok and lattice.passed and all(r.passed for r in reports)
    payload["all_passed"] = ok
    _emit(payload, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_probe_uniqueness(args) -> int:
    scenario = parse_scenario(args.scenario)
    cfg = scenario.solver_config()
    rng = np.random.default_rng([scenario.seed, 2])
    starts = [rng.standard_normal(cfg.family.dim) * 10.0 for _ in range(args.starts)]
    report = uniqueness_probe(cfg, starts, alpha_tol=args.membership_tol, workers=args.workers)
    payload = {
        "runs": [
            {"start": r.start, "status": r.terminated.value, "iterations": r.iterations, "U": r.point}
            for r in report.runs
        ],
        "max_pairwise_distance": report.max_distance,
        "min_pairwise_membership": report.min_membership,
        "min_chain_bound": report.min_chain_bound,
        "membership_floor": 1.0 - args.membership_tol,
    }
    _emit(payload, args.json)
    ok = (
        report.all_converged
        and report.max_distance is not None
        and report.max_distance <= args.tol
        and report.memberships_ok
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cauchy(args) -> int:
    scenario = parse_scenario(args.scenario)
    cfg = scenario.solver_config()
    result = iterate(cfg)
    lipschitz: Optional[list] = None
    if isinstance(cfg.map, AffineMap) and cfg.schedule.kind == "zero":
        try:
            bounds = [operator_lipschitz(cfg.map, q, seed=scenario.seed) for q in cfg.family]
        except CertificationRefused:
            bounds = []
        if bounds and all(b.exact and b.value < 1 for b in bounds):
            lipschitz = [b.value for b in bounds]
    report = cauchy_diagnostic(
        result.trace, cfg.family, args.epsilon, args.delta, args.alpha, args.beta, lipschitz, cfg.cauchy_window
    )
    payload = {
        "status": result.trace.terminated.value,
        "iterations": len(result.trace),
        "lipschitz": lipschitz,
        "burn_in": report.burn_in,
        "pairs_scanned": report.pairs_scanned,
        "offending_before_burn_in": report.offending_before_burn_in,
        "offending_after_burn_in": report.offending_after_burn_in,
        "first_offending": list(report.first_offending) if report.first_offending else None,
        "clean": report.clean,
    }
    _emit(payload, args.json)
    return EXIT_OK if report.clean else EXIT_FAIL


def cmd_dump(args) -> int:
    sys.stdout.write(parse_scenario(args.scenario).dumps())
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzy-fixpoint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scenario", help="scenario JSON file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=fn)
        return sp

    sp = add("run", cmd_run, "iterate to a fixed point and compare against the oracle")
    sp.add_argument("--trace-out", metavar="PATH", help="write the iteration trace as CSV")

    sp = add("certify", cmd_certify, "certify the map as a contraction per seminorm")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--pairs", type=_positive_int, default=10_000, help="sampled pairs for the empirical checks")

    sp = add("check-axioms", cmd_check_axioms, "t-norm and fuzzy seminorm axiom reports")
    sp.add_argument("--samples", type=_positive_int, default=10_000)

    sp = add("probe-uniqueness", cmd_probe_uniqueness, "iterate from several seeded starts and compare limits")
    sp.add_argument("--starts", type=_positive_int, required=True)
    sp.add_argument("--tol", type=float, default=1e-8, help="max pairwise sup distance")
    sp.add_argument("--membership-tol", type=float, default=1e-9, help="pairwise membership must be >= 1 - this")
    sp.add_argument("--workers", type=_positive_int, default=1)

    sp = add("cauchy", cmd_cauchy, "scan the trace for non-Cauchy witness pairs")
    for flag in ("--epsilon", "--delta", "--alpha", "--beta"):
        sp.add_argument(flag, type=float, required=True)

    add("dump", cmd_dump, "print the canonical form of a scenario")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FuzzyFixpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
