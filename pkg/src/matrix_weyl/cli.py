# -*- encoding: utf-8 -*-
"""
matrix-weyl command-line front end.

Subcommands:
    mfunction       M_+, M_- or M~_- on a list of z (JSON records)
    reflectionless  residual ||M_+ + conj M~_-|| on a grid of A (CSV + JSON summary)
    bp-defect       value-distribution defect per N (CSV + JSON summary)
    omega           omega-limit approximation and its convergence trace (CSV + JSON)
    siegel-dist     Siegel distance of two matrices plus the distance battery
    selftest        sign-convention and Siegel-distance batteries

Exit status: 0 success, 1 configuration error, 2 numerical failure
(an exception from the numerics, a non-converged evaluation, an unstable
omega-limit, or a failed battery).

Usage:
    matrix-weyl mfunction --potential free --z 0+2i
    matrix-weyl bp-defect --potential free --a=-1:1 --s 0:inf --n 4 --n 256 -o results
    matrix-weyl selftest -v

Negative values that start with '-' must be attached with '=' (--a=-1:1).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from matrix_weyl import __version__
from matrix_weyl.config import MSide, RunConfig, Subcommand
from matrix_weyl.dynamics import omega_limit
from matrix_weyl.errors import InvalidInputError, SpectralError
from matrix_weyl.experiments import bp_defect, reflectionless_residual
from matrix_weyl.reports import report_filename, spec_hash, write_csv, write_json
from matrix_weyl.selftest import run_selftest, siegel_battery
from matrix_weyl.siegel import SiegelPoint, siegel_distance
from matrix_weyl.weyl import m_minus, m_plus_grid, m_tilde_minus_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
DEFAULT_OUTPUT_DIR = "results"
SIEGEL_DIST_PAIRS = 200


# ── Parser ───────────────────────────────────────────────────────────


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--jobs", "-j", type=int, help="worker threads (default: available cores)")
    p.add_argument(
        "--output", "-o", help="output file (mfunction, siegel-dist, selftest) or directory",
    )
    p.add_argument(
        "--verbose", "-v", dest="verbosity", action="count",
        help="-v for INFO, -vv for DEBUG logging on stderr",
    )
    return p


def _potential_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--spec", help="potential spec as inline JSON or a JSON file path")
    group.add_argument("--potential", help="catalog potential name (e.g. free, dimer, decaying)")


def _weyl_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-start", dest="n_start", type=int, help="first truncation depth (32)")
    p.add_argument("--n-max", dest="n_max", type=int, help="largest truncation depth (2^20)")
    p.add_argument("--tol", type=float, help="convergence tolerance (default 1e-11 (1 + |z|))")
    p.add_argument(
        "--seed-mode", dest="seed_mode", choices=["tail", "siegel"], help="iteration seed",
    )
    p.add_argument("--seed-scale", dest="seed_scale", type=float, help="s in the Siegel seed s*iI")
    p.add_argument(
        "--certify", action="store_true", default=None,
        help="rerun every value from the seed 2iI and require agreement",
    )


def _interval_flags(p: argparse.ArgumentParser, with_s: bool) -> None:
    p.add_argument(
        "--a", action="append", metavar="LO:HI",
        help="interval of A (repeatable; intervals are merged)",
    )
    if with_s:
        p.add_argument(
            "--s", action="append", metavar="LO:HI", help="interval of S (repeatable; inf allowed)",
        )
    p.add_argument(
        "--eps", action="append", type=float, help="regularization eps (repeatable for a schedule)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrix-weyl",
        description="Matrix Weyl m-functions, reflectionless residuals and value distribution.",
    )
    parser.add_argument("--version", action="version", version=f"matrix-weyl {__version__}")
    common = _common_flags()
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("mfunction", parents=[common], help="evaluate an m-function on a z list")
    _potential_flags(p)
    p.add_argument("--z", action="append", help="spectral parameter x+yi (repeatable)")
    p.add_argument("--side", choices=[s.value for s in MSide], help="which m-function (plus)")
    p.add_argument("--site", type=int, help="site n (0)")
    _weyl_flags(p)

    p = sub.add_parser("reflectionless", parents=[common], help="reflectionless residual on A")
    _potential_flags(p)
    _interval_flags(p, with_s=False)
    p.add_argument("--grid-step", dest="grid_step", type=float, help="grid step on A (1e-3)")
    _weyl_flags(p)

    p = sub.add_parser("bp-defect", parents=[common], help="value-distribution defect per N")
    _potential_flags(p)
    _interval_flags(p, with_s=True)
    p.add_argument("--n", dest="n_list", action="append", type=int, help="site N (repeatable)")
    p.add_argument("--c", action="append", help="compression vector entry (repeatable, ||c|| <= 1)")
    p.add_argument(
        "--points-per-unit", dest="points_per_unit", type=int, help="quadrature density (2048)",
    )
    _weyl_flags(p)

    p = sub.add_parser("omega", parents=[common], help="omega-limit approximation")
    _potential_flags(p)
    p.add_argument("--omega-n-max", dest="omega_n_max", type=int, help="largest shift (4096)")
    p.add_argument("--cluster-tol", dest="cluster_tol", type=float, help="cluster tolerance (1e-6)")

    p = sub.add_parser("siegel-dist", parents=[common], help="Siegel distance of two matrices")
    p.add_argument("--z1", help="first matrix: JSON {value_re, value_im} or a file path")
    p.add_argument("--z2", help="second matrix: JSON {value_re, value_im} or a file path")

    sub.add_parser("selftest", parents=[common], help="run the validation batteries")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    skip = {"config"}
    out = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if "z" in out:
        out["z"] = list(out["z"])
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    overrides = _overrides(args)
    if args.config:
        return RunConfig.load(args.config, overrides).validate()
    return RunConfig.from_dict(overrides).validate()


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("matrix_weyl").setLevel(level)


# ── Subcommands ──────────────────────────────────────────────────────


def _meta(cfg: RunConfig) -> dict:
    meta = {"subcommand": cfg.subcommand.value, "config_hash": cfg.config_hash()}
    if cfg.spec is not None:
        meta["spec_hash"] = spec_hash(cfg.spec)
    return meta


def _emit_json(cfg: RunConfig, payload: dict) -> None:
    if cfg.output:
        path = write_json(cfg.output, payload, _meta(cfg))
        logger.info("wrote %s", path)
    else:
        doc = {"meta": {"tool": f"matrix-weyl {__version__}", **_meta(cfg)}, **payload}
        print(json.dumps(doc, sort_keys=True, indent=2))


def _output_dir(cfg: RunConfig) -> Path:
    return Path(cfg.output or DEFAULT_OUTPUT_DIR)


def run_mfunction(cfg: RunConfig) -> int:
    if cfg.side == MSide.PLUS:
        evals = m_plus_grid(cfg.spec, cfg.z_grid, cfg.site, cfg.weyl, cfg.jobs)
    elif cfg.side == MSide.TILDE_MINUS:
        evals = m_tilde_minus_grid(cfg.spec, cfg.z_grid, cfg.site, cfg.weyl, cfg.jobs)
    else:
        evals = [m_minus(cfg.spec, z, cfg.weyl, cfg.site) for z in cfg.z_grid]
    records = [ev.to_dict() for ev in evals]
    for rec in records:
        rec["m_function"] = cfg.side.value
    _emit_json(cfg, {"evaluations": records})
    failed = [ev for ev in evals if not ev.converged]
    for ev in failed:
        logger.error(
            "no convergence at z=%s: depth %d, last step %.3e", ev.z, ev.depth, ev.last_step,
        )
    return EXIT_NUMERIC if failed else EXIT_OK


def run_reflectionless(cfg: RunConfig) -> int:
    report = reflectionless_residual(
        cfg.spec, cfg.a, cfg.eps, cfg.grid_step, opts=cfg.weyl, jobs=cfg.jobs,
    )
    out = _output_dir(cfg)
    name = report_filename("reflectionless", cfg.spec, {"eps": sorted(cfg.eps, reverse=True)})
    path = write_csv(out / name, _meta(cfg), report.columns(), report.rows())
    write_json(path.with_suffix(".json"), report.to_dict(), _meta(cfg))
    print(
        f"reflectionless: {len(report.ts)} points, max residual {report.max_residual:.3e} "
        f"at eps={report.eps:g}, decay order {report.decay_order}"
    )
    print(f"wrote {path}")
    if not all(report.converged):
        logger.error("some boundary values did not converge; see %s", path.with_suffix(".json"))
        return EXIT_NUMERIC
    return EXIT_OK


def run_bp_defect(cfg: RunConfig) -> int:
    eps = min(cfg.eps)
    report = bp_defect(
        cfg.spec, cfg.n_list, cfg.a, cfg.s, cfg.c, eps=eps,
        points_per_unit=cfg.points_per_unit, opts=cfg.weyl, jobs=cfg.jobs,
    )
    out = _output_dir(cfg)
    name = report_filename("bp-defect", cfg.spec, {"eps": eps, "N": cfg.n_list})
    path = write_csv(out / name, _meta(cfg), report.columns(), report.rows())
    write_json(path.with_suffix(".json"), report.to_dict(), _meta(cfg))
    for n, d in zip(report.n_values, report.defects):
        print(f"N={n}: defect {d:.6e}")
    print(f"quadrature floor {report.quadrature_floor:.1e}; wrote {path}")
    if not report.converged:
        logger.error("some M_+ boundary values did not converge")
        return EXIT_NUMERIC
    return EXIT_OK


def run_omega(cfg: RunConfig) -> int:
    omega = omega_limit(cfg.spec, n_max=cfg.omega_n_max, cluster_tol=cfg.cluster_tol)
    out = _output_dir(cfg)
    name = report_filename("omega", cfg.spec, {"nmax": cfg.omega_n_max})
    path = write_csv(out / name, _meta(cfg), ["n", "distance"], omega.convergence_trace)
    write_json(path.with_suffix(".json"), omega.to_dict(), _meta(cfg))
    print(
        f"omega-limit ({omega.method.value}): {len(omega.representatives)} representative(s), "
        f"stable={omega.stable}; wrote {path}"
    )
    if not omega.stable:
        logger.error("numeric clustering did not settle by n=%d", cfg.omega_n_max)
        return EXIT_NUMERIC
    return EXIT_OK


def run_siegel_dist(cfg: RunConfig) -> int:
    distance = siegel_distance(SiegelPoint(cfg.z1), SiegelPoint(cfg.z2))
    battery = siegel_battery(n_pairs=SIEGEL_DIST_PAIRS)
    _emit_json(cfg, {"distance": distance, "battery": battery.to_dict()})
    if not battery.passed:
        for f in battery.failures:
            logger.error("battery check failed: %s", f.message)
        return EXIT_NUMERIC
    return EXIT_OK


def run_selftest_command(cfg: RunConfig) -> int:
    results = run_selftest()
    for r in results:
        status = "ok" if r.passed else "FAILED"
        print(f"{r.name}: {status} ({r.checks_run} checks, {len(r.failures)} failures)")
        for f in r.failures:
            print(f"  {f.check}: {f.message}")
    m = results[0].details.get("m_plus_2i[tail]")
    if m is not None:
        print(f"free-case m(2i) = {m[0]:+.12f}{m[1]:+.12f}i (expected i(sqrt 2 - 1))")
    if cfg.output:
        write_json(cfg.output, {"batteries": [r.to_dict() for r in results]}, _meta(cfg))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


HANDLERS = {
    Subcommand.MFUNCTION: run_mfunction,
    Subcommand.REFLECTIONLESS: run_reflectionless,
    Subcommand.BP_DEFECT: run_bp_defect,
    Subcommand.OMEGA: run_omega,
    Subcommand.SIEGEL_DIST: run_siegel_dist,
    Subcommand.SELFTEST: run_selftest_command,
}


# ── Entry points ─────────────────────────────────────────────────────


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate and dispatch; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    _configure_logging(args.verbosity or 0)
    try:
        cfg = load_config(args)
    except InvalidInputError as exc:
        print(f"matrix-weyl: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logger.debug("config hash %s, jobs %d", cfg.config_hash(), cfg.jobs)
    try:
        return HANDLERS[cfg.subcommand](cfg)
    except InvalidInputError as exc:
        print(f"matrix-weyl: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpectralError as exc:
        print(f"matrix-weyl: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"matrix-weyl: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())
