"""Command-line harness: solves, sweeps, verification and campaign runs.

Exit codes: 0 success/certified, 1 usage or input error, 2 inadmissible
parameters (nonexistence range), 3 non-converged, 4 unreliable tail.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import plots
from .asymptotics import decay_limit, decay_trace
from .errors import (
    ChoquardError,
    InputError,
    InvalidArgumentError,
    NonexistenceError,
    UnreliableTailError,
)
from .functionals import dilation_scan, evaluate, mass_energy_coefficient
from .grid import ProblemParams, load_profile_csv, make_grid, save_profile_csv
from .groundstate import (
    GroundstateResult,
    SolverConfig,
    init_profile,
    require_admissible,
    solve_groundstate,
    verify_groundstate,
)
from .polarization import campaign_to_json, run_campaign
from .riesz import assemble_kernel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_NOT_CONVERGED = 3
EXIT_UNRELIABLE_TAIL = 4

log = logging.getLogger("choquard")

DEFAULTS = {
    "N": 3,
    "alpha": 2.0,
    "rmax": None,
    "n": 3000,
    "spacing": None,
    "tol": 1e-8,
    "max_iter": 500,
    "damping": 1.0,
    "init": "gaussian",
    "out": "out",
    "jobs": 1,
    "seed": 0,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 is reserved for inadmissible
    parameters here, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="choquard",
        description="Radial groundstate solver and identity-verification harness",
    )
    ap.add_argument("--N", type=int)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--p", type=float)
    ap.add_argument("--rmax", type=float)
    ap.add_argument("--n", type=int)
    ap.add_argument("--spacing", choices=["uniform", "graded"])
    ap.add_argument("--tol", type=float)
    ap.add_argument("--max-iter", dest="max_iter", type=int)
    ap.add_argument("--damping", type=float)
    ap.add_argument("--init", choices=["gaussian", "exponential", "file"])
    ap.add_argument("--init-path")
    ap.add_argument("--out")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--config", help="key = value config file; flags win")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("solve")
    verify = sub.add_parser("verify")
    verify.add_argument("--profile", required=True)
    sweep = sub.add_parser("sweep")
    sweep.add_argument("--p-list", dest="p_list")
    sweep.add_argument("--alpha-list", dest="alpha_list")
    camp = sub.add_parser("polarization-campaign")
    camp.add_argument("--trials", type=int, default=500)
    camp.add_argument("--pairing-alpha", type=float, default=1.0)
    sub.add_parser("scaling-audit")
    return ap


def load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}: line {lineno}: expected 'key = value'")
            key, raw = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = raw
    return values


_CONFIG_TYPES = {
    "N": int,
    "n": int,
    "max_iter": int,
    "jobs": int,
    "seed": int,
    "alpha": float,
    "p": float,
    "rmax": float,
    "tol": float,
    "damping": float,
}


def merge_options(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        for key, raw in load_config_file(args.config).items():
            caster = _CONFIG_TYPES.get(key, str)
            try:
                opts[key] = caster(raw)
            except ValueError:
                raise InputError(f"config value for {key!r} is not a valid {caster.__name__}")
    for key in list(DEFAULTS) + ["p", "init_path"]:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    return opts


def pick_domain(opts: dict) -> tuple[float, int, str]:
    """Domain defaults per decay regime: polynomial tails need a far larger box."""
    p = opts["p"]
    rmax = opts["rmax"]
    spacing = opts["spacing"]
    if rmax is None:
        rmax = 240.0 if p < 2.0 else 30.0
    if spacing is None:
        spacing = "graded" if p < 2.0 else "uniform"
    return float(rmax), int(opts["n"]), spacing


def _params(opts: dict) -> ProblemParams:
    if opts.get("p") is None:
        raise InputError("--p is required")
    return ProblemParams(dim=opts["N"], alpha=opts["alpha"], p=opts["p"])


def _solver_config(opts: dict) -> SolverConfig:
    return SolverConfig(
        max_iter=opts["max_iter"],
        tol_residual=opts["tol"],
        damping=opts["damping"],
        init=opts["init"],
        init_path=opts.get("init_path"),
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _report_payload(params, grid_info, result, report, decay) -> dict:
    return {
        "schema_version": 1,
        "params": {"N": params.dim, "alpha": params.alpha, "p": params.p},
        "grid": grid_info,
        "functionals": asdict(result.values),
        "iterations": result.iterations,
        "converged": result.converged,
        "verification": {
            "residuals": {
                "nehari": report.nehari_residual,
                "pohozaev": report.pohozaev_residual,
                "integral_identity": report.integral_identity_residual,
                "pde": report.pde_residual,
            },
            "min_value": report.min_value,
            "max_upward_jump": report.max_upward_jump,
            "farfield_max_deviation": report.farfield_max_deviation,
            "checks": report.checks,
            "certified": report.certified,
        },
        "decay": decay,
    }


def run_solve(opts: dict) -> int:
    params = _params(opts)
    require_admissible(params)  # fail fast, before the kernel assembly
    rmax, n, spacing = pick_domain(opts)
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    grid = make_grid(rmax, n, params.dim, spacing)
    kernel = assemble_kernel(grid, params)
    result = solve_groundstate(params, grid, kernel, _solver_config(opts))
    report = verify_groundstate(result, kernel, params)
    grid_info = {"r_max": rmax, "n": n, "spacing": spacing}

    save_profile_csv(outdir / "profile.csv", result.profile)
    with open(outdir / "s_history.csv", "w") as fh:
        fh.write("iteration,s\n")
        for i, s in enumerate(result.s_history):
            fh.write(f"{i},{float(s)!r}\n")
    plots.plot_profile(outdir / "profile.png", result.profile, params)
    plots.plot_s_history(outdir / "s_history.png", result.s_history)
    _write_json(
        outdir / "run_meta.json",
        {"started_unix": t0, "elapsed_s": time.time() - t0, "command": "solve"},
    )

    decay_payload: dict | None = None
    tail_error = None
    try:
        decay = decay_limit(result.profile, params)
        decay_payload = asdict(decay)
        r_tr, v_tr = decay_trace(result.profile, params)
        with open(outdir / "decay_trace.csv", "w") as fh:
            fh.write("r,value\n")
            for r, v in zip(r_tr, v_tr):
                fh.write(f"{float(r)!r},{float(v)!r}\n")
        plots.plot_decay_trace(outdir / "decay_trace.png", r_tr, v_tr, params, decay.plateau)
    except UnreliableTailError as exc:
        tail_error = str(exc)
        decay_payload = {"error": tail_error}

    _write_json(
        outdir / "report.json", _report_payload(params, grid_info, result, report, decay_payload)
    )
    if tail_error is not None:
        print(f"unreliable tail: {tail_error}", file=sys.stderr)
        return EXIT_UNRELIABLE_TAIL
    if not result.converged:
        print("solver did not converge within max_iter", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if not report.certified:
        print("verification checks failed; see report.json", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"certified groundstate written to {outdir} (S = {result.values.s_quotient:.10g})")
    return EXIT_OK


def run_verify(opts: dict, profile_path: str) -> int:
    params = _params(opts)
    profile = load_profile_csv(profile_path, params.dim)
    kernel = assemble_kernel(profile.grid, params)
    values = evaluate(profile, kernel, params)
    result = GroundstateResult(
        profile=profile, values=values, s_history=(), iterations=0, converged=True
    )
    report = verify_groundstate(result, kernel, params)
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    grid_info = {
        "r_max": profile.grid.r_max,
        "n": profile.grid.n,
        "spacing": profile.grid.spacing,
    }
    _write_json(
        outdir / "report.json", _report_payload(params, grid_info, result, report, None)
    )
    for name, ok in report.checks.items():
        print(f"{name}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if report.certified else EXIT_NOT_CONVERGED


def _sweep_row(opts: dict, N: int, alpha: float, p: float) -> dict:
    row = {"N": N, "alpha": alpha, "p": p, "status": "ok"}
    try:
        params = ProblemParams(dim=N, alpha=alpha, p=p)
    except InvalidArgumentError as exc:
        row["status"] = f"invalid: {exc}"
        return row
    if not params.admissible:
        row["status"] = "inadmissible"
        return row
    local = dict(opts)
    local["p"] = p
    local["alpha"] = alpha
    local["N"] = N
    local["rmax"] = opts["rmax"]
    rmax, n, spacing = pick_domain(local)
    grid = make_grid(rmax, n, N, spacing)
    kernel = assemble_kernel(grid, params)
    try:
        result = solve_groundstate(params, grid, kernel, _solver_config(local))
    except ChoquardError as exc:
        row["status"] = f"failed: {exc}"
        return row
    report = verify_groundstate(result, kernel, params)
    vals = result.values
    row.update(
        S=vals.s_quotient,
        E=vals.energy,
        mass_energy_ratio=vals.mass / vals.energy,
        predicted_ratio=mass_energy_coefficient(params),
        nehari_residual=report.nehari_residual,
        pohozaev_residual=report.pohozaev_residual,
    )
    try:
        decay = decay_limit(result.profile, params)
        row["decay_plateau"] = decay.plateau
    except UnreliableTailError:
        row["decay_plateau"] = float("nan")
        row["status"] = "unreliable-tail"
    if not result.converged:
        row["status"] = "non-converged"
    return row


SWEEP_COLUMNS = [
    "N",
    "alpha",
    "p",
    "S",
    "E",
    "mass_energy_ratio",
    "predicted_ratio",
    "decay_plateau",
    "nehari_residual",
    "pohozaev_residual",
    "status",
]


def run_sweep(opts: dict, p_list: str | None, alpha_list: str | None) -> int:
    if not p_list and not alpha_list:
        print("sweep needs --p-list or --alpha-list", file=sys.stderr)
        return EXIT_USAGE
    try:
        if p_list:
            combos = [(opts["N"], opts["alpha"], float(s)) for s in p_list.split(",") if s.strip()]
        else:
            if opts.get("p") is None:
                raise InputError("--p is required with --alpha-list")
            combos = [
                (opts["N"], float(s), opts["p"]) for s in alpha_list.split(",") if s.strip()
            ]
    except ValueError:
        print("sweep list entries must be numbers", file=sys.stderr)
        return EXIT_USAGE
    if not combos:
        print("sweep list is empty", file=sys.stderr)
        return EXIT_USAGE
    jobs = max(1, int(opts["jobs"]))
    if jobs == 1:
        rows = [_sweep_row(opts, *combo) for combo in combos]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda c: _sweep_row(opts, *c), combos))
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "sweep.csv"
    with open(path, "w") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(str(row.get(c, "")) for c in SWEEP_COLUMNS) + "\n")
    ok = sum(1 for row in rows if row["status"] == "ok")
    print(f"sweep: {ok}/{len(rows)} runs succeeded -> {path}")
    return EXIT_OK if ok >= 1 else EXIT_NOT_CONVERGED


def run_scaling_audit(opts: dict) -> int:
    params = _params(opts)
    rmax, n, spacing = pick_domain(opts)
    grid = make_grid(rmax, n, params.dim, spacing)
    kernel = assemble_kernel(grid, params)
    probe = init_profile("gaussian", grid)
    payload = {"schema_version": 1, "params": {"N": params.dim, "alpha": params.alpha, "p": params.p}}
    payload["probe"] = {
        which: asdict(dilation_scan(probe, kernel, params, which))
        for which in ("E-ray", "S-dilate", "E0-mass-dilate")
    }
    if params.admissible:
        result = solve_groundstate(params, grid, kernel, _solver_config(opts))
        payload["groundstate"] = {
            which: asdict(dilation_scan(result.profile, kernel, params, which))
            for which in ("E-ray", "S-dilate", "E0-mass-dilate")
        }
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "scaling_audit.json", payload)
    for scope, scans in payload.items():
        if scope in ("schema_version", "params"):
            continue
        for which, scan in scans.items():
            gap = scan["relative_gap"]
            print(f"{scope} {which} [{scan['regime']}]: gap = {gap:.3e}")
    return EXIT_OK


def run_polarization_campaign(opts: dict, trials: int, pairing_alpha: float) -> int:
    result = run_campaign(trials=trials, seed=int(opts["seed"]), alpha=pairing_alpha)
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "campaign.json").write_text(campaign_to_json(result) + "\n")
    print(
        f"{result['trials']} trials: min gain {result['min_gain']:.3e}, "
        f"{result['equality_count']} equality cases, {len(result['failures'])} failures"
    )
    return EXIT_OK if not result["failures"] and result["min_gain"] >= -1e-12 else EXIT_NOT_CONVERGED


def main(argv=None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("CHOQUARD_LOG", "WARNING").upper(), logging.WARNING)
    )
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        opts = merge_options(args)
        if args.command == "solve":
            return run_solve(opts)
        if args.command == "verify":
            return run_verify(opts, args.profile)
        if args.command == "sweep":
            return run_sweep(opts, args.p_list, args.alpha_list)
        if args.command == "polarization-campaign":
            return run_polarization_campaign(opts, args.trials, args.pairing_alpha)
        if args.command == "scaling-audit":
            return run_scaling_audit(opts)
        raise InputError(f"unknown command {args.command!r}")
    except NonexistenceError as exc:
        print(f"inadmissible parameters: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (InputError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnreliableTailError as exc:
        print(f"unreliable tail: {exc}", file=sys.stderr)
        return EXIT_UNRELIABLE_TAIL


if __name__ == "__main__":
    sys.exit(main())
