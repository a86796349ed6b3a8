"""Command-line surface: bounds, optimization, sweeps, thresholds, simulation.

Single-point queries print JSON; grid sweeps print RFC-4180-style CSV
(comma separator, dot decimal, header row).  All numbers are printed
with 9 significant digits.  Sweeps written to a file get a JSON manifest
alongside (<out>.manifest.json); rerunning with --from-manifest
reproduces the CSV byte-for-byte.

Exit codes: 0 ok, 2 usage error, 3 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__, bounds, cascade, montecarlo, optimizer
from .bounds import CostMode, CostWeights, StatePair
from .cascade import CascadeParams, NoiseModel

OUTDIR_ENV = "DISCRIM3_OUTDIR"

FIG1_THETAS = [i * math.pi / 10.0 for i in range(1, 6)]

# Figure presets: (mode, p_dp, p_m).
FIG1_PRESETS = {
    "fig1a": (CostMode.ABSOLUTE, 0.0, 0.0),
    "fig1b": (CostMode.SCALED, 0.0, 0.0),
    "fig1c": (CostMode.ABSOLUTE, 0.0, 0.0),
    "fig1d": (CostMode.SCALED, 0.0, 0.0),
    "fig1e": (CostMode.ABSOLUTE, 0.05, 0.0),
    "fig1f": (CostMode.SCALED, 0.05, 0.0),
    "fig1g": (CostMode.ABSOLUTE, 0.0, 0.02),
    "fig1h": (CostMode.SCALED, 0.0, 0.02),
}
FIG2A_PDP = [0.0, 0.02, 0.04, 0.06, 0.08, 0.10]
FIG2B_PM = [0.0, 0.01, 0.02, 0.03, 0.04]
FIG2CD_PM = [0.0, 0.02]

CSV_COLUMNS = ["theta", "k", "c_mh", "c_min", "delta", "p_dp", "p_m", "mode"]
CSV_COLUMNS_PARAMS = CSV_COLUMNS + ["s", "phi1", "phi2"]


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{x:.9g}"


def round9(x: float) -> float:
    return float(f"{x:.9g}")


def print_json(obj) -> None:
    def clean(v):
        if isinstance(v, float):
            return round9(v)
        if isinstance(v, dict):
            return {k: clean(u) for k, u in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(u) for u in v]
        return v

    print(json.dumps(clean(obj), indent=2))


def _angle(value: float, degrees: bool) -> float:
    return math.radians(value) if degrees else value


def _check_theta(parser: argparse.ArgumentParser, theta: float) -> float:
    # Slack absorbs decimal renderings of pi/2 such as 1.5707963268.
    if not (0.0 < theta <= 0.5 * math.pi + 1e-9):
        parser.error(f"--theta must lie in (0, pi/2], got {theta}")
    return min(theta, 0.5 * math.pi)


# ---------------------------------------------------------------- bound


def cmd_bound(parser, args) -> int:
    theta = _check_theta(parser, _angle(args.theta, args.degrees))
    if args.k is not None:
        if args.w is not None or args.d is not None:
            parser.error("--k is mutually exclusive with --w/--d")
        if args.k < 0:
            parser.error(f"--k must be nonnegative, got {args.k}")
        weights = CostWeights(1.0, args.k)
    else:
        if args.w is None or args.d is None:
            parser.error("provide either --k or both --w and --d")
        if args.w < 0 or args.d < 0 or args.w + args.d <= 0:
            parser.error("--w/--d must be nonnegative with w + d > 0")
        weights = CostWeights(args.w, args.d)
    pair = StatePair(theta)
    c_a, angle_a = bounds.cost_strategy_a(pair, weights)
    c_b, angle_b = bounds.cost_strategy_b(pair, weights)
    c_mh, winning = bounds.mh_bound(pair, weights)
    print_json(
        {
            "theta": theta,
            "w": weights.w,
            "d": weights.d,
            "k": weights.k,
            "c_a": c_a,
            "c_b": c_b,
            "c_mh": c_mh,
            "winning_strategy": winning.variant.value,
            "basis_angle": winning.basis_angle,
            "k_opt": bounds.k_opt(theta),
            "helstrom": bounds.helstrom(theta, weights.w),
        }
    )
    return 0


# ------------------------------------------------------------- optimize


def cmd_optimize(parser, args) -> int:
    theta = _check_theta(parser, _angle(args.theta, args.degrees))
    if args.k <= 0 and args.mode == "scaled":
        parser.error("--k must be positive in scaled mode")
    if args.k < 0:
        parser.error(f"--k must be nonnegative, got {args.k}")
    noise = _noise(parser, args)
    record, result = optimizer.violation_at(
        theta, args.k, noise, CostMode(args.mode), seed=args.seed
    )
    print_json(
        {
            "theta": theta,
            "k": args.k,
            "mode": args.mode,
            "p_dp": noise.p_dp,
            "p_m": noise.p_m,
            "seed": args.seed,
            "c_min": record.c_min,
            "c_mh": record.c_mh,
            "delta": record.delta,
            "phi1": result.best_params.phi1,
            "phi2": result.best_params.phi2,
            "s": result.best_params.s,
            "restarts_agreeing": result.restarts_agreeing,
            "evaluations": result.evaluations,
            "converged": result.converged,
        }
    )
    return 0 if result.converged else 3


def _noise(parser, args) -> NoiseModel:
    try:
        return NoiseModel(p_dp=args.p_dp, p_m=args.p_m)
    except ValueError as exc:
        parser.error(f"--p-dp/--p-m: {exc}")


# ---------------------------------------------------------------- sweep


def _build_plan(parser, args) -> dict:
    if args.from_manifest:
        with open(args.from_manifest) as fh:
            manifest = json.load(fh)
        return manifest["plan"]
    if args.figure:
        if args.figure in FIG1_PRESETS:
            mode, p_dp, p_m = FIG1_PRESETS[args.figure]
            ks = [(i + 1) / args.k_points for i in range(args.k_points)]
            return {
                "kind": "violation_grid",
                "figure": args.figure,
                "thetas": FIG1_THETAS,
                "ks": ks,
                "mode": mode.value,
                "p_dp": p_dp,
                "p_m": p_m,
                "seed": args.seed,
            }
        if args.figure in ("fig2a", "fig2b"):
            families = FIG2A_PDP if args.figure == "fig2a" else FIG2B_PM
            thetas = [
                0.5 * math.pi * (i + 1) / args.n_theta for i in range(args.n_theta)
            ]
            return {
                "kind": "max_violation_grid",
                "figure": args.figure,
                "channel": "depolarize" if args.figure == "fig2a" else "misidentify",
                "thetas": thetas,
                "levels": families,
                "seed": args.seed,
            }
        if args.figure in ("fig2c", "fig2d"):
            thetas = [
                0.5 * math.pi * (i + 1) / args.n_theta for i in range(args.n_theta)
            ]
            return {
                "kind": "kink_params_grid",
                "figure": args.figure,
                "thetas": thetas,
                "levels": FIG2CD_PM,
                "seed": args.seed,
            }
        parser.error(f"--figure: unknown figure id {args.figure!r}")
    if not args.thetas or not args.k_grid:
        parser.error("provide --figure, or both --thetas and --k-grid")
    try:
        thetas = [float(t) for t in args.thetas.split(",") if t.strip()]
    except ValueError:
        parser.error(f"--thetas: malformed list {args.thetas!r}")
    thetas = [_check_theta(parser, theta) for theta in thetas]
    parts = args.k_grid.split(":")
    if len(parts) != 3:
        parser.error(f"--k-grid: expected start:stop:count, got {args.k_grid!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        parser.error(f"--k-grid: malformed spec {args.k_grid!r}")
    if count < 1 or start <= 0 or stop < start:
        parser.error(f"--k-grid: invalid range {args.k_grid!r}")
    if count == 1:
        ks = [start]
    else:
        step = (stop - start) / (count - 1)
        ks = [start + i * step for i in range(count)]
    return {
        "kind": "violation_grid",
        "figure": None,
        "thetas": thetas,
        "ks": ks,
        "mode": args.mode,
        "p_dp": args.p_dp,
        "p_m": args.p_m,
        "seed": args.seed,
    }


def _fig2_violation_point(task) -> tuple:
    index, theta, p_dp, p_m, seed = task
    noise = NoiseModel(p_dp=p_dp, p_m=p_m)
    k_star, delta_max = optimizer.max_violation(theta, noise, seed=seed)
    c_mh, _ = bounds.mh_bound(StatePair(theta), CostWeights.from_k(max(k_star, 1e-9)))
    return index, (theta, k_star, c_mh, c_mh - delta_max, delta_max, p_dp, p_m, "absolute")


def _fig2_kink_point(task) -> tuple:
    index, theta, p_m, seed = task
    noise = NoiseModel(p_m=p_m)
    k = bounds.k_opt(theta)
    k_eff = max(k, 1e-6)
    record, result = optimizer.violation_at(theta, k_eff, noise, seed=seed, n_random=8)
    params = result.best_params
    phi1 = params.phi1 % math.pi
    phi2 = params.phi2 % math.pi
    return index, (
        theta,
        k,
        record.c_mh,
        record.c_min,
        record.delta,
        0.0,
        p_m,
        "absolute",
        params.s,
        phi1,
        phi2,
    )


def _run_tasks(fn, tasks, jobs: int) -> list:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, tasks, chunksize=4))
    else:
        results = [fn(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    return [row for _, row in results]


def run_plan(plan: dict, jobs: int = 1) -> tuple[list[str], list[tuple]]:
    """Execute a sweep plan, returning (header, rows)."""
    kind = plan["kind"]
    if kind == "violation_grid":
        noise = NoiseModel(p_dp=plan["p_dp"], p_m=plan["p_m"])
        records = optimizer.sweep(
            plan["thetas"],
            plan["ks"],
            noise,
            CostMode(plan["mode"]),
            seed=plan["seed"],
            jobs=jobs,
        )
        rows = [
            (r.theta, r.k, r.c_mh, r.c_min, r.delta, noise.p_dp, noise.p_m, plan["mode"])
            for r in records
        ]
        return CSV_COLUMNS, rows
    if kind == "max_violation_grid":
        tasks = []
        index = 0
        for level in plan["levels"]:
            p_dp = level if plan["channel"] == "depolarize" else 0.0
            p_m = level if plan["channel"] == "misidentify" else 0.0
            for theta in plan["thetas"]:
                tasks.append((index, theta, p_dp, p_m, plan["seed"]))
                index += 1
        return CSV_COLUMNS, _run_tasks(_fig2_violation_point, tasks, jobs)
    if kind == "kink_params_grid":
        tasks = []
        index = 0
        for p_m in plan["levels"]:
            for theta in plan["thetas"]:
                tasks.append((index, theta, p_m, plan["seed"]))
                index += 1
        return CSV_COLUMNS_PARAMS, _run_tasks(_fig2_kink_point, tasks, jobs)
    raise ValueError(f"unknown plan kind {kind!r}")


def _csv_text(header: list[str], rows: list[tuple]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _resolve_out(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def cmd_sweep(parser, args) -> int:
    plan = _build_plan(parser, args)
    header, rows = run_plan(plan, jobs=args.jobs)
    text = _csv_text(header, rows)
    out = args.out
    if out is None and args.from_manifest:
        with open(args.from_manifest) as fh:
            out = json.load(fh).get("out")
    if out:
        out = _resolve_out(out)
        os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text)
        manifest = {
            "tool": "discrim3",
            "version": __version__,
            "argv": sys.argv[1:],
            "plan": plan,
            "jobs": args.jobs,
            "out": out,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        with open(out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
        print(out)
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------ threshold


def cmd_threshold(parser, args) -> int:
    result = optimizer.noise_threshold(
        args.channel, seed=args.seed, n_theta=10 if args.coarse else 50
    )
    print_json(
        {
            "channel": result.channel,
            "threshold": result.threshold,
            "bracket": list(result.bracket),
            "theta_at_peak": result.theta_at_peak,
            "degenerate": result.degenerate,
            "seed": args.seed,
            "coarse": bool(args.coarse),
        }
    )
    return 0


# ------------------------------------------------------------- simulate


def cmd_simulate(parser, args) -> int:
    theta = _check_theta(parser, _angle(args.theta, args.degrees))
    if not (0.0 <= args.s <= 1.0):
        parser.error(f"--s must lie in [0, 1], got {args.s}")
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    noise = _noise(parser, args)
    pair = StatePair(theta)
    params = CascadeParams(
        _angle(args.phi1, args.degrees), _angle(args.phi2, args.degrees), args.s
    )
    config = montecarlo.TrialConfig(
        pair=pair,
        params=params,
        noise=noise,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
    )
    tally = montecarlo.simulate(config)
    analytic = cascade.noisy_probabilities(pair, params, noise)
    z_scores = []
    for est, err, ref in zip(tally.estimates, tally.std_errors, analytic.as_tuple()):
        if err > 0:
            z_scores.append((est - ref) / err)
        else:
            z_scores.append(0.0 if abs(est - ref) < 1e-12 else math.inf)
    print_json(
        {
            "theta": theta,
            "phi1": params.phi1,
            "phi2": params.phi2,
            "s": params.s,
            "p_dp": noise.p_dp,
            "p_m": noise.p_m,
            "trials": args.trials,
            "seed": args.seed,
            "workers": args.workers,
            "rng": montecarlo.RNG_ALGORITHM,
            "counts": {
                "correct": tally.n_correct,
                "wrong": tally.n_wrong,
                "decline": tally.n_decline,
            },
            "estimates": {
                "p_c": tally.estimates[0],
                "p_w": tally.estimates[1],
                "p_d": tally.estimates[2],
            },
            "std_errors": list(tally.std_errors),
            "analytic": {
                "p_c": analytic.p_c,
                "p_w": analytic.p_w,
                "p_d": analytic.p_d,
            },
            "z_scores": z_scores,
            "max_abs_z": max(abs(z) for z in z_scores),
        }
    )
    return 0


# ----------------------------------------------------------------- main


def _add_common_angle_flags(sp) -> None:
    sp.add_argument("--degrees", action="store_true", help="interpret angles in degrees")


def _add_noise_flags(sp) -> None:
    sp.add_argument("--p-dp", type=float, default=0.0, help="depolarization probability")
    sp.add_argument("--p-m", type=float, default=0.0, help="readout misidentification probability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discrim3",
        description="Two-state, three-outcome quantum discrimination game toolkit",
    )
    parser.add_argument("--version", action="version", version=f"discrim3 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bound", help="projective bounds at one (theta, k)")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--k", type=float, default=None)
    sp.add_argument("--w", type=float, default=None)
    sp.add_argument("--d", type=float, default=None)
    _add_common_angle_flags(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("optimize", help="minimize the cascade cost at one (theta, k)")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--mode", choices=["absolute", "scaled"], default="absolute")
    sp.add_argument("--seed", type=int, default=0)
    _add_noise_flags(sp)
    _add_common_angle_flags(sp)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("sweep", help="grid sweeps emitting CSV (figure presets or custom)")
    sp.add_argument("--figure", default=None, help="fig1a..fig1h, fig2a..fig2d")
    sp.add_argument("--thetas", default=None, help="comma-separated list (radians)")
    sp.add_argument("--k-grid", default=None, help="start:stop:count")
    sp.add_argument("--mode", choices=["absolute", "scaled"], default="absolute")
    sp.add_argument("--k-points", type=int, default=200, help="k grid size for fig1 presets")
    sp.add_argument("--n-theta", type=int, default=100, help="theta grid size for fig2 presets")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    sp.add_argument("--from-manifest", default=None, help="rerun a sweep from its manifest")
    _add_noise_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("threshold", help="noise level where the violation vanishes")
    sp.add_argument("--channel", choices=["depolarize", "misidentify"], required=True)
    sp.add_argument("--coarse", action="store_true", help="10-point theta grid (faster, looser)")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("simulate", help="Monte Carlo trial-level simulation")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--phi1", type=float, required=True)
    sp.add_argument("--phi2", type=float, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    _add_noise_flags(sp)
    _add_common_angle_flags(sp)
    sp.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(parser, args)


if __name__ == "__main__":
    sys.exit(main())
