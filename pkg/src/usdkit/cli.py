"""Command-line frontend: build bases, sweep theory and experiments, check invariants.

Verbs:

    usdkit build  --dim 3 --theta-deg 33 --out outdir
    usdkit theory --dims 2:14 --theta-grid 5:65:13 --out theory.csv
    usdkit run    --dim 6 --theta-deg 40 --reps 10 --seed 1 --out run.csv
    usdkit run    --dims 2:14 --overlap 0.7071067811865475 --percell-error 0.01 ...
    usdkit check  --dims 2:14

Angles are degrees at this boundary and radians inside.  Sweep output is CSV
(default) or JSON with the fixed column order

    dim, theta_deg, overlap, p_suc_theory, p_inc_theory, mesd_bound,
    mean_total_error, mean_error_sigma, verdict, seed

where theory-only rows leave the experiment columns empty and the aggregate
row of a repeated point leaves the seed column empty.  Identical spec and
seed give byte-identical output files.  Errors print one JSON object on
stderr and exit nonzero.  The default output directory is $USDKIT_OUT_DIR.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, experiment, states, theory
from .errors import UsdError

CSV_COLUMNS = (
    "dim",
    "theta_deg",
    "overlap",
    "p_suc_theory",
    "p_inc_theory",
    "mesd_bound",
    "mean_total_error",
    "mean_error_sigma",
    "verdict",
    "seed",
)

OUT_DIR_ENV = "USDKIT_OUT_DIR"


@dataclass(frozen=True)
class SweepSpec:
    """One reproducible sweep request (the serializable CLI contract)."""

    mode: str
    dims: tuple[int, ...]
    thetas: tuple[float, ...] | None = None
    fixed_overlap: float | None = None
    repetitions: int = 1
    seed: int = 0
    integration_time: float = 30.0
    coincidence_window: float = 25e-9
    max_coincidence_rate: float = 350.0
    spiral_bandwidth_sigma: float = 2.4
    crosstalk_epsilon: float = 0.0
    percell_error: float | None = None
    singles_rate_scale: float = 500.0

    def __post_init__(self):
        if self.mode not in ("theta_sweep", "dimension_sweep", "single_point"):
            raise UsdError(f"unknown sweep mode {self.mode!r}")
        if not self.dims:
            raise UsdError("sweep needs at least one dimension")
        if (self.thetas is None) == (self.fixed_overlap is None):
            raise UsdError("exactly one of thetas / fixed_overlap must be given")
        if self.repetitions < 1:
            raise UsdError("repetitions must be >= 1")


def _point_thetas(spec: SweepSpec, d: int) -> tuple[float, ...]:
    if spec.thetas is not None:
        return spec.thetas
    return (theory.theta_for_overlap(d, spec.fixed_overlap),)


def _config_for(spec: SweepSpec, d: int, th: float, seed: int) -> experiment.ExperimentConfig:
    eps = spec.crosstalk_epsilon
    if spec.percell_error is not None:
        eps = experiment.epsilon_for_percell_error(d, spec.percell_error)
    return experiment.ExperimentConfig(
        dim=d,
        theta=th,
        integration_time=spec.integration_time,
        coincidence_window=spec.coincidence_window,
        max_coincidence_rate=spec.max_coincidence_rate,
        spiral_bandwidth_sigma=spec.spiral_bandwidth_sigma,
        crosstalk_epsilon=eps,
        singles_rate_scale=spec.singles_rate_scale,
        rng_seed=seed,
    )


def _row(point: theory.TheoryPoint, summary: analysis.ErrorSummary | None, seed: int | None) -> dict:
    return {
        "dim": point.dim,
        "theta_deg": math.degrees(point.theta),
        "overlap": point.overlap,
        "p_suc_theory": point.p_suc,
        "p_inc_theory": point.p_inc,
        "mesd_bound": point.mesd_bound,
        "mean_total_error": None if summary is None else summary.mean_total_error,
        "mean_error_sigma": None if summary is None else summary.mean_error_sigma,
        "verdict": None if summary is None else summary.verdict,
        "seed": seed,
    }


def theory_rows(spec: SweepSpec) -> list[dict]:
    """Closed-form rows over the requested (d, theta) grid."""
    rows = []
    for d in spec.dims:
        for th in _point_thetas(spec, d):
            rows.append(_row(theory.theory_point(d, th), None, None))
    return rows


def run_sweep(spec: SweepSpec) -> list[dict]:
    """Simulate and analyze every sweep point; one row per repetition.

    Repetitions use seeds seed, seed+1, ...; when there is more than one, an
    aggregate row follows with the mean of the repetition means, the sample
    standard deviation across repetitions as its sigma, the verdict
    recomputed from those, and an empty seed column.
    """
    rows = []
    for d in spec.dims:
        for th in _point_thetas(spec, d):
            family, basis = states.build_family_and_basis(d, th)
            point = theory.theory_point(d, th)
            summaries = []
            for k in range(spec.repetitions):
                config = _config_for(spec, d, th, spec.seed + k)
                record = experiment.run_experiment(family, basis, config)
                summary = analysis.error_summary(analysis.outcome_table(record))
                summaries.append(summary)
                rows.append(_row(point, summary, config.rng_seed))
            if spec.repetitions > 1:
                means = np.array([s.mean_total_error for s in summaries])
                agg_mean = float(means.mean())
                agg_sigma = float(means.std(ddof=1))
                rows.append(
                    {
                        **_row(point, None, None),
                        "mean_total_error": agg_mean,
                        "mean_error_sigma": agg_sigma,
                        "verdict": analysis.classify(agg_mean, agg_sigma, point.mesd_bound),
                    }
                )
    return rows


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def write_rows(rows: list[dict], path: str | None, fmt: str) -> str:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)
    return text


def _parse_dims(args) -> tuple[int, ...]:
    if args.dims:
        spec = args.dims
        if ":" in spec:
            lo, hi = spec.split(":")
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(part) for part in spec.split(","))
    if args.dim is not None:
        return (int(args.dim),)
    raise UsdError("provide --dim or --dims")


def _parse_theta_grid(spec: str) -> tuple[float, ...]:
    if ":" in spec:
        start, stop, count = spec.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
        return tuple(math.radians(x) for x in grid)
    return tuple(math.radians(float(part)) for part in spec.split(","))


def _resolve_out(args, default_name: str | None = None) -> str | None:
    out = args.out
    base = os.environ.get(OUT_DIR_ENV)
    if out is None:
        if default_name is None or base is None:
            return None
        return os.path.join(base, default_name)
    if base is not None and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _spec_from_args(args, mode: str) -> SweepSpec:
    dims = _parse_dims(args)
    thetas = None
    fixed_overlap = None
    if getattr(args, "theta_grid", None):
        thetas = _parse_theta_grid(args.theta_grid)
    elif getattr(args, "theta_deg", None) is not None:
        thetas = (math.radians(args.theta_deg),)
    elif getattr(args, "overlap", None) is not None:
        fixed_overlap = args.overlap
    else:
        raise UsdError("provide --theta-deg, --theta-grid, or --overlap")
    known = (
        "integration_time",
        "coincidence_window",
        "max_coincidence_rate",
        "spiral_bandwidth_sigma",
        "crosstalk_epsilon",
        "percell_error",
        "singles_rate_scale",
        "seed",
        "repetitions",
    )
    file_defaults = {}
    if getattr(args, "config", None):
        with open(args.config) as handle:
            file_defaults = json.load(handle)
        unknown = sorted(set(file_defaults) - set(known))
        if unknown:
            raise UsdError(f"unknown config keys {unknown}; accepted: {sorted(known)}")
    merged = dict(file_defaults)
    for key in known:
        flag = {
            "crosstalk_epsilon": "epsilon",
            "spiral_bandwidth_sigma": "sigma_spiral",
            "max_coincidence_rate": "max_rate",
            "singles_rate_scale": "singles_rate",
            "repetitions": "reps",
        }.get(key, key)
        value = getattr(args, flag, None)
        if value is not None:
            merged[key] = value
    merged.setdefault("seed", 0)
    merged.setdefault("repetitions", 1)
    return SweepSpec(mode=mode, dims=dims, thetas=thetas, fixed_overlap=fixed_overlap, **merged)


def cmd_build(args) -> int:
    d = int(args.dim)
    th = math.radians(args.theta_deg)
    family, basis = states.build_family_and_basis(d, th)
    mapping = states.oam_map(d)
    outdir = _resolve_out(args, default_name="") or "."
    os.makedirs(outdir, exist_ok=True)
    artifacts = {
        "family.json": states.to_json(family),
        "basis.json": states.to_json(basis),
        "oam_map.json": states.oam_map_to_json(mapping),
    }
    for name, text in artifacts.items():
        with open(os.path.join(outdir, name), "w") as handle:
            handle.write(text + "\n")
    gram = np.asarray(basis.vectors) @ np.asarray(basis.vectors).T
    ortho_residual = float(np.max(np.abs(gram - np.eye(d + 1))))
    detection = experiment.ideal_detection_matrix(family, basis)
    off = ~np.eye(d, dtype=bool)
    zero_error_residual = float(np.max(detection[:, :d][off]))
    print(f"wrote family.json basis.json oam_map.json to {outdir}")
    print(f"orthonormality residual: {ortho_residual:.3e}")
    print(f"zero-error residual: {zero_error_residual:.3e}")
    return 0


def cmd_theory(args) -> int:
    spec = _spec_from_args(args, "theta_sweep" if getattr(args, "theta_grid", None) else "single_point")
    write_rows(theory_rows(spec), _resolve_out(args), args.format)
    return 0


def cmd_run(args) -> int:
    dims = _parse_dims(args)
    if len(dims) > 1:
        mode = "dimension_sweep"
    elif getattr(args, "theta_grid", None):
        mode = "theta_sweep"
    else:
        mode = "single_point"
    spec = _spec_from_args(args, mode)
    write_rows(run_sweep(spec), _resolve_out(args), args.format)
    return 0


def cmd_check(args) -> int:
    dims = _parse_dims(args) if (args.dims or args.dim) else tuple(range(2, 15))
    points = args.theta_points
    worst = {"completeness": 0.0, "zero_error": 0.0, "closure": 0.0, "theory_match": 0.0}
    for d in dims:
        tmax = theory.theta_max(d)
        d_worst = dict.fromkeys(worst, 0.0)
        for k in range(1, points + 1):
            th = k * tmax / points
            family, basis = states.build_family_and_basis(d, th)
            detection = experiment.ideal_detection_matrix(family, basis)
            completeness = basis.completeness_residual()
            off = ~np.eye(d, dtype=bool)
            zero_error = float(np.max(detection[:, :d][off]))
            p_suc, _, p_inc = theory.usd_probabilities(d, th)
            closure = float(np.max(np.abs(np.diag(detection[:, :d]) + detection[:, d] - 1.0)))
            match = max(
                float(np.max(np.abs(np.diag(detection[:, :d]) - p_suc))),
                float(np.max(np.abs(detection[:, d] - p_inc))),
            )
            for key, val in (
                ("completeness", completeness),
                ("zero_error", zero_error),
                ("closure", closure),
                ("theory_match", match),
            ):
                d_worst[key] = max(d_worst[key], val)
                worst[key] = max(worst[key], val)
        print(
            f"d={d:2d}  completeness {d_worst['completeness']:.2e}  "
            f"zero-error {d_worst['zero_error']:.2e}  closure {d_worst['closure']:.2e}  "
            f"theory-match {d_worst['theory_match']:.2e}"
        )
    ok = (
        worst["completeness"] < 1e-10
        and worst["zero_error"] < 1e-20
        and worst["closure"] < 1e-12
        and worst["theory_match"] < 1e-12
    )
    print("all invariants within tolerance" if ok else "INVARIANT VIOLATION")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="usdkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, experiment_flags=True):
        p.add_argument("--dim", type=int, help="single dimension d")
        p.add_argument("--dims", help="comma list '2,3,5' or inclusive range '2:14'")
        p.add_argument("--theta-deg", type=float, dest="theta_deg", help="angle in degrees")
        p.add_argument("--theta-grid", dest="theta_grid", help="'start:stop:count' in degrees or comma list")
        p.add_argument("--overlap", type=float, help="fixed pairwise overlap; theta chosen per dimension")
        p.add_argument("--out", help="output path (files land under $USDKIT_OUT_DIR if relative)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if experiment_flags:
            p.add_argument("--config", help="JSON file of sweep parameters; flags win")
            p.add_argument("--epsilon", type=float, help="depolarizing noise strength")
            p.add_argument("--percell-error", type=float, dest="percell_error",
                           help="calibrate epsilon to this error per wrong conclusive outcome")
            p.add_argument("--sigma-spiral", type=float, dest="sigma_spiral",
                           help="spiral bandwidth envelope width")
            p.add_argument("--singles-rate", type=float, dest="singles_rate",
                           help="background singles rate per arm (Hz)")
            p.add_argument("--max-rate", type=float, dest="max_rate",
                           help="maximal coincidence rate (Hz)")
            p.add_argument("--integration-time", type=float, dest="integration_time",
                           help="integration time per setting (s)")
            p.add_argument("--seed", type=int, help="base RNG seed")
            p.add_argument("--reps", type=int, dest="reps", help="seeded repetitions per point")

    p_build = sub.add_parser("build", help="construct and serialize states, basis, OAM map")
    p_build.add_argument("--dim", type=int, required=True)
    p_build.add_argument("--theta-deg", type=float, dest="theta_deg", required=True)
    p_build.add_argument("--out", help="output directory")
    p_build.set_defaults(func=cmd_build)

    p_theory = sub.add_parser("theory", help="closed-form sweep to CSV/JSON")
    common(p_theory, experiment_flags=False)
    p_theory.set_defaults(func=cmd_theory)

    p_run = sub.add_parser("run", help="simulate, analyze, and classify sweep points")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check", help="run the construction invariant suite")
    p_check.add_argument("--dim", type=int)
    p_check.add_argument("--dims", help="comma list or range; default 2:14")
    p_check.add_argument("--theta-points", type=int, default=12, dest="theta_points")
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsdError, ValueError, OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
