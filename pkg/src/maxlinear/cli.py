"""Command line front end.

Subcommands: sample, marma, smith, validate, bench, inspect. All runs
are deterministic given --seed; exit code is zero iff every requested
operation completed (and, for validate, every check passed).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .conditional import conditional_law
from .errors import MaxLinearError
from .experiments import (
    SamplingJob,
    bench_decomposition,
    coverage_experiment,
    projection_bias_experiment,
    run_sampling,
    summary_rows,
    validate_suite,
)
from .margins import standard_frechet
from .marma import (
    load_marma_spec,
    marma_coefficients,
    marma_design,
    marma_truncation_quality,
    simulate_marma_window,
)
from .model import load_model, validate_model
from .sampler import PredictionTask, RngStream, run_prediction
from .smith import load_smith_spec, smith_design


def _load_vector(path: str) -> np.ndarray:
    return np.atleast_1d(np.loadtxt(path, delimiter=",", ndmin=1).astype(float)).ravel()


def _load_matrix(path: str) -> np.ndarray:
    if path.endswith(".json"):
        doc = json.loads(open(path).read())
        return np.asarray(doc["B"] if isinstance(doc, dict) else doc, dtype=float)
    return np.atleast_2d(np.loadtxt(path, delimiter=",", ndmin=2).astype(float))


def _parse_levels(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _print_summary(table) -> None:
    rows = summary_rows(table)
    header = list(rows[0].keys())
    print(",".join(header))
    for row in rows:
        print(",".join(f"{row[k]:.10g}" if k != "coordinate" else str(row[k]) for k in header))


def _emit_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, default=_jsonify)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def cmd_sample(args) -> int:
    model = load_model(args.model)
    x = _load_vector(args.obs)
    job = SamplingJob(
        model=model,
        x=x,
        num_samples=args.num,
        seed=args.seed,
        rel_tol=args.rel_tol,
        quantile_levels=_parse_levels(args.quantiles),
        B=_load_matrix(args.predict) if args.predict else None,
        threshold=args.threshold,
        out_path=args.out,
        emit_z=args.emit_z,
    )
    table, _, _ = run_sampling(job)
    _print_summary(table)
    return 0


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    x = _load_vector(args.obs)
    law = conditional_law(model, x, args.rel_tol)
    structure = law.structure
    doc = {
        "n": model.n,
        "p": model.p,
        "rank": structure.rank,
        "z_hat": structure.z_hat,
        "classes": [c for c in structure.classes],
        "candidate_columns": [j for j in structure.J],
        "class_weights": [w for w in law.weights],
    }
    _emit_json(doc, args.out)
    return 0


def cmd_marma(args) -> int:
    spec = load_marma_spec(args.spec)
    if args.mode == "quality":
        doc = {
            "p": spec.p,
            "psi_sum": float(marma_coefficients(spec.phi, spec.theta, spec.p).sum()),
            "truncation_quality": marma_truncation_quality(spec.phi, spec.theta, spec.p),
        }
    elif args.mode == "coverage":
        doc = coverage_experiment(
            spec, reps=args.reps, num_samples=args.num, seed=args.seed
        )
    elif args.mode == "projection":
        doc = projection_bias_experiment(
            spec, reps=args.reps, num_samples=args.num, seed=args.seed
        )
    else:  # one conditional run on a simulated window
        psi = marma_coefficients(spec.phi, spec.theta, spec.p)
        A, B = marma_design(psi, spec.n_observed, spec.N_horizon)
        gen = RngStream(args.seed, 0).generator()
        _, x_obs, y_true = simulate_marma_window(psi, spec.n_observed, spec.N_horizon, gen)
        task = PredictionTask(
            A=A,
            B=B,
            margins=(standard_frechet(1.0),) * A.shape[1],
            x=x_obs,
            num_samples=args.num,
            seed=args.seed + 1,
        )
        result = run_prediction(task)
        doc = {
            "observed": x_obs,
            "true_future": y_true,
            "future_median": np.median(result.Y, axis=0),
            "future_q95": np.quantile(result.Y, 0.95, axis=0, method="inverted_cdf"),
        }
    _emit_json(doc, args.out)
    return 0


def cmd_smith(args) -> int:
    spec = load_smith_spec(args.spec)
    design = smith_design(spec)
    model = validate_model(
        design.A, [standard_frechet(spec.alpha)] * design.A.shape[1]
    )
    x = _load_vector(args.obs)
    job = SamplingJob(
        model=model,
        x=x,
        num_samples=args.num,
        seed=args.seed,
        rel_tol=args.rel_tol,
        quantile_levels=_parse_levels(args.quantiles),
        B=design.B if design.B.shape[0] else None,
        out_path=args.out,
        emit_z=args.emit_z,
    )
    table, _, _ = run_sampling(job)
    _print_summary(table)
    return 0


def cmd_validate(args) -> int:
    report = validate_suite(seed=args.seed, trials=args.trials, epsilon=args.epsilon)
    _emit_json(report, args.out)
    return 0 if report["passed"] else 1


def cmd_bench(args) -> int:
    cells = bench_decomposition(
        n_list=tuple(int(v) for v in args.n_list.split(",")),
        p_list=tuple(int(v) for v in args.p_list.split(",")),
        draws=args.draws,
        seed=args.seed,
    )
    _emit_json({"cells": cells}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxlinear",
        description="Exact conditional sampling for max-linear factor models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=False, spec=False, obs=False):
        if model:
            p.add_argument("--model", required=True, help="model JSON file")
        if spec:
            p.add_argument("--spec", required=True, help="spec JSON file")
        if obs:
            p.add_argument("--obs", required=True, help="observation CSV (one row)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file")

    p = sub.add_parser("sample", help="draw conditional samples")
    common(p, model=True, obs=True)
    p.add_argument("--num", type=int, default=1000)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--quantiles", default="0.5,0.95")
    p.add_argument("--predict", default=None, help="prediction matrix file")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--emit-z", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("inspect", help="show the conditional decomposition")
    common(p, model=True, obs=True)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("marma", help="time-series prediction experiments")
    common(p, spec=True)
    p.add_argument(
        "--mode", choices=("predict", "coverage", "projection", "quality"),
        default="predict",
    )
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--num", type=int, default=500)
    p.set_defaults(func=cmd_marma)

    p = sub.add_parser("smith", help="spatial-model conditional sampling")
    common(p, spec=True, obs=True)
    p.add_argument("--num", type=int, default=1000)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--quantiles", default="0.5,0.95")
    p.add_argument("--emit-z", action="store_true")
    p.set_defaults(func=cmd_smith)

    p = sub.add_parser("validate", help="run the self-check suite")
    common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="time the decomposition pipeline")
    common(p)
    p.add_argument("--n-list", default="1,5,10,50")
    p.add_argument("--p-list", default="2500,10000")
    p.add_argument("--draws", type=int, default=100)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MaxLinearError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
