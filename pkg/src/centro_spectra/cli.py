"""Command-line front end: experiments, persistence and plot-data emission.

Commands are deterministic given their flags: every randomized command takes
--seed, and --threads only changes scheduling, never results.  Exit codes:
0 success, 1 validation failure (bad flags or values), 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .eigen import eigenvalues_centrosymmetric, eigenvalues_dense, spectrum_to_json
from .harness import (
    CircularLawReport,
    CovarianceKernelReport,
    RunConfig,
    TestPolynomial,
    TrialBatch,
    predicted_sigma2,
    run_circular_law_experiment,
    run_clt_experiment,
    run_covariance_kernel_experiment,
)
from .linalg import counter_identity
from .moments import McEstimate, MomentQuery, moment_result
from .reduction import block_reduce, verify_reduction
from .sampling import (
    STANDARD_COMPLEX_GAUSSIAN,
    EntryDistribution,
    SeedStream,
    matrix_to_json,
    moment_self_test,
    sample_centrosymmetric,
)

__all__ = ["config_from_json_dict", "config_to_json_dict", "emit_plot_data", "main", "parse_and_dispatch"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _complex_key(z: complex) -> str:
    return f"{float(z.real)!r},{float(z.imag)!r}"


def _parse_contour(text: str) -> tuple:
    points = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        re_s, im_s = part.split(",")
        points.append(complex(float(re_s), float(im_s)))
    if not points:
        raise ValueError(f"no contour points in {text!r}")
    return tuple(points)


def config_to_json_dict(config: RunConfig) -> dict:
    return {
        "n": config.n,
        "trials": config.trials,
        "master_seed": config.master_seed,
        "dist": config.dist.kind,
        "poly": None if config.poly is None else [_pair(a) for a in config.poly.coeffs],
        "contour_points": [_pair(z) for z in config.contour_points],
        "rho": config.rho,
        "tau": config.tau,
        "threads": config.threads,
    }


def config_from_json_dict(obj: dict) -> RunConfig:
    poly = obj.get("poly")
    return RunConfig(
        n=int(obj["n"]),
        trials=int(obj["trials"]),
        master_seed=int(obj["master_seed"]),
        dist=EntryDistribution(kind=obj.get("dist", "standard_complex_gaussian")),
        poly=None if poly is None else TestPolynomial(
            coeffs=tuple(complex(re, im) for re, im in poly)
        ),
        contour_points=tuple(complex(re, im) for re, im in obj.get("contour_points", [])),
        rho=float(obj.get("rho", 2.2)),
        tau=float(obj.get("tau", 0.5)),
        threads=obj.get("threads"),
    )


def _summary_dict(batch: TrialBatch) -> dict:
    s = batch.summaries
    summaries = None
    if s is not None:
        summaries = {
            "mean": _pair(s.mean),
            "variance_real": s.variance_real,
            "variance_modulus": s.variance_modulus,
            "skewness": s.skewness,
            "excess_kurtosis": s.excess_kurtosis,
            "ks_statistic": s.ks_statistic,
            "predicted_sigma2": s.predicted_sigma2,
        }
    return {
        "config": config_to_json_dict(batch.config),
        "summaries": summaries,
        "guard_rejections": batch.guard_rejections,
    }


def write_trial_jsonl(batch: TrialBatch, path: str):
    """One record per trial: {trial_index, seed, les, spectral_radius, resolvent}."""
    with open(path, "w") as fh:
        for r in batch.records:
            record = {
                "trial_index": r.trial_index,
                "seed": r.stream_index,
                "les": None if r.les is None else _pair(r.les),
                "spectral_radius": r.spectral_radius,
                "resolvent": {_complex_key(z): _pair(v) for z, v in r.resolvent.items()},
            }
            fh.write(json.dumps(record) + "\n")


def _jsonl_path_for(out: str) -> str:
    root, ext = os.path.splitext(out)
    return root + ".jsonl" if ext != ".jsonl" else root + ".trials.jsonl"


def emit_plot_data(batch, kind: str, path: str, bins: int = 30):
    """CSV plot data: eigenvalue scatter, or a centered-LES histogram.

    kind="scatter" expects a circular-law report; kind="histogram" expects
    a trial batch and writes two series (raw L-centered and L-centered
    divided by sqrt(n)) with their Gaussian overlay parameters in the
    header comments.
    """
    if kind == "scatter":
        if not isinstance(batch, CircularLawReport):
            raise ValueError("scatter plot data needs a circular-law report")
        with open(path, "w") as fh:
            fh.write("re,im\n")
            for sample in batch.samples:
                for z in sample.spectrum.eigenvalues:
                    fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        return
    if kind != "histogram":
        raise ValueError(f"unknown plot kind {kind!r}")
    if not isinstance(batch, TrialBatch):
        raise ValueError("histogram plot data needs a trial batch")
    values = batch.les_values
    if len(values) == 0:
        raise ValueError("no accepted trials to histogram")
    centered = (values - values.mean()).real
    sigma2 = predicted_sigma2(batch.config.poly)
    n = batch.config.n
    series = [
        ("les_centered", centered, sigma2),
        ("les_centered_over_sqrt_n", centered / np.sqrt(n), sigma2 / n),
    ]
    with open(path, "w") as fh:
        for name, _, overlay in series:
            fh.write(f"# series={name} overlay_mean=0.0 overlay_sigma2={overlay!r}\n")
        fh.write("series,bin_left,bin_right,count\n")
        for name, data, _ in series:
            counts, edges = np.histogram(data, bins=bins)
            for i, c in enumerate(counts):
                fh.write(f"{name},{float(edges[i])!r},{float(edges[i + 1])!r},{int(c)}\n")


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _matrix_entries(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in m]


# ---------------------------------------------------------------- handlers


def _cmd_sample(args) -> int:
    cm = sample_centrosymmetric(
        args.n, STANDARD_COMPLEX_GAUSSIAN, SeedStream(args.seed, args.stream)
    )
    _write_output(matrix_to_json(cm), args.out)
    return 0


def _cmd_reduce(args) -> int:
    cm = sample_centrosymmetric(
        args.n, STANDARD_COMPLEX_GAUSSIAN, SeedStream(args.seed, args.stream)
    )
    red = block_reduce(cm)
    residual = verify_reduction(cm, red)
    payload = {
        "n": cm.n,
        "seed": cm.seed,
        "parity": red.parity,
        "t1": _matrix_entries(red.t1),
        "t2": _matrix_entries(red.t2),
        "residual": residual,
    }
    _write_output(json.dumps(payload), args.out)
    return 0


def _cmd_spectrum(args) -> int:
    cm = sample_centrosymmetric(
        args.n, STANDARD_COMPLEX_GAUSSIAN, SeedStream(args.seed, args.stream)
    )
    if args.method == "dense":
        spec = eigenvalues_dense(cm.matrix)
    else:
        spec = eigenvalues_centrosymmetric(cm)
    _write_output(spectrum_to_json(spec), args.out)
    return 0


def _cmd_circular_law(args) -> int:
    config = RunConfig(n=args.n, trials=args.trials, master_seed=args.seed)
    report = run_circular_law_experiment(config)
    if args.format == "csv":
        if args.out is None:
            raise ValueError("--format csv needs --out")
        emit_plot_data(report, "scatter", args.out)
        return 0
    payload = {
        "config": config_to_json_dict(config),
        "samples": [
            {
                "seed": s.stream_index,
                "radial_ks": s.radial_ks,
                "angular_chi2": s.angular_chi2,
                "angular_pvalue": s.angular_pvalue,
                "outlier_fraction": s.outlier_fraction,
                "spectral_radius": s.spectral_radius,
            }
            for s in report.samples
        ],
    }
    _write_output(json.dumps(payload), args.out)
    return 0


def _cmd_clt(args) -> int:
    if args.poly is None:
        raise ValueError("clt needs --poly")
    config = RunConfig(
        n=args.n,
        trials=args.trials,
        master_seed=args.seed,
        poly=TestPolynomial.from_string(args.poly),
        rho=args.rho,
        tau=args.tau,
        threads=args.threads,
    )
    batch = run_clt_experiment(config)
    if args.format == "csv":
        if args.out is None:
            raise ValueError("--format csv needs --out")
        emit_plot_data(batch, "histogram", args.out, bins=args.bins)
        return 0
    _write_output(json.dumps(_summary_dict(batch)), args.out)
    if args.out is not None:
        write_trial_jsonl(batch, _jsonl_path_for(args.out))
    return 0


def _cmd_moments(args) -> int:
    query = MomentQuery(n=args.n, k=args.k, l=args.l)
    result = moment_result(
        query,
        mc_trials=args.mc_trials,
        stream=SeedStream(args.seed, 0),
    )
    exact = result.exact_value
    mc: McEstimate | None = result.mc_estimate
    payload = {
        "n": args.n,
        "k": args.k,
        "l": args.l,
        "exact": [exact.numerator, exact.denominator],
        "mc": None
        if mc is None
        else {"mean": _pair(mc.mean), "se": mc.se, "trials": mc.trials},
        "prediction": result.asymptotic_prediction,
    }
    text = json.dumps(payload)
    if args.out is None:
        print(f"exact {exact.numerator}/{exact.denominator}")
        print(text)
    else:
        print(f"exact {exact.numerator}/{exact.denominator}")
        _write_output(text, args.out)
    return 0


def _cmd_resolvent_cov(args) -> int:
    if args.contour is None:
        raise ValueError("resolvent-cov needs --contour")
    config = RunConfig(
        n=args.n,
        trials=args.trials,
        master_seed=args.seed,
        contour_points=_parse_contour(args.contour),
        rho=args.rho,
        tau=args.tau,
        threads=args.threads,
    )
    report = run_covariance_kernel_experiment(config)
    payload = {
        "config": config_to_json_dict(config),
        "pairs": [
            {
                "z": _pair(p.z),
                "eta": _pair(p.eta),
                "empirical": _pair(p.empirical),
                "predicted": _pair(p.predicted),
            }
            for p in report.pairs
        ],
        "guard_rejections": report.guard_rejections,
    }
    _write_output(json.dumps(payload), args.out)
    if args.out is not None:
        write_trial_jsonl(report.batch, _jsonl_path_for(args.out))
    return 0


def _cmd_self_test(args) -> int:
    failures = []

    report = moment_self_test(
        STANDARD_COMPLEX_GAUSSIAN, args.draws, SeedStream(args.seed, 0)
    )
    print(
        f"entry moments: E[x]={report.mean:.2e} E[x^2]={report.second_moment:.2e} "
        f"E[|x|^2]={report.abs_second_moment:.6f} -> {'ok' if report.ok else 'FAIL'}"
    )
    if not report.ok:
        failures.append("entry moments")

    j = counter_identity(9)
    if np.abs(j @ j - np.eye(9)).max() > 1e-14 or np.abs(j - j.T).max() > 0:
        failures.append("counter identity")
    print("counter identity J^2=I, J=J^T:", "ok" if "counter identity" not in failures else "FAIL")

    for n in (8, 9):
        cm = sample_centrosymmetric(n, STANDARD_COMPLEX_GAUSSIAN, SeedStream(args.seed, n))
        residual = verify_reduction(cm, block_reduce(cm))
        print(f"reduction residual n={n}: {residual:.2e}")
        if residual > 1e-12:
            failures.append(f"reduction n={n}")

    if failures:
        print("self-test FAILED:", ", ".join(failures))
        return 2
    print("self-test passed")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(p, trials_default=None):
    p.add_argument("--n", type=int, required=True, help="matrix size")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    if trials_default is not None:
        p.add_argument("--trials", type=int, default=trials_default)
    p.add_argument("--out", type=str, default=None, help="output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="centro-spectra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="dump one sampled matrix as JSON")
    _add_common(p)
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("reduce", help="sample, block-reduce and verify")
    _add_common(p)
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(handler=_cmd_reduce)

    p = sub.add_parser("spectrum", help="eigenvalues of one sampled matrix")
    _add_common(p)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--method", choices=("blocks", "dense"), default="blocks")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("circular-law", help="ESD checks against the disc law")
    _add_common(p, trials_default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_circular_law)

    p = sub.add_parser("clt", help="centered-LES fluctuation experiment")
    _add_common(p, trials_default=400)
    p.add_argument("--poly", type=str, default=None, help="a_1,...,a_d (no constant term)")
    p.add_argument("--rho", type=float, default=2.2)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_clt)

    p = sub.add_parser("moments", help="exact/MC trace moments")
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--mc-trials", type=int, default=None)
    p.set_defaults(handler=_cmd_moments)

    p = sub.add_parser("resolvent-cov", help="resolvent-trace covariance kernel")
    _add_common(p, trials_default=500)
    p.add_argument("--contour", type=str, default=None, help='"re,im;re,im;..."')
    p.add_argument("--rho", type=float, default=2.2)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(handler=_cmd_resolvent_cov)

    p = sub.add_parser("self-test", help="entry-law and reduction sanity checks")
    p.add_argument("--draws", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_self_test)

    return parser


def parse_and_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return int(args.handler(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
