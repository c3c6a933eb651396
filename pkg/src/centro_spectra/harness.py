"""Monte Carlo experiments on the centrosymmetric ensemble.

Three experiments share one trial engine (sample -> block eigensolver ->
statistics), each trial on its own seed substream so runs are reproducible
for any thread count:

* circular law: eigenvalue cloud of one (or a few) large samples against
  the uniform law on the unit disc (radial KS, angular chi-square, outlier
  fraction);
* CLT for linear eigenvalue statistics: the centered statistic
  L(P) = sum_i P(lambda_i) against a centered Gaussian whose variance is
  the closed form sum_k 2 k |a_k|^2;
* resolvent-trace covariance: empirical Cov(Tr R_z, conj Tr R_eta) against
  the kernel 2 (1 - z conj(eta))^-2 for contour points outside the disc.

Trials whose spectral radius exceeds the norm guard ``rho`` are rejected
and counted, never silently dropped.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps

from .eigen import eigenvalues_centrosymmetric, spectral_radius
from .linalg import Spectrum, as_complex_matrix
from .sampling import STANDARD_COMPLEX_GAUSSIAN, EntryDistribution, SeedStream, sample_centrosymmetric

__all__ = [
    "CircularLawReport",
    "CircularLawSample",
    "CovarianceKernelReport",
    "KernelPair",
    "RunConfig",
    "SummaryStats",
    "TestPolynomial",
    "TrialBatch",
    "TrialRecord",
    "angular_chisquare",
    "covariance_kernel",
    "les",
    "predicted_sigma2",
    "radial_ks_statistic",
    "resolvent_series_gap",
    "resolvent_trace",
    "run_circular_law_experiment",
    "run_clt_experiment",
    "run_covariance_kernel_experiment",
]

THREADS_ENV_VAR = "CENTRO_SPECTRA_THREADS"


@dataclass(frozen=True)
class TestPolynomial:
    """P(z) = a_1 z + ... + a_d z^d; the constant term is excluded because
    centering removes it from every linear eigenvalue statistic."""

    coeffs: tuple  # a_1 .. a_d

    def __post_init__(self):
        coeffs = tuple(complex(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 1:
            raise ValueError("polynomial needs degree >= 1 (no constant-only P)")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient a_d must be nonzero")
        if not all(np.isfinite([a.real, a.imag]).all() for a in coeffs):
            raise ValueError("coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_string(cls, text: str) -> "TestPolynomial":
        """Parse 'a_1,a_2,...,a_d' (real coefficients)."""
        parts = [p.strip() for p in text.split(",") if p.strip() != ""]
        if not parts:
            raise ValueError(f"cannot parse polynomial from {text!r}")
        return cls(coeffs=tuple(float(p) for p in parts))

    def evaluate(self, z):
        """Horner evaluation, vectorized over z."""
        z = np.asarray(z, dtype=np.complex128)
        acc = np.zeros_like(z)
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc * z


def predicted_sigma2(poly: TestPolynomial) -> float:
    """Limiting variance of the centered LES: sum_k 2 k |a_k|^2.

    For real coefficients this is the closed form sum 2 k a_k^2; the
    modulus-squared version is what the integral form of the variance
    yields for complex coefficients.
    """
    return float(sum(2.0 * k * abs(a) ** 2 for k, a in enumerate(poly.coeffs, start=1)))


def les(spec: Spectrum, poly: TestPolynomial) -> complex:
    """Linear eigenvalue statistic L(P) = sum_i P(lambda_i)."""
    return complex(poly.evaluate(spec.eigenvalues).sum())


def resolvent_trace(spec: Spectrum, z: complex) -> complex:
    """Tr R_z = sum_i 1 / (z - lambda_i); requires z away from the spectrum."""
    z = complex(z)
    gaps = np.abs(z - spec.eigenvalues)
    if len(gaps) and gaps.min() <= 1e-9:
        raise ValueError(f"z={z} is within 1e-9 of an eigenvalue")
    return complex((1.0 / (z - spec.eigenvalues)).sum())


def covariance_kernel(z: complex, eta: complex) -> complex:
    """Limiting covariance of (Tr R_z, conj Tr R_eta): 2 (1 - z conj(eta))^-2."""
    return 2.0 / (1.0 - complex(z) * np.conj(complex(eta))) ** 2


def resolvent_series_gap(matrix, spec: Spectrum, z: complex, terms: int = 8) -> float:
    """|Tr R_z - n/z - sum_{k<=terms} z^{-k-1} Tr M^k|.

    Internal consistency check between the eigenvalue route and the
    truncated power-series route; small whenever |z| comfortably exceeds
    the spectral radius.
    """
    m = as_complex_matrix(matrix, require_square=True)
    z = complex(z)
    n = m.shape[0]
    series = n / z
    power = np.eye(n, dtype=np.complex128)
    for k in range(1, terms + 1):
        power = power @ m
        series += z ** (-k - 1) * np.trace(power)
    return float(abs(resolvent_trace(spec, z) - series))


@dataclass(frozen=True)
class RunConfig:
    """One experiment configuration; everything needed for reproduction."""

    n: int
    trials: int
    master_seed: int
    dist: EntryDistribution = STANDARD_COMPLEX_GAUSSIAN
    poly: TestPolynomial | None = None
    contour_points: tuple = ()
    rho: float = 2.2
    tau: float = 0.5
    threads: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be >= 1 when given")
        points = tuple(complex(z) for z in self.contour_points)
        object.__setattr__(self, "contour_points", points)
        for z in points:
            if abs(z) <= 1.2:
                raise ValueError(f"contour point {z} must satisfy |z| > 1.2")


@dataclass(frozen=True)
class SummaryStats:
    """Cross-trial summary of the centered LES samples.

    ``variance_modulus`` is the sample mean of |L - mean|^2 (the complex
    variance the limit theorem predicts); ``variance_real`` is the variance
    of the real part, which is half of it for a circular limit.  Shape
    statistics and the KS distance are computed on the real part against
    N(0, predicted_sigma2 / 2).
    """

    mean: complex
    variance_real: float
    variance_modulus: float
    skewness: float
    excess_kurtosis: float
    ks_statistic: float
    predicted_sigma2: float


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    stream_index: int
    spectral_radius: float
    accepted: bool
    les: complex | None = None
    resolvent: dict = field(default_factory=dict)  # contour point -> Tr R_z


@dataclass(frozen=True)
class TrialBatch:
    config: RunConfig
    records: tuple
    guard_rejections: int
    summaries: SummaryStats | None = None

    @property
    def accepted_records(self) -> tuple:
        return tuple(r for r in self.records if r.accepted)

    @property
    def les_values(self) -> np.ndarray:
        return np.array(
            [r.les for r in self.records if r.accepted], dtype=np.complex128
        )

    def resolvent_values(self, z: complex) -> np.ndarray:
        z = complex(z)
        return np.array(
            [r.resolvent[z] for r in self.records if r.accepted], dtype=np.complex128
        )


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_trials(config: RunConfig, evaluate_les: bool) -> TrialBatch:
    """Run all trials; aggregation is a deterministic fold in trial order."""
    contour = config.contour_points
    min_abs_z = min((abs(z) for z in contour), default=None)

    def one_trial(t: int) -> TrialRecord:
        stream = SeedStream(config.master_seed, t)
        try:
            cm = sample_centrosymmetric(config.n, config.dist, stream)
            spec = eigenvalues_centrosymmetric(cm)
        except Exception as exc:
            raise RuntimeError(f"trial {t} failed: {exc}") from exc
        radius = spectral_radius(spec)
        accepted = radius <= config.rho
        if accepted and min_abs_z is not None:
            # Resolvents stay well conditioned only with a margin between
            # the contour and the spectrum.
            accepted = 1.2 * radius <= min_abs_z and min_abs_z - radius >= config.tau
        les_value = None
        resolvent: dict = {}
        if accepted:
            if evaluate_les:
                les_value = les(spec, config.poly)
            resolvent = {z: resolvent_trace(spec, z) for z in contour}
        return TrialRecord(
            trial_index=t,
            stream_index=stream.stream_index,
            spectral_radius=radius,
            accepted=accepted,
            les=les_value,
            resolvent=resolvent,
        )

    n_threads = _resolve_threads(config.threads)
    if n_threads == 1 or config.trials == 1:
        records = [one_trial(t) for t in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            records = list(pool.map(one_trial, range(config.trials)))
    rejections = sum(1 for r in records if not r.accepted)
    return TrialBatch(
        config=config, records=tuple(records), guard_rejections=rejections
    )


def _summarize(values: np.ndarray, poly: TestPolynomial) -> SummaryStats:
    pred = predicted_sigma2(poly)
    mean = values.mean()
    centered = values - mean
    t = len(values)
    variance_modulus = float((np.abs(centered) ** 2).sum() / (t - 1))
    variance_real = float(np.var(centered.real, ddof=1))
    real = centered.real
    ks = sps.kstest(real, "norm", args=(0.0, np.sqrt(pred / 2.0))).statistic
    return SummaryStats(
        mean=complex(mean),
        variance_real=variance_real,
        variance_modulus=variance_modulus,
        skewness=float(sps.skew(real)),
        excess_kurtosis=float(sps.kurtosis(real)),
        ks_statistic=float(ks),
        predicted_sigma2=pred,
    )


def run_clt_experiment(config: RunConfig) -> TrialBatch:
    """Centered-LES fluctuation experiment.

    Each trial samples a matrix, takes eigenvalues through the block path
    and evaluates L(P).  Centering uses the empirical mean across accepted
    trials (a consistent stand-in for the unknown finite-n expectation).
    """
    if config.poly is None:
        raise ValueError("run_clt_experiment needs config.poly")
    if config.trials < 2:
        raise ValueError("need at least 2 trials to estimate a variance")
    batch = _run_trials(config, evaluate_les=True)
    values = batch.les_values
    if len(values) == 0:
        raise RuntimeError("all trials rejected by the norm guard")
    summaries = _summarize(values, config.poly) if len(values) >= 2 else None
    return replace(batch, summaries=summaries)


def radial_ks_statistic(radii: np.ndarray) -> float:
    """KS distance of |lambda| samples to the circular-law radial CDF r^2."""
    r = np.sort(np.asarray(radii, dtype=np.float64))
    n = len(r)
    if n == 0:
        raise ValueError("empty radius sample")
    cdf = np.minimum(r * r, 1.0)
    i = np.arange(1, n + 1)
    return float(max(np.abs(i / n - cdf).max(), np.abs((i - 1) / n - cdf).max()))


def angular_chisquare(angles: np.ndarray, sectors: int = 16) -> tuple[float, float]:
    """Chi-square uniformity test of arg(lambda) over equal sectors."""
    # fold exactly-pi angles into [-pi, pi) so no sample falls off the grid
    folded = np.mod(np.asarray(angles, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    counts, _ = np.histogram(folded, bins=sectors, range=(-np.pi, np.pi))
    expected = len(folded) / sectors
    stat = float(((counts - expected) ** 2 / expected).sum())
    pvalue = float(sps.chi2.sf(stat, df=sectors - 1))
    return stat, pvalue


@dataclass(frozen=True)
class CircularLawSample:
    stream_index: int
    spectrum: Spectrum
    radial_ks: float
    angular_chi2: float
    angular_pvalue: float
    outlier_fraction: float  # fraction of |lambda| > 1.05
    spectral_radius: float


@dataclass(frozen=True)
class CircularLawReport:
    config: RunConfig
    samples: tuple


def run_circular_law_experiment(config: RunConfig) -> CircularLawReport:
    """Empirical spectral distribution against the uniform disc law.

    Uses config.trials samples (typically one); n must be large enough for
    the ESD to have converged to desk-scale tolerances.
    """
    if config.n < 200:
        raise ValueError("circular-law experiment needs n >= 200")
    samples = []
    for t in range(config.trials):
        stream = SeedStream(config.master_seed, t)
        cm = sample_centrosymmetric(config.n, config.dist, stream)
        spec = eigenvalues_centrosymmetric(cm)
        lam = spec.eigenvalues
        stat, pvalue = angular_chisquare(np.angle(lam))
        samples.append(
            CircularLawSample(
                stream_index=t,
                spectrum=spec,
                radial_ks=radial_ks_statistic(np.abs(lam)),
                angular_chi2=stat,
                angular_pvalue=pvalue,
                outlier_fraction=float((np.abs(lam) > 1.05).mean()),
                spectral_radius=spectral_radius(spec),
            )
        )
    return CircularLawReport(config=config, samples=tuple(samples))


@dataclass(frozen=True)
class KernelPair:
    z: complex
    eta: complex
    empirical: complex
    predicted: complex


@dataclass(frozen=True)
class CovarianceKernelReport:
    config: RunConfig
    pairs: tuple
    batch: TrialBatch

    @property
    def guard_rejections(self) -> int:
        return self.batch.guard_rejections


def run_covariance_kernel_experiment(config: RunConfig) -> CovarianceKernelReport:
    """Empirical Cov(Tr R_z, conj Tr R_eta) against the limiting kernel.

    Covariances are estimated over accepted trials after centering each
    contour point's trace samples by their empirical mean.
    """
    if not config.contour_points:
        raise ValueError("run_covariance_kernel_experiment needs contour points")
    if config.trials < 2:
        raise ValueError("need at least 2 trials to estimate a covariance")
    batch = _run_trials(config, evaluate_les=config.poly is not None)
    accepted = batch.accepted_records
    if len(accepted) < 2:
        raise RuntimeError("fewer than 2 trials survived the norm guard")
    centered = {}
    for z in config.contour_points:
        values = batch.resolvent_values(z)
        centered[z] = values - values.mean()
    t = len(accepted)
    pairs = []
    for z in config.contour_points:
        for eta in config.contour_points:
            emp = complex((centered[z] * np.conj(centered[eta])).sum() / (t - 1))
            pairs.append(
                KernelPair(z=z, eta=eta, empirical=emp, predicted=covariance_kernel(z, eta))
            )
    return CovarianceKernelReport(config=config, pairs=tuple(pairs), batch=batch)
