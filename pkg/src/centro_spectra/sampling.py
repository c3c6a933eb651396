"""Sampling of random centrosymmetric matrices with reproducible streams.

An n-by-n centrosymmetric matrix satisfies m[i, j] == m[n+1-i, n+1-j]
(1-based), i.e. it is symmetric about its center.  Only ceil(n^2/2) entries
are free; the rest are mirror copies.  Free entries are drawn i.i.d. from the
standard circular complex Gaussian and the whole matrix is scaled by
1/sqrt(n), so every entry has mean zero and variance 1/n.

Randomness is counter-based (Philox keyed by (master_seed, stream_index)),
so distinct trials get independent substreams and any parallel schedule
reproduces the sequential results bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_complex_matrix

__all__ = [
    "CentrosymmetricMatrix",
    "EntryDistribution",
    "MomentSelfTest",
    "STANDARD_COMPLEX_GAUSSIAN",
    "SeedStream",
    "is_centrosymmetric",
    "matrix_from_json",
    "matrix_to_json",
    "moment_self_test",
    "sample_centrosymmetric",
]

_MAX_UINT64 = 2**64


@dataclass(frozen=True)
class EntryDistribution:
    """Law of the raw (unscaled) entries.

    Only the standard circular complex Gaussian is implemented: real and
    imaginary parts independent N(0, 1/2), giving E[x]=0, E[x^2]=0,
    E[|x|^2]=1.  The ``kind`` field is the extension point.
    """

    kind: str = "standard_complex_gaussian"
    descriptor: str = "Re, Im independent N(0, 1/2)"

    def __post_init__(self):
        if self.kind != "standard_complex_gaussian":
            raise ValueError(f"unsupported entry distribution: {self.kind!r}")

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        raw = rng.standard_normal(2 * count) * np.sqrt(0.5)
        return raw[0::2] + 1j * raw[1::2]


STANDARD_COMPLEX_GAUSSIAN = EntryDistribution()


@dataclass(frozen=True)
class SeedStream:
    """One substream of a counter-based RNG family.

    Same (master_seed, stream_index) reproduces the same draws on any thread
    schedule; distinct stream indices give statistically independent streams.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= int(v) < _MAX_UINT64:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=[self.master_seed, self.stream_index])
        )

    def child(self, offset: int) -> "SeedStream":
        """Substream at stream_index + offset (per-trial streams)."""
        return SeedStream(self.master_seed, self.stream_index + offset)


@dataclass(frozen=True)
class CentrosymmetricMatrix:
    """A sampled matrix together with its provenance."""

    matrix: np.ndarray
    n: int
    seed: int
    stream_index: int
    dist: EntryDistribution

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, require_square=True)
        object.__setattr__(self, "matrix", m)
        if m.shape[0] != self.n:
            raise ValueError(f"matrix shape {m.shape} does not match n={self.n}")
        if not is_centrosymmetric(m, tol=0.0):
            raise ValueError("matrix is not centrosymmetric")


def _free_position_mask(n: int) -> np.ndarray:
    """(i, j) is free iff it is lexicographically <= its mirror (1-based)."""
    i = np.arange(1, n + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    mi = n + 1 - i
    mj = n + 1 - j
    return (i < mi) | ((i == mi) & (j <= mj))


def sample_centrosymmetric(
    n: int,
    dist: EntryDistribution = STANDARD_COMPLEX_GAUSSIAN,
    stream: SeedStream = SeedStream(0, 0),
) -> CentrosymmetricMatrix:
    """Draw one n-by-n random centrosymmetric matrix.

    Exactly ceil(n^2/2) raw entries are drawn, filled row-major over the
    free positions, mirrored bit-identically to (n+1-i, n+1-j), and scaled
    by 1/sqrt(n).  For odd n the center entry is its own mirror and is
    drawn once.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = stream.generator()
    n_free = (n * n + 1) // 2
    raw = dist.draw(n_free, rng)

    mask = _free_position_mask(n)
    x = np.zeros((n, n), dtype=np.complex128)
    x.ravel()[np.flatnonzero(mask.ravel())] = raw
    # Mirror copies reuse the very same float bits, so the symmetry holds
    # exactly, not just to rounding.
    m = np.where(mask, x, np.flip(x, (0, 1))) / np.sqrt(n)
    return CentrosymmetricMatrix(
        matrix=m, n=n, seed=stream.master_seed, stream_index=stream.stream_index, dist=dist
    )


def is_centrosymmetric(m, tol: float = 0.0) -> bool:
    """True iff max |m[i,j] - m[n+1-i,n+1-j]| <= tol."""
    m = as_complex_matrix(m, require_square=True)
    return bool(np.abs(m - np.flip(m, (0, 1))).max() <= tol)


@dataclass(frozen=True)
class MomentSelfTest:
    """Empirical first/second moments of the entry law with flags at 5 SE."""

    draws: int
    mean: complex
    mean_se: float
    second_moment: complex
    second_moment_se: float
    abs_second_moment: float
    abs_second_moment_se: float
    ok: bool = field(init=False)

    def __post_init__(self):
        ok = (
            abs(self.mean) <= 5 * self.mean_se
            and abs(self.second_moment) <= 5 * self.second_moment_se
            and abs(self.abs_second_moment - 1.0) <= 5 * self.abs_second_moment_se
        )
        object.__setattr__(self, "ok", ok)


def moment_self_test(
    dist: EntryDistribution, draws: int, stream: SeedStream
) -> MomentSelfTest:
    """Check E[x]=0, E[x^2]=0, E[|x|^2]=1 empirically.

    Standard errors are empirical, so the check does not assume the law it
    is verifying.
    """
    if draws < 10**4:
        raise ValueError(f"need at least 10^4 draws, got {draws}")
    x = dist.draw(draws, stream.generator())

    def _mean_se(samples):
        mu = samples.mean()
        se = float(np.sqrt((np.abs(samples - mu) ** 2).mean() / draws))
        return mu, se

    mean, mean_se = _mean_se(x)
    second, second_se = _mean_se(x * x)
    abs_second, abs_second_se = _mean_se(np.abs(x) ** 2)
    return MomentSelfTest(
        draws=draws,
        mean=complex(mean),
        mean_se=mean_se,
        second_moment=complex(second),
        second_moment_se=second_se,
        abs_second_moment=float(abs_second.real),
        abs_second_moment_se=abs_second_se,
    )


def matrix_to_json(cm: CentrosymmetricMatrix) -> str:
    """Dump format: {n, seed, dist, entries: [[re, im], ...] row-major}."""
    entries = [[float(z.real), float(z.imag)] for z in cm.matrix.ravel()]
    return json.dumps(
        {"n": cm.n, "seed": cm.seed, "dist": cm.dist.kind, "entries": entries}
    )


def matrix_from_json(text: str) -> CentrosymmetricMatrix:
    obj = json.loads(text)
    n = int(obj["n"])
    entries = np.array(
        [complex(re, im) for re, im in obj["entries"]], dtype=np.complex128
    ).reshape(n, n)
    return CentrosymmetricMatrix(
        matrix=entries,
        n=n,
        seed=int(obj["seed"]),
        stream_index=0,
        dist=EntryDistribution(kind=obj["dist"]),
    )
