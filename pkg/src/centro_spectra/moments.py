"""Exact and simulated trace moments E[Tr M^k Tr conj(M)^l] for the ensemble.

Entries of the (unscaled) matrix are standard circular complex Gaussians
tied together by the center-symmetry pairing (i, j) <-> (n+1-i, n+1-j).
That makes mixed trace moments exactly computable in two independent ways:

* enumeration: walk every index tuple of the two trace chains, resolve each
  factor to its free variable through the pairing, and apply the circular
  Gaussian moment rule E[u^p conj(u)^q] = 0 if p != q else p!;
* pairing count: expand the expectation over Wick matchings between
  unconjugated and conjugated factors; each matching contributes the number
  of index assignments compatible with its equality/mirror constraints,
  counted exactly with a parity union-find.

Both paths return exact rationals and must agree wherever both run; the
Monte Carlo estimator cross-checks them statistically.  Values are already
scaled by n^{-(k+l)/2}, matching traces of the 1/sqrt(n)-scaled matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import factorial

import numpy as np

from .sampling import STANDARD_COMPLEX_GAUSSIAN, EntryDistribution, SeedStream, _free_position_mask

__all__ = [
    "ENUMERATION_BUDGET",
    "BudgetExceededError",
    "McEstimate",
    "MomentQuery",
    "MomentResult",
    "asymptotic_prediction",
    "exact_mixed_trace_moment",
    "exact_single_trace_moment",
    "mc_trace_moment",
    "moment_result",
]

ENUMERATION_BUDGET = 10**8          # index tuples
_MATCHING_BUDGET = 2 * 10**6        # k! * 3^k constraint systems
_MC_CHUNK = 4096                    # trials drawn per substream


class BudgetExceededError(ValueError):
    pass


@dataclass(frozen=True)
class MomentQuery:
    """E[Tr(M^k) Tr(conj(M)^l)] at size n; l=0 means the single-chain moment."""

    n: int
    k: int
    l: int = 0

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.l < 0:
            raise ValueError(f"need n >= 1, k >= 1, l >= 0, got {self}")

    @property
    def tuple_count(self) -> int:
        return self.n ** (self.k + self.l)


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    se: float
    trials: int


@dataclass(frozen=True)
class MomentResult:
    query: MomentQuery
    exact_value: Fraction
    mc_estimate: McEstimate | None
    asymptotic_prediction: float


def asymptotic_prediction(k: int, l: int) -> float:
    """n -> infinity limit: 2k on the diagonal k == l, zero off it."""
    if k < 1 or l < 1:
        raise ValueError("prediction is stated for k, l >= 1")
    return 2.0 * k if k == l else 0.0


def _require_gaussian(dist: EntryDistribution):
    # The p! moment rule is specific to the circular Gaussian; exactness
    # would silently break for any other law.
    if dist.kind != "standard_complex_gaussian":
        raise ValueError(
            f"exact oracle supports only the circular Gaussian law, got {dist.kind!r}"
        )


def exact_mixed_trace_moment(
    q: MomentQuery,
    method: str = "auto",
    dist: EntryDistribution = STANDARD_COMPLEX_GAUSSIAN,
) -> Fraction:
    """Exact E[Tr(M^k) Tr(conj(M)^l)] as a rational number.

    method:
      "enumeration" - full tuple walk; raises BudgetExceededError when
                      n^(k+l) exceeds ENUMERATION_BUDGET;
      "matchings"   - Wick pairing count, cost k! 3^k independent of n;
      "auto"        - enumeration when affordable, matchings otherwise.

    Whenever k != l some free variable must appear with unequal conjugated
    and unconjugated multiplicity, so every monomial vanishes and the result
    is exactly zero (this covers l = 0).
    """
    _require_gaussian(dist)
    if q.k != q.l:
        return Fraction(0)
    if method not in ("auto", "enumeration", "matchings"):
        raise ValueError(f"unknown method {method!r}")
    over_budget = q.tuple_count > ENUMERATION_BUDGET
    if method == "enumeration" and over_budget:
        raise BudgetExceededError(
            f"n^(k+l) = {q.tuple_count} exceeds the enumeration budget {ENUMERATION_BUDGET}"
        )
    if method == "matchings" or (method == "auto" and over_budget):
        return _matching_exact(q.n, q.k)
    return _enumeration_exact(q.n, q.k)


def exact_single_trace_moment(n: int, k: int) -> Fraction:
    """E[Tr(M^k)]: the l = 0 query; exactly zero for the Gaussian law."""
    return exact_mixed_trace_moment(MomentQuery(n=n, k=k, l=0))


def _canonical_ids(n: int) -> np.ndarray:
    """canon[a, b] = id of the free variable behind position (a, b), 1-based."""
    a = np.arange(1, n + 1)[:, None]
    b = np.arange(1, n + 1)[None, :]
    direct = (a - 1) * n + (b - 1)
    mirrored = (n - a) * n + (n - b)
    table = np.zeros((n + 1, n + 1), dtype=np.int64)
    table[1:, 1:] = np.minimum(direct, mirrored)
    return table


def _enumeration_exact(n: int, k: int) -> Fraction:
    """Sum the Gaussian moment rule over all n^(2k) index tuples (k = l)."""
    canon = _canonical_ids(n)
    kl = 2 * k
    total_tuples = n**kl
    acc = 0
    chunk = 1 << 16
    for start in range(0, total_tuples, chunk):
        idx = np.arange(start, min(start + chunk, total_tuples), dtype=np.int64)
        digits = np.empty((len(idx), kl), dtype=np.int64)
        t = idx
        for pos in range(kl - 1, -1, -1):
            digits[:, pos] = t % n + 1
            t = t // n
        ichain = digits[:, :k]
        jchain = digits[:, k:]
        uids = np.stack(
            [canon[ichain[:, a], ichain[:, (a + 1) % k]] for a in range(k)], axis=1
        )
        cids = np.stack(
            [canon[jchain[:, b], jchain[:, (b + 1) % k]] for b in range(k)], axis=1
        )
        uids.sort(axis=1)
        cids.sort(axis=1)
        match = np.all(uids == cids, axis=1)
        if not match.any():
            continue
        ids = uids[match]
        # E[u^p conj(u)^p] = p! per variable; accumulate the factorials
        # positionally along each row's runs of equal ids.
        weight = np.ones(ids.shape[0], dtype=np.int64)
        run = np.ones(ids.shape[0], dtype=np.int64)
        for pos in range(1, k):
            same = ids[:, pos] == ids[:, pos - 1]
            run = np.where(same, run + 1, 1)
            weight *= np.where(same, run, 1)
        acc += int(weight.sum())
    return Fraction(acc, n**k)


class _ParityUnionFind:
    """Union-find over index variables with a same/mirrored parity per edge.

    A class whose members are forced equal to their own mirror is 'pinned':
    it admits exactly one value (the center index) when n is odd and none
    when n is even; every other class ranges freely over n values.
    """

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size
        self.parity = [0] * size  # parity of the path to the parent
        self.pinned = [False] * size

    def find(self, x: int) -> tuple[int, int]:
        p = 0
        while self.parent[x] != x:
            p ^= self.parity[x]
            x = self.parent[x]
        return x, p

    def union(self, x: int, y: int, rel: int):
        rx, px = self.find(x)
        ry, py = self.find(y)
        if rx == ry:
            if (px ^ py) != rel:
                # u = v and u = mirror(v) together pin the whole class.
                self.pinned[rx] = True
            return
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
            px, py = py, px
        self.parent[ry] = rx
        self.parity[ry] = px ^ py ^ rel
        if self.pinned[ry]:
            self.pinned[rx] = True
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1

    def pin(self, x: int):
        rx, _ = self.find(x)
        self.pinned[rx] = True

    def count_assignments(self, n: int) -> int:
        count = 1
        for v in range(len(self.parent)):
            root, _ = self.find(v)
            if root != v:
                continue
            if self.pinned[root]:
                if n % 2 == 0:
                    return 0
            else:
                count *= n
        return count


def _matching_exact(n: int, k: int) -> Fraction:
    """Wick pairing count for E[Tr(M^k) Tr(conj(M)^k)].

    Every pairing matches factor a of the first chain with factor pi(a) of
    the second; the covariance indicator [f(A) = f(B)] expands into
    [A = B] + [A = mirror(B)] - [A = B = mirror(B)], so each pairing yields
    3^k signed constraint systems whose integer solution counts are summed.
    """
    systems = factorial(k) * 3**k
    if systems > _MATCHING_BUDGET:
        raise BudgetExceededError(
            f"k = {k} needs {systems} constraint systems, over the budget {_MATCHING_BUDGET}"
        )
    total = 0
    n_vars = 2 * k  # i_0..i_{k-1}, j_0..j_{k-1}
    for perm in permutations(range(k)):
        for terms in product((0, 1, 2), repeat=k):
            uf = _ParityUnionFind(n_vars)
            sign = 1
            for a in range(k):
                b = perm[a]
                ia, ia1 = a, (a + 1) % k
                jb, jb1 = k + b, k + (b + 1) % k
                term = terms[a]
                if term == 2:
                    sign = -sign
                    uf.union(ia, jb, 0)
                    uf.union(ia1, jb1, 0)
                    uf.pin(jb)
                    uf.pin(jb1)
                else:
                    uf.union(ia, jb, term)
                    uf.union(ia1, jb1, term)
            total += sign * uf.count_assignments(n)
    return Fraction(total, n**k)


def _sample_batch(n: int, dist: EntryDistribution, stream: SeedStream, count: int) -> np.ndarray:
    """Draw ``count`` matrices from one substream as a (count, n, n) stack."""
    rng = stream.generator()
    n_free = (n * n + 1) // 2
    raw = dist.draw(count * n_free, rng).reshape(count, n_free)
    mask = _free_position_mask(n)
    flat = np.flatnonzero(mask.ravel())
    x = np.zeros((count, n * n), dtype=np.complex128)
    x[:, flat] = raw
    x = x.reshape(count, n, n)
    return np.where(mask[None, :, :], x, np.flip(x, (1, 2))) / np.sqrt(n)


def mc_trace_moment(
    q: MomentQuery,
    trials: int,
    stream: SeedStream,
    dist: EntryDistribution = STANDARD_COMPLEX_GAUSSIAN,
) -> McEstimate:
    """Monte Carlo estimate of E[Tr(M^k) Tr(conj(M)^l)] with standard error.

    Trials are drawn in fixed-size chunks, one seed substream per chunk, so
    the estimate is reproducible regardless of how the work is scheduled.
    """
    if trials < 10**3:
        raise ValueError(f"need at least 10^3 trials, got {trials}")
    kmax = max(q.k, max(q.l, 1))
    sum_x = 0.0 + 0.0j
    sum_abs2 = 0.0
    done = 0
    chunk_index = 0
    while done < trials:
        count = min(_MC_CHUNK, trials - done)
        batch = _sample_batch(
            q.n, dist, stream.child(chunk_index), count
        )
        traces = np.empty((kmax, count), dtype=np.complex128)
        power = batch
        traces[0] = np.einsum("tii->t", power)
        for deg in range(1, kmax):
            power = power @ batch
            traces[deg] = np.einsum("tii->t", power)
        x = traces[q.k - 1]
        if q.l >= 1:
            x = x * np.conj(traces[q.l - 1])
        sum_x += x.sum()
        sum_abs2 += float((np.abs(x) ** 2).sum())
        done += count
        chunk_index += 1
    mean = sum_x / trials
    variance = max(sum_abs2 / trials - abs(mean) ** 2, 0.0) * trials / max(trials - 1, 1)
    return McEstimate(mean=complex(mean), se=float(np.sqrt(variance / trials)), trials=trials)


def moment_result(
    q: MomentQuery,
    mc_trials: int | None = None,
    stream: SeedStream | None = None,
    method: str = "auto",
) -> MomentResult:
    """Bundle the exact value, optional MC cross-check and the n->inf limit."""
    exact = exact_mixed_trace_moment(q, method=method)
    mc = None
    if mc_trials:
        mc = mc_trace_moment(q, mc_trials, stream if stream is not None else SeedStream(0, 0))
    prediction = asymptotic_prediction(q.k, q.l) if q.l >= 1 else 0.0
    return MomentResult(
        query=q, exact_value=exact, mc_estimate=mc, asymptotic_prediction=prediction
    )
