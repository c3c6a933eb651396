import numpy as np
import pytest

from centro_spectra.eigen import eigenvalues_centrosymmetric, eigenvalues_dense, match_spectra
from centro_spectra.linalg import operator_norm_estimate
from centro_spectra.reduction import BlockReduction, block_reduce, build_orthogonal_q, verify_reduction
from centro_spectra.sampling import (
    STANDARD_COMPLEX_GAUSSIAN,
    CentrosymmetricMatrix,
    SeedStream,
    sample_centrosymmetric,
)

SQ2 = np.sqrt(2.0)


def _wrap(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return CentrosymmetricMatrix(
        matrix=matrix, n=matrix.shape[0], seed=0, stream_index=0, dist=STANDARD_COMPLEX_GAUSSIAN
    )


def test_q_n2_matches_closed_form():
    expected = np.array([[1.0, -1.0], [1.0, 1.0]]) / SQ2
    assert np.abs(build_orthogonal_q(2) - expected).max() <= 1e-15


def test_q_n3_matches_closed_form():
    expected = np.array([[1.0, 0.0, -1.0], [0.0, SQ2, 0.0], [1.0, 0.0, 1.0]]) / SQ2
    assert np.abs(build_orthogonal_q(3) - expected).max() <= 1e-15


def test_q_orthogonal_n7():
    q = build_orthogonal_q(7)
    assert np.abs(q.T @ q - np.eye(7)).max() <= 1e-12


def test_q_rejects_small_n():
    with pytest.raises(ValueError):
        build_orthogonal_q(1)


def test_block_reduce_2x2_scalars():
    a, b = 0.3 - 0.4j, 1.25 + 2j
    red = block_reduce(_wrap([[a, b], [b, a]]))
    assert red.t1.shape == (1, 1) and red.t2.shape == (1, 1)
    assert red.t1[0, 0] == a + b
    assert red.t2[0, 0] == a - b


def test_block_reduce_identity_4x4():
    red = block_reduce(_wrap(np.eye(4)))
    assert np.array_equal(red.t1, np.eye(2, dtype=complex))
    assert np.array_equal(red.t2, np.eye(2, dtype=complex))


def test_block_reduce_residual_5x5():
    cm = sample_centrosymmetric(5, stream=SeedStream(7, 0))
    assert verify_reduction(cm, block_reduce(cm)) <= 1e-12


def test_verify_reduction_identity_is_exact():
    cm = _wrap(np.eye(4))
    assert verify_reduction(cm, block_reduce(cm)) <= 1e-15


def test_block_sizes_sum_to_n():
    for n in range(2, 10):
        red = block_reduce(sample_centrosymmetric(n, stream=SeedStream(2, n)))
        assert red.t1.shape[0] + red.t2.shape[0] == n
        assert red.t1.shape[0] == (n + 1) // 2
        assert red.parity == ("even" if n % 2 == 0 else "odd")


def test_verify_reduction_flags_corruption():
    cm = sample_centrosymmetric(6, stream=SeedStream(5, 1))
    red = block_reduce(cm)
    t1 = red.t1.copy()
    t1[0, 0] += 1.0
    corrupted = BlockReduction(t1=t1, t2=red.t2, q=red.q, parity=red.parity)
    assert verify_reduction(cm, corrupted) >= 0.4


def test_verify_reduction_shape_mismatch():
    cm = sample_centrosymmetric(6, stream=SeedStream(5, 2))
    red = block_reduce(cm)
    bad = BlockReduction(t1=red.t1[:2, :2], t2=red.t2, q=red.q, parity=red.parity)
    with pytest.raises(ValueError):
        verify_reduction(cm, bad)


def test_block_reduce_rejects_asymmetric_input():
    cm = sample_centrosymmetric(4, stream=SeedStream(5, 3))
    broken = cm.matrix.copy()
    broken[0, 0] += 1e-3
    fake = CentrosymmetricMatrix.__new__(CentrosymmetricMatrix)
    object.__setattr__(fake, "matrix", broken)
    object.__setattr__(fake, "n", 4)
    object.__setattr__(fake, "seed", 0)
    object.__setattr__(fake, "stream_index", 0)
    object.__setattr__(fake, "dist", STANDARD_COMPLEX_GAUSSIAN)
    with pytest.raises(ValueError):
        block_reduce(fake)


def test_eigenvalue_union_property():
    for n in (2, 3, 6, 9, 12):
        cm = sample_centrosymmetric(n, stream=SeedStream(11, n))
        whole = eigenvalues_dense(cm.matrix)
        split = eigenvalues_centrosymmetric(cm)
        tol = 1e-8 * n * (1.0 + operator_norm_estimate(cm.matrix))
        assert match_spectra(whole, split) <= tol


def test_block_entry_statistics():
    # even-n block entries: mean 0, variance 2/n (n=8, 10^4 trials)
    n, trials = 8, 10**4
    entries = []
    for t in range(trials):
        red = block_reduce(sample_centrosymmetric(n, stream=SeedStream(23, t)))
        entries.append(red.t1.ravel())
        entries.append(red.t2.ravel())
    values = np.concatenate(entries)
    count = len(values)
    mean_se = np.sqrt((np.abs(values) ** 2).mean() / count)
    assert abs(values.mean()) <= 5 * mean_se
    sq = np.abs(values) ** 2
    var_se = sq.std() / np.sqrt(count)
    assert abs(sq.mean() - 2.0 / n) <= 5 * var_se
