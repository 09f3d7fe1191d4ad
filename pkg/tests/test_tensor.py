import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringsr.tensor import (
    fold_canonical,
    fold_mode,
    frobenius_norm,
    hadamard,
    unfold_canonical,
    unfold_mode,
)

shapes = st.lists(st.integers(1, 3), min_size=1, max_size=6)


def random_tensor(shape, seed=0):
    return np.random.default_rng(seed).standard_normal(shape)


def brute_unfold_mode(t, mode):
    """Independent oracle: explicit index enumeration with the first listed
    column mode fastest."""
    n = t.ndim
    rest = [(mode + j) % n for j in range(1, n)]
    out = np.zeros((t.shape[mode], int(np.prod([t.shape[m] for m in rest], initial=1))))
    for idx in np.ndindex(t.shape):
        col = 0
        stride = 1
        for m in rest:
            col += idx[m] * stride
            stride *= t.shape[m]
        out[idx[mode], col] = t[idx]
    return out


def test_matrix_unfoldings_are_identity_and_transpose():
    m = random_tensor((2, 2))
    assert np.array_equal(unfold_mode(m, 0), m)
    assert np.array_equal(unfold_mode(m, 1), m.T)


def test_unfold_mode_shapes():
    t = random_tensor((2, 3, 4))
    assert unfold_mode(t, 1).shape == (3, 8)
    assert unfold_mode(t, 0).shape == (2, 12)


def test_unfold_canonical_shapes():
    t = random_tensor((2, 3, 4))
    assert unfold_canonical(t, 1).shape == (2, 12)
    assert unfold_canonical(t, 2).shape == (6, 4)


def test_unfold_mode_matches_enumeration_oracle():
    t = random_tensor((2, 3, 4), seed=3)
    for mode in range(3):
        assert np.array_equal(unfold_mode(t, mode), brute_unfold_mode(t, mode))


@settings(max_examples=60, deadline=None)
@given(shape=shapes, data=st.data())
def test_fold_unfold_round_trips(shape, data):
    t = random_tensor(shape, seed=data.draw(st.integers(0, 100)))
    for mode in range(len(shape)):
        assert np.array_equal(fold_mode(unfold_mode(t, mode), shape, mode), t)
    for split in range(1, len(shape)):
        assert np.array_equal(fold_canonical(unfold_canonical(t, split), shape, split), t)


def test_mode_out_of_range():
    t = random_tensor((2, 3))
    with pytest.raises(ValueError):
        unfold_mode(t, 2)
    with pytest.raises(ValueError):
        unfold_canonical(t, 2)
    with pytest.raises(ValueError):
        unfold_canonical(t, 0)


def test_hadamard_identities():
    a = random_tensor((3, 4), seed=1)
    assert np.array_equal(hadamard(a, np.ones_like(a)), a)
    assert np.array_equal(hadamard(a, np.zeros_like(a)), np.zeros_like(a))
    assert np.array_equal(
        hadamard(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[5.0, 6.0], [7.0, 8.0]])),
        np.array([[5.0, 12.0], [21.0, 32.0]]),
    )


def test_hadamard_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        hadamard(np.ones((2, 3)), np.ones((3, 2)))


@settings(max_examples=30, deadline=None)
@given(shape=shapes, s1=st.integers(0, 99), s2=st.integers(0, 99), s3=st.integers(0, 99))
def test_hadamard_commutative_associative(shape, s1, s2, s3):
    a, b, c = (random_tensor(shape, seed=s) for s in (s1, s2, s3))
    assert np.allclose(hadamard(a, b), hadamard(b, a))
    assert np.allclose(hadamard(hadamard(a, b), c), hadamard(a, hadamard(b, c)))


def test_frobenius_norm_basics():
    assert frobenius_norm(np.zeros((3, 3))) == 0.0
    assert frobenius_norm(np.array([3.0, 4.0])) == pytest.approx(5.0)
    t = random_tensor((2, 3, 4), seed=7)
    total = 0.0
    for idx in np.ndindex(t.shape):
        total += t[idx] ** 2
    assert frobenius_norm(t) == pytest.approx(np.sqrt(total), rel=1e-12)


def test_frobenius_norm_invariant_under_unfolding():
    t = random_tensor((2, 3, 4, 2), seed=9)
    ref = frobenius_norm(t)
    for mode in range(4):
        assert frobenius_norm(unfold_mode(t, mode)) == pytest.approx(ref, rel=1e-12)
    for split in range(1, 4):
        assert frobenius_norm(unfold_canonical(t, split)) == pytest.approx(ref, rel=1e-12)
