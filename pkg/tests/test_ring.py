import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringsr.ring import (
    RankSchedule,
    TensorRing,
    normalize_ranks,
    random_ring,
    rank_increment,
    tr_als_fit,
    tr_element,
    tr_to_dense,
)


def brute_contract(ring):
    """Independent oracle: materialize by explicit summation over every bond
    index tuple, never touching the einsum/trace machinery."""
    shape = ring.shape
    bonds = ring.bond_ranks
    out = np.zeros(shape)
    for idx in np.ndindex(shape):
        total = 0.0
        for bond_idx in itertools.product(*(range(r) for r in bonds)):
            term = 1.0
            for k, core in enumerate(ring.cores):
                term *= core[bond_idx[k], idx[k], bond_idx[(k + 1) % len(bonds)]]
            total += term
        out[idx] = total
    return out


def test_ring_validates_bond_chain():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        TensorRing([rng.standard_normal((2, 3, 2)), rng.standard_normal((3, 4, 2))])
    with pytest.raises(ValueError):
        TensorRing([rng.standard_normal((2, 3, 3)), rng.standard_normal((3, 4, 3))])


def test_ranks_property_is_circular():
    r = random_ring((4, 5, 6), [2, 3, 4], np.random.default_rng(0))
    assert r.ranks == [2, 3, 4, 2]
    assert r.cores[0].shape == (2, 4, 3)


def test_normalize_ranks_accepts_circular_vector():
    assert normalize_ranks([2, 3, 4, 2], 3) == [2, 3, 4]
    with pytest.raises(ValueError):
        normalize_ranks([2, 3, 4, 5], 3)


def test_tr_element_rank_one_is_product_of_scalars():
    rng = np.random.default_rng(1)
    ring = random_ring((3, 4, 2), 1, rng)
    idx = (2, 1, 0)
    expected = np.prod([c[0, i, 0] for c, i in zip(ring.cores, idx)])
    assert tr_element(ring, idx) == pytest.approx(expected, rel=1e-12)


def test_tr_element_two_core_trace_by_hand():
    rng = np.random.default_rng(2)
    ring = random_ring((3, 4), [2, 2], rng)
    i, j = 1, 3
    a = ring.cores[0][:, i, :]
    b = ring.cores[1][:, j, :]
    by_hand = a[0, 0] * b[0, 0] + a[0, 1] * b[1, 0] + a[1, 0] * b[0, 1] + a[1, 1] * b[1, 1]
    assert tr_element(ring, (i, j)) == pytest.approx(by_hand, rel=1e-12)


def test_tr_element_rejects_bad_index():
    ring = random_ring((3, 4), 2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        tr_element(ring, (3, 0))
    with pytest.raises(ValueError):
        tr_element(ring, (0,))


def test_materialization_agrees_with_bond_enumeration():
    rng = np.random.default_rng(3)
    for shape, ranks in [((3, 3, 3), 2), ((2, 3), [2, 3]), ((3, 2, 3), [1, 2, 3])]:
        ring = random_ring(shape, ranks, rng)
        dense = tr_to_dense(ring)
        assert np.allclose(dense, brute_contract(ring), atol=1e-10)
        for idx in np.ndindex(ring.shape):
            assert tr_element(ring, idx) == pytest.approx(dense[idx], abs=1e-10)


def test_tr_to_dense_rank_one_all_ones():
    ring = TensorRing([np.ones((1, 3, 1)), np.ones((1, 4, 1))])
    assert np.array_equal(tr_to_dense(ring), np.ones((3, 4)))


def test_tr_to_dense_shape_from_cores():
    rng = np.random.default_rng(4)
    ring = TensorRing([rng.standard_normal((2, 4, 3)), rng.standard_normal((3, 5, 2))])
    assert tr_to_dense(ring).shape == (4, 5)


def test_tt_special_case_matches_chain_multiplication():
    rng = np.random.default_rng(5)
    ring = random_ring((3, 4, 5), [1, 2, 3], rng)  # R0 = RN = 1
    for idx in [(0, 0, 0), (2, 3, 4), (1, 2, 0)]:
        row = ring.cores[0][:, idx[0], :]  # 1 x R1
        acc = row
        for k in range(1, 3):
            acc = acc @ ring.cores[k][:, idx[k], :]
        assert acc.shape == (1, 1)
        assert tr_element(ring, idx) == pytest.approx(acc[0, 0], rel=1e-10)


def test_gauge_freedom_leaves_materialization_unchanged():
    rng = np.random.default_rng(6)
    ring = random_ring((3, 4, 3), [2, 3, 2], rng)
    before = tr_to_dense(ring)
    m = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)  # well conditioned
    m_inv = np.linalg.inv(m)
    cores = [c.copy() for c in ring.cores]
    cores[0] = np.einsum("aib,bc->aic", cores[0], m)
    cores[1] = np.einsum("cb,bia->cia", m_inv, cores[1])
    after = tr_to_dense(TensorRing(cores))
    assert np.linalg.norm(after - before) <= 1e-10 * np.linalg.norm(before)


def test_fit_rejects_shape_mismatch():
    rng = np.random.default_rng(0)
    ring = random_ring((3, 4), 2, rng)
    with pytest.raises(ValueError):
        tr_als_fit(rng.standard_normal((4, 3)), ring)


def test_fit_fixed_point_on_exact_target():
    rng = np.random.default_rng(7)
    ring = random_ring((3, 4, 3), 2, rng)
    target = tr_to_dense(ring)
    fit = tr_als_fit(target, ring, sweeps=1, tol=0.0)
    assert fit.objectives[-1] <= 1e-12 * np.sum(target**2)
    rel = np.linalg.norm(tr_to_dense(fit.ring) - target) / np.linalg.norm(target)
    assert rel < 1e-10  # unchanged up to gauge


def test_fit_exact_recovery_order3():
    truth = random_ring((6, 6, 6), 2, np.random.default_rng(0))
    target = tr_to_dense(truth)
    fit = tr_als_fit(target, random_ring((6, 6, 6), 2, np.random.default_rng(50)), sweeps=50, tol=0.0)
    rel = np.linalg.norm(tr_to_dense(fit.ring) - target) / np.linalg.norm(target)
    assert rel < 1e-6


def test_fit_reconstructs_known_ring_to_high_accuracy():
    rng = np.random.default_rng(11)
    truth = random_ring((5, 6, 4), [1, 2, 2], rng)  # TT-structured ground truth
    target = tr_to_dense(truth)
    fit = tr_als_fit(target, random_ring((5, 6, 4), [1, 2, 2], rng), sweeps=100, tol=0.0)
    rel = np.linalg.norm(tr_to_dense(fit.ring) - target) / np.linalg.norm(target)
    assert rel < 1e-10


def test_fit_objective_non_increasing():
    rng = np.random.default_rng(9)
    target = rng.standard_normal((4, 4, 4))
    fit = tr_als_fit(target, random_ring((4, 4, 4), 2, rng), sweeps=20, tol=0.0)
    objectives = fit.objectives
    scale = max(objectives[0], 1e-300)
    for prev, cur in zip(objectives, objectives[1:]):
        assert cur <= prev + 1e-10 * scale


def test_fit_handles_rank_deficient_subchains():
    # duplicate-slice cores make the subchain Gram singular; the minimum-norm
    # solve must still decrease the objective instead of blowing up
    rng = np.random.default_rng(10)
    cores = [np.repeat(rng.standard_normal((3, 4, 1)), 3, axis=2)]
    cores.append(np.repeat(rng.standard_normal((1, 5, 3)), 3, axis=0))
    ring = TensorRing(cores)
    target = rng.standard_normal((4, 5))
    fit = tr_als_fit(target, ring, sweeps=5, tol=0.0)
    assert np.all(np.isfinite(tr_to_dense(fit.ring)))
    assert fit.objectives[-1] <= fit.objectives[0] + 1e-12


def test_rank_increment_zero_step_is_identity():
    rng = np.random.default_rng(0)
    ring = random_ring((3, 4), 2, rng)
    grown = rank_increment(ring, step=0, noise_scale=0.5, rng=rng)
    assert grown.ranks == ring.ranks
    for a, b in zip(grown.cores, ring.cores):
        assert np.array_equal(a, b)


def test_rank_increment_zero_noise_preserves_materialization():
    rng = np.random.default_rng(1)
    ring = random_ring((3, 4, 5), [2, 3, 2], rng)
    before = tr_to_dense(ring)
    grown = rank_increment(ring, step=2, noise_scale=0.0, rng=rng)
    assert grown.bond_ranks == [4, 5, 4]
    assert np.max(np.abs(tr_to_dense(grown) - before)) <= 1e-12


def test_rank_increment_noise_is_small_perturbation():
    rng = np.random.default_rng(2)
    ring = random_ring((4, 5), 1, rng)
    noise_scale = 1e-2
    before = tr_to_dense(ring)
    grown = rank_increment(ring, step=1, noise_scale=noise_scale, rng=np.random.default_rng(3))
    assert grown.ranks == [2, 2, 2]
    rel = np.linalg.norm(tr_to_dense(grown) - before) / np.linalg.norm(before)
    assert rel <= 10 * noise_scale


def test_rank_increment_respects_bond_caps():
    rng = np.random.default_rng(3)
    ring = random_ring((3, 4, 5), 2, rng)
    grown = rank_increment(ring, step=3, noise_scale=0.0, rng=rng, bond_caps=[3, 4, 5])
    assert grown.bond_ranks == [3, 4, 5]


def test_rank_schedule_validation():
    with pytest.raises(ValueError):
        RankSchedule(initial=5, max_rank=4)
    sched = RankSchedule(initial=2, max_rank=6, bond_caps=[3, 4, 5])
    assert sched.initial_bonds(3) == [2, 2, 2]
    assert sched.caps(3) == [3, 4, 5]


def test_circular_closure_after_fit_and_increment():
    rng = np.random.default_rng(4)
    ring = random_ring((3, 3, 3), 2, rng)
    fit = tr_als_fit(rng.standard_normal((3, 3, 3)), ring, sweeps=3)
    grown = rank_increment(fit.ring, 1, 1e-2, rng)
    for r in (fit.ring, grown):
        n = r.order
        for k in range(n):
            assert r.cores[k].shape[2] == r.cores[(k + 1) % n].shape[0]


def test_order_one_ring_is_slice_trace():
    rng = np.random.default_rng(6)
    core = rng.standard_normal((2, 5, 2))
    ring = TensorRing([core])
    dense = tr_to_dense(ring)
    for i in range(5):
        assert dense[i] == pytest.approx(np.trace(core[:, i, :]), rel=1e-12)
    fit = tr_als_fit(rng.standard_normal(5), ring, sweeps=3, tol=0.0)
    assert fit.objectives[-1] <= 1e-20


def test_element_and_dense_agree_on_order4():
    rng = np.random.default_rng(5)
    ring = random_ring((2, 3, 2, 3), [2, 1, 3, 2], rng)
    dense = tr_to_dense(ring)
    for idx in np.ndindex(ring.shape):
        assert tr_element(ring, idx) == pytest.approx(dense[idx], abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(
    shape=st.lists(st.integers(1, 4), min_size=1, max_size=4),
    seed=st.integers(0, 1000),
    data=st.data(),
)
def test_element_and_dense_agree_entrywise(shape, seed, data):
    bonds = data.draw(st.lists(st.integers(1, 3), min_size=len(shape), max_size=len(shape)))
    ring = random_ring(shape, bonds, np.random.default_rng(seed))
    dense = tr_to_dense(ring)
    for idx in np.ndindex(ring.shape):
        assert tr_element(ring, idx) == pytest.approx(dense[idx], abs=1e-10)
