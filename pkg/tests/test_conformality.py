import numpy as np
import pytest

from ipl import (
    EnumerationCapError,
    SpdMatrix,
    inverse_conformality_check,
    make_conformality_pair,
    partition_gadget,
    strong_conformality,
    verify_conformality_bounds,
    weak_conformality,
    weak_conformality_sampled,
)

from conftest import random_orthogonal, random_spd


def family_matrix(k, alpha):
    return SpdMatrix(np.eye(k) + (alpha / k) * np.ones((k, k)))


def sampled_orthogonal_pairs(m, trials, seed):
    # Independent upper-bound check for the strong conformality: the best
    # correlation over random pairs orthogonal in the standard inner product.
    rng = np.random.default_rng(seed)
    k = m.dim
    x = rng.standard_normal((trials, k))
    y = rng.standard_normal((trials, k))
    y = y - (np.einsum("ti,ti->t", x, y) / np.einsum("ti,ti->t", x, x))[:, None] * x
    mx = x @ m.entries
    num = np.abs(np.einsum("ti,ti->t", mx, y))
    den = np.sqrt(np.einsum("ti,ti->t", mx, x) * np.einsum("ti,ij,tj->t", y, m.entries, y))
    keep = den > 0
    return float((num[keep] / den[keep]).max())


def test_strong_examples():
    assert strong_conformality(SpdMatrix(np.eye(4))) == 0.0
    assert strong_conformality(SpdMatrix(np.diag([3.0, 1.0]))) == pytest.approx(0.5)
    m = SpdMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert strong_conformality(m) == pytest.approx(0.5)
    oracle = sampled_orthogonal_pairs(m, 20000, 7)
    assert oracle <= 0.5 + 1e-9
    assert oracle >= 0.45


def test_strong_condition_number_identity(rng):
    for _ in range(20):
        m = random_spd(rng, int(rng.integers(2, 10)))
        kappa = m.condition
        assert strong_conformality(m) == pytest.approx(1 - 2 / (kappa + 1), abs=1e-12)


def test_strong_requires_dim_two():
    with pytest.raises(ValueError):
        strong_conformality(SpdMatrix(np.eye(1)))


def test_weak_diagonal_is_zero_with_singleton_witness(rng):
    m = SpdMatrix.from_diagonal(rng.uniform(0.5, 4.0, 5))
    res = weak_conformality(m)
    assert res.rho_weak == 0.0
    assert res.witness_partition == (0,)


def test_weak_two_by_two_offdiagonal():
    alpha = 2.0
    m = SpdMatrix(np.array([[alpha, 0.3], [0.3, 1 / alpha]]))
    res = weak_conformality(m)
    assert res.rho_weak == pytest.approx(0.3, abs=1e-12)


def test_weak_rank_one_shift_family():
    res = weak_conformality(family_matrix(4, 2.0))
    assert res.rho_weak == pytest.approx(0.5, abs=1e-9)


def test_weak_witness_invariants(rng):
    for _ in range(10):
        m = random_spd(rng, int(rng.integers(2, 9)))
        res = weak_conformality(m)
        s = set(res.witness_partition)
        assert all(res.witness_x[i] == 0 for i in range(m.dim) if i not in s)
        assert all(res.witness_y[i] == 0 for i in s)
        ratio = res.witness_x @ m.entries @ res.witness_y / np.sqrt(
            m.quad(res.witness_x) * m.quad(res.witness_y)
        )
        assert ratio == pytest.approx(res.rho_weak, abs=1e-8)
        assert res.rho_weak <= res.rho_strong + 1e-10


def test_weak_cap_and_force():
    m = SpdMatrix(np.eye(6) + 0.1 * np.ones((6, 6)))
    with pytest.raises(EnumerationCapError):
        weak_conformality(m, cap=5)
    res = weak_conformality(m, cap=5, force=True)
    assert res.rho_weak > 0


def test_weak_threads_match_serial(rng):
    m = random_spd(rng, 8)
    serial = weak_conformality(m)
    threaded = weak_conformality(m, threads=3)
    assert serial.rho_weak == threaded.rho_weak
    assert serial.witness_partition == threaded.witness_partition


def test_weak_invariant_under_diagonal_congruence(rng):
    for _ in range(10):
        m = random_spd(rng, 5)
        d = np.diag(rng.uniform(0.5, 2.0, 5) * rng.choice([-1.0, 1.0], 5))
        congruent = SpdMatrix(d @ m.entries @ d)
        assert weak_conformality(congruent).rho_weak == pytest.approx(
            weak_conformality(m).rho_weak, abs=1e-9
        )


def test_strong_invariant_under_orthogonal_conjugation(rng):
    for _ in range(10):
        m = random_spd(rng, 6)
        u = random_orthogonal(rng, 6)
        assert strong_conformality(SpdMatrix(u.T @ m.entries @ u)) == pytest.approx(
            strong_conformality(m), abs=1e-9
        )


def test_weak_principal_submatrix_monotone(rng):
    for _ in range(5):
        m = random_spd(rng, 5)
        rho = weak_conformality(m).rho_weak
        for subset in ((0, 1), (0, 2, 4), (1, 2, 3, 4)):
            idx = np.array(subset)
            sub = SpdMatrix(m.entries[np.ix_(idx, idx)])
            assert weak_conformality(sub).rho_weak <= rho + 1e-10


def test_sampled_oracle_examples():
    assert weak_conformality_sampled(SpdMatrix(np.eye(3)), 1000, 3) == 0.0
    m = SpdMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
    # Dimension 2 has a single support split, so sampling is exact.
    assert weak_conformality_sampled(m, 1000, 7) == pytest.approx(0.5, abs=1e-12)
    gadget = partition_gadget((1, 1))
    sampled = weak_conformality_sampled(gadget.matrix, 10000, 1)
    exact = weak_conformality(gadget.matrix).rho_weak
    assert sampled <= exact + 1e-9
    assert sampled >= 0.95 * exact


def test_sampled_below_exact_and_deterministic(rng):
    for _ in range(8):
        m = random_spd(rng, int(rng.integers(2, 6)))
        exact = weak_conformality(m).rho_weak
        sampled = weak_conformality_sampled(m, 10000, 99)
        assert sampled <= exact + 1e-9
        assert sampled >= 0.95 * exact
        assert sampled == weak_conformality_sampled(m, 10000, 99)


def test_make_pair_endpoint_alpha_one():
    m = make_conformality_pair(0.3, 0.3, 2)
    np.testing.assert_allclose(m.entries, [[1.0, 0.3], [0.3, 1.0]], atol=1e-12)


def test_make_pair_identity():
    m = make_conformality_pair(0.0, 0.0, 5)
    np.testing.assert_allclose(m.entries, np.eye(5), atol=1e-12)


def test_make_pair_hits_both_targets():
    m = make_conformality_pair(0.2, 0.6, 4)
    assert strong_conformality(m) == pytest.approx(0.6, abs=1e-8)
    assert weak_conformality(m).rho_weak == pytest.approx(0.2, abs=1e-8)


def test_make_pair_domain_errors():
    with pytest.raises(ValueError):
        make_conformality_pair(0.5, 0.3, 3)
    with pytest.raises(ValueError):
        make_conformality_pair(0.2, 1.0, 3)
    with pytest.raises(ValueError):
        make_conformality_pair(0.1, 0.2, 1)


def test_partition_gadget_structure():
    g = partition_gadget((1, 1))
    np.testing.assert_allclose(g.matrix.entries, [[2.0, 1.0], [1.0, 2.0]], atol=1e-12)
    assert g.half_sum == 1.0
    assert g.affirmative_value == pytest.approx(0.5)
    assert weak_conformality(g.matrix).rho_weak == pytest.approx(0.5, abs=1e-9)

    g = partition_gadget((2, 2, 2, 2))
    assert g.affirmative_value == pytest.approx(0.8)
    res = weak_conformality(g.matrix)
    assert res.rho_weak == pytest.approx(0.8, abs=1e-9)
    assert len(res.witness_partition) == 2

    for i, inst in enumerate(((1, 2), (5, 3, 2))):
        g = partition_gadget(inst)
        diag = np.diagonal(g.matrix.entries)
        np.testing.assert_allclose(diag, np.array(inst) + 1.0)
        x = np.sqrt(np.array(inst, dtype=float))
        off = g.matrix.entries - np.diag(diag)
        expect = np.outer(x, x) - np.diag(x * x)
        np.testing.assert_allclose(off, expect, atol=1e-12)


def test_partition_gadget_negative_instance_strictly_below():
    g = partition_gadget((1, 2))
    rho = weak_conformality(g.matrix).rho_weak
    assert rho == pytest.approx(np.sqrt(2.0 / 6.0), abs=1e-9)
    assert rho < g.affirmative_value - 1e-6


def test_partition_gadget_rejects_bad_instances():
    with pytest.raises(ValueError):
        partition_gadget((0, 1))
    with pytest.raises(ValueError):
        partition_gadget((3,))


def test_bounds_identity_collapse():
    rep = verify_conformality_bounds(SpdMatrix(np.eye(3)), np.array([1.0, -2.0, 0.5]))
    assert rep.passed
    v = rep.values
    assert v["rho_weak"] == 0.0
    assert v["sign_lower"] == pytest.approx(v["quadratic_form"])
    assert v["sign_upper"] == pytest.approx(v["quadratic_form"])
    assert v["trace_lower"] == pytest.approx(v["quadratic_form"])


def test_bounds_sign_lower_tight_case():
    m = SpdMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
    rep = verify_conformality_bounds(m, np.array([1.0, -1.0]))
    assert rep.passed
    v = rep.values
    assert v["quadratic_form"] == pytest.approx(2.0)
    assert v["rho_weak"] == pytest.approx(0.5, abs=1e-9)
    assert v["sign_lower"] == pytest.approx(2.0, abs=1e-8)
    assert v["sign_upper"] == pytest.approx(18.0, abs=1e-7)


def test_bounds_trace_asymptotics_k16():
    # Lower bound within 10% of the quadratic form for the negative-shift
    # family at k = 16 with x = all-ones.
    k, alpha = 16, -0.5
    m = family_matrix(k, alpha)
    rep = verify_conformality_bounds(m, np.ones(k))
    assert rep.passed
    v = rep.values
    assert v["rho_weak"] == pytest.approx(abs(alpha) / (2 + alpha), abs=1e-9)
    assert v["quadratic_form"] == pytest.approx((1 + alpha) * k)
    gap = (v["quadratic_form"] - v["trace_lower"]) / v["quadratic_form"]
    assert 0 <= gap < 0.10


def test_bounds_random(rng):
    for _ in range(10):
        m = random_spd(rng, int(rng.integers(2, 6)))
        x = rng.standard_normal(m.dim)
        assert verify_conformality_bounds(m, x).passed


def test_bounds_dimension_mismatch():
    with pytest.raises(ValueError):
        verify_conformality_bounds(SpdMatrix(np.eye(3)), np.ones(2))


def test_inverse_check_examples(rng):
    rep = inverse_conformality_check(SpdMatrix(np.eye(3)))
    assert rep.passed
    assert rep.values["rho_strong"] == 0.0

    rep = inverse_conformality_check(SpdMatrix(np.diag([4.0, 1.0])))
    assert rep.passed
    assert rep.values["rho_strong"] == pytest.approx(0.6)
    assert rep.values["rho_strong_inverse"] == pytest.approx(0.6)

    rep = inverse_conformality_check(random_spd(rng, 5))
    assert rep.passed


def test_weak_threads_deterministic_with_ties():
    # All-ties input: every partition scores exactly zero, so the witness
    # must come from the lexicographic rule regardless of thread count.
    m = SpdMatrix(np.eye(8))
    serial = weak_conformality(m)
    threaded = weak_conformality(m, threads=4)
    assert serial.witness_partition == threaded.witness_partition == (0,)
    assert serial.rho_weak == threaded.rho_weak == 0.0
