import math

import numpy as np
import numpy.linalg as la
import pytest

from pvdkit.domains import CutDomain
from pvdkit.graphs import (core_density, cut_pseudorandomness_profile, degree_weights,
                           lp_upper_regularity_check, row_sums,
                           spectral_projection_values, threshold_rank)
from pvdkit.linalg import frob_norm
from pvdkit.pvd import compute_pvd

import oracles


def _complete_graph(n):
    return np.ones((n, n)) - np.eye(n)


def test_row_sums_and_degree_weights():
    A = np.array([[0.0, 2.0], [2.0, 1.0]])
    assert np.allclose(row_sums(A), [2.0, 3.0])
    assert np.allclose(degree_weights(A), [2.0, 3.0])
    with pytest.raises(ValueError):
        degree_weights(np.zeros((2, 2)))  # an isolated vertex has no weight


def test_threshold_rank_complete_graph():
    # K_n with degree weights: one eigenvalue 1, the rest -1/(n-1); only
    # eigenvalues above the threshold count, so the negative ones never enter
    for n in (4, 6):
        A = _complete_graph(n)
        assert threshold_rank(A, 0.5) == pytest.approx(1.0)
        assert threshold_rank(A, 1e-6) == pytest.approx(1.0)


def test_threshold_rank_disconnected_components():
    # two disjoint edges: normalized eigenvalues are +1, +1, -1, -1
    A = np.zeros((4, 4))
    A[0, 1] = A[1, 0] = 1.0
    A[2, 3] = A[3, 2] = 1.0
    assert threshold_rank(A, 0.5) == pytest.approx(2.0)


def test_core_density_single_edge():
    # one edge: degrees (1,1), average 1, so each endpoint weight is 2
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert core_density(A) == pytest.approx(0.5)


def test_core_density_equals_weighted_frobenius_square():
    rng = np.random.default_rng(100)
    for trial in range(8):
        A = oracles.gnp_adjacency(rng, 6, 0.5)
        if A.sum() == 0:
            continue
        deg = row_sums(A)
        dd = deg + deg.mean()
        # [DERIVED] independent weighted Frobenius computation
        want = oracles.weighted_frob(A, dd, dd) ** 2
        assert core_density(A) == pytest.approx(want, rel=1e-10)
        assert core_density(A) == pytest.approx(frob_norm(A, dd, dd) ** 2, rel=1e-12)


def test_spectral_values_unit_weights_are_singular_values():
    rng = np.random.default_rng(101)
    A = oracles.gnp_adjacency(rng, 6, 0.5)
    vals = spectral_projection_values(A)
    assert np.allclose(vals, np.sort(la.svd(A, compute_uv=False))[::-1], atol=1e-10)


def test_projection_values_majorized_by_spectral():
    rng = np.random.default_rng(102)
    for trial in range(8):
        A = oracles.gnp_adjacency(rng, 7, 0.5)
        if A.sum() == 0:
            continue
        d = degree_weights(A)
        res = compute_pvd(A, CutDomain(d), max_terms=5)
        spec = spectral_projection_values(A, weights=d)
        for r in range(1, min(5, res.num_terms) + 1):
            lhs = la.norm(res.sigmas[:r])
            rhs = la.norm(spec[:r])
            assert lhs <= rhs + 1e-8, f"trial {trial} r={r}"


def test_profile_degree_weights_mass_ratio_is_exactly_one():
    rng = np.random.default_rng(103)
    for trial in range(6):
        A = oracles.gnp_adjacency(rng, 7, 0.6)
        if A.sum() == 0:
            continue
        prof = cut_pseudorandomness_profile(A, weights=degree_weights(A), r=2)
        assert prof.cut_mass_ratio == 1.0  # bitwise, not approximately
        assert prof.certificate_ratio == pytest.approx(prof.sigma_prefix_norm)


def test_profile_first_value_is_mean_density_scale():
    # complete bipartite K_{2,2} with unit weights: best single cut is the
    # full positive block
    A = np.zeros((4, 4))
    A[:2, 2:] = 1.0
    A[2:, :2] = 1.0
    prof = cut_pseudorandomness_profile(A, r=1)
    assert prof.sigmas[0] == pytest.approx(oracles.cut_pnorm_max(A), abs=1e-9)


def test_lp_regularity_complete_bipartite_sqrt_two():
    A = np.zeros((4, 4))
    A[:2, 2:] = 1.0
    A[2:, :2] = 1.0
    ratio, part = lp_upper_regularity_check(A, p=2.0, eta=0.5)
    assert ratio == pytest.approx(math.sqrt(2.0), abs=1e-9)
    assert len(part) == 2


def test_lp_regularity_all_ones_is_flat():
    A = np.ones((5, 5))
    ratio, _ = lp_upper_regularity_check(A, p=2.0, eta=0.5)
    assert ratio == pytest.approx(1.0, abs=1e-12)


def test_lp_regularity_exhaustive_matches_partition_oracle():
    rng = np.random.default_rng(104)
    A = oracles.gnp_adjacency(rng, 5, 0.6) + np.eye(5)
    p, eta = 2.0, 0.34  # at most 2 parts
    total = A.sum()
    best = 0.0
    for parts in oracles.set_partitions(range(5)):
        if len(parts) > 2:
            continue
        acc = 0.0
        for P in parts:
            for Q in parts:
                mass = oracles.rect_sum(A, P, Q)
                size = len(P) * len(Q)
                acc += (size / 25.0) * (mass / size) ** p
        best = max(best, acc ** (1 / p) / (total / 25.0))
    ratio, _ = lp_upper_regularity_check(A, p=p, eta=eta)
    assert ratio == pytest.approx(best, abs=1e-9)


def test_lp_regularity_sampled_is_deterministic():
    rng = np.random.default_rng(105)
    A = oracles.gnp_adjacency(rng, 14, 0.5)
    r1, _ = lp_upper_regularity_check(A, 2.0, 0.5, mode="sampled", samples=200, seed=7)
    r2, _ = lp_upper_regularity_check(A, 2.0, 0.5, mode="sampled", samples=200, seed=7)
    assert r1 == r2


def test_lp_regularity_validation():
    A = _complete_graph(4)
    with pytest.raises(ValueError):
        lp_upper_regularity_check(A, p=1.0, eta=0.5)
    with pytest.raises(ValueError):
        lp_upper_regularity_check(A, p=2.0, eta=0.1)  # 10 parts > 4 vertices
    with pytest.raises(ValueError):
        lp_upper_regularity_check(np.zeros((3, 3)), p=2.0, eta=0.5)
