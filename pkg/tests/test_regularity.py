import math

import numpy as np
import numpy.linalg as la
import pytest

from pvdkit.regularity import (Partition, block_average, max_cut_details,
                               max_cut_estimate, refine, szemeredi_irregularity_ub,
                               szemeredi_partition, weak_irregularity_ub,
                               weak_regularity_partition)

import oracles


def test_refine_no_pairs_is_trivial_partition():
    part = refine([], 5)
    assert len(part) == 1
    assert part.parts == ((0, 1, 2, 3, 4),)


def test_refine_groups_by_membership_signature():
    part = refine([((0, 1), (2, 3))], 4)
    # S = {0,1}, T = {2,3}: signatures split the ground set in two
    assert part.parts == ((0, 1), (2, 3))
    part2 = refine([((0,), (1,)), ((0, 2), (3,))], 4)
    for P in part2:
        for Q in part2:
            assert P == Q or not set(P) & set(Q)
    assert part2.num_vertices == 4
    assert len(part2) <= 2 ** 4


def test_refine_part_count_bound():
    rng = np.random.default_rng(90)
    for trial in range(10):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(0, 4))
        pairs = []
        for _ in range(k):
            S = tuple(np.nonzero(rng.integers(0, 2, size=n))[0])
            T = tuple(np.nonzero(rng.integers(0, 2, size=n))[0])
            pairs.append((S, T))
        part = refine(pairs, n)
        assert len(part) <= 2 ** (2 * k)
        assert sorted(i for P in part for i in P) == list(range(n))


def test_block_average_matches_loops():
    rng = np.random.default_rng(91)
    A = rng.normal(size=(5, 5))
    part = Partition(parts=((0, 2), (1, 3, 4)))
    got = block_average(A, part)
    want = oracles.block_mean_matrix(A, [list(p) for p in part])
    assert np.allclose(got, want)
    # averaging is idempotent
    assert np.allclose(block_average(got, part), got)


def test_single_block_irregularity_of_identity_pair():
    # one part, A = I2: the worst rectangle of A minus its average is 1/2
    A = np.eye(2)
    part = Partition(parts=((0, 1),))
    assert szemeredi_irregularity_ub(A, part) == pytest.approx(0.5)
    assert weak_irregularity_ub(A, part) == pytest.approx(0.5)


def test_irregularity_upper_bounds_match_oracle():
    rng = np.random.default_rng(92)
    for trial in range(6):
        n = int(rng.integers(3, 7))
        A = oracles.gnp_adjacency(rng, n, 0.5)
        part = refine([(tuple(range(n // 2)), tuple(range(n // 2, n)))], n)
        R = A - oracles.block_mean_matrix(A, [list(p) for p in part])
        assert weak_irregularity_ub(A, part) == pytest.approx(
            oracles.plain_cutnorm(R), abs=1e-9)


def test_weak_regularity_certificates_pass():
    rng = np.random.default_rng(93)
    for trial in range(5):
        A = oracles.gnp_adjacency(rng, 8, 0.5)
        rep = weak_regularity_partition(A, 0.5)
        assert rep.all_pass, f"trial {trial}: {rep.certificates}"
        assert rep.exact
        # [DERIVED] the reported irregularity really is the residual cut norm
        R = A - rep.approx_matrix
        assert rep.weak_irregularity_ub == pytest.approx(
            oracles.plain_cutnorm(R), abs=1e-9)
        assert rep.weak_irregularity_ub <= rep.bound_certificate + 1e-9


def test_weak_regularity_partition_size_bound():
    rng = np.random.default_rng(94)
    A = oracles.gnp_adjacency(rng, 10, 0.5)
    rep = weak_regularity_partition(A, 0.5)  # r = 4
    assert len(rep.partition) <= 2 ** (2 * rep.terms_used)
    assert rep.block_deviation <= 1e-9


def test_weak_regularity_weighted_chain_holds():
    rng = np.random.default_rng(95)
    A = oracles.gnp_adjacency(rng, 6, 0.6)
    d = rng.integers(1, 4, size=6).astype(float)
    rep = weak_regularity_partition(A, 0.6, weights=d)
    assert rep.all_pass
    assert rep.weak_irregularity_ub <= rep.bound_certificate + 1e-9


def test_weak_regularity_rejects_asymmetric():
    with pytest.raises(ValueError):
        weak_regularity_partition(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.5)


def test_szemeredi_identity_matrix_stops_at_first_window():
    rep = szemeredi_partition(np.eye(4), 0.8, base=16.0)
    assert rep.all_pass, rep.certificates
    assert rep.details["level_index"] == 0
    assert rep.details["q"] == 0
    assert len(rep.partition) == 1
    assert rep.terms_used == 0


def test_szemeredi_windows_telescope_to_horizon():
    rng = np.random.default_rng(96)
    A = oracles.gnp_adjacency(rng, 8, 0.5)
    rep = szemeredi_partition(A, 0.8)
    det = rep.details
    assert sum(det["windows"]) == pytest.approx(det["mass_horizon"], abs=1e-9)
    assert det["window"] <= 0.8 ** 2 * det["mass_horizon"] + 1e-9


def test_szemeredi_certificates_on_random_graphs():
    rng = np.random.default_rng(97)
    for trial in range(4):
        A = oracles.gnp_adjacency(rng, 8, 0.5)
        rep = szemeredi_partition(A, 0.8)
        assert rep.all_pass, f"trial {trial}: {rep.certificates}"
        assert len(rep.partition) <= 2 ** (2 * rep.terms_used) if rep.terms_used else True


def test_szemeredi_eps_ladder_guard():
    with pytest.raises(ValueError):
        szemeredi_partition(np.eye(4), 0.2, base=16.0)  # ladder blows past the horizon cap


def test_max_cut_complete_bipartite_exact():
    # block-constant input: the split enumeration finds the true split
    for n in (4, 6, 8, 10):
        J = np.ones((n, n)) - np.eye(n)
        est, cut = max_cut_estimate(J, 0.5)
        true = oracles.maxcut_value(J)
        info = max_cut_details(J, 0.5)
        assert info["exact_split"]
        assert abs(est - true) <= info["weak_irregularity_ub"] + 1e-6


def test_max_cut_all_ones_matches_quarter_square():
    for n in (4, 6, 8, 10):
        J = np.ones((n, n))
        est, cut = max_cut_estimate(J, 0.5)
        assert est == pytest.approx(n * n / 4.0, abs=1e-9)
        assert len(cut) == n // 2


def test_max_cut_estimate_within_slack_of_bruteforce():
    rng = np.random.default_rng(98)
    for trial in range(5):
        A = oracles.gnp_adjacency(rng, 8, 0.5)
        info = max_cut_details(A, 0.5)
        true = oracles.maxcut_value(A)
        slack = info["weak_irregularity_ub"] + info["grid_term"] + 1e-6
        assert abs(info["estimate"] - true) <= slack, f"trial {trial}"


def test_max_cut_grid_fallback_runs():
    rng = np.random.default_rng(99)
    A = oracles.gnp_adjacency(rng, 9, 0.5)
    info = max_cut_details(A, 0.5, split_cap=1)
    assert not info["exact_split"]
    assert info["grid_term"] > 0
    true = oracles.maxcut_value(A)
    assert abs(info["estimate"] - true) <= (info["weak_irregularity_ub"]
                                            + info["grid_term"] + 1e-6)


def test_max_cut_rejects_bad_delta():
    with pytest.raises(ValueError):
        max_cut_details(np.eye(3), 0.5, delta=0.0)
