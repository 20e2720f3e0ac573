"""Continuation solver: start systems, tracking, classification, filtering."""

import itertools

import numpy as np
import pytest

from gridroots.bounds import kappa
from gridroots.casegen import GenConfig, generate_case_on_topology
from gridroots.cliques import Graph
from gridroots.homotopy import (Homotopy, PathStatus, TrackerConfig,
                                build_start_system, filter_real, solve_all,
                                track_path)
from gridroots.pfmodel import build_pf_system
from gridroots.polysys import Monomial, PolynomialSystem, evaluate, total_degree
from oracles import complete_net, two_bus_net, two_bus_voltages, zero_injection_roots

M = Monomial


def check_accounting(sols):
    """finite (with multiplicity) + infinity + singular + failed = paths."""
    finite_paths = sum(sols.multiplicities)
    assert (finite_paths + sols.num_at_infinity + sols.num_singular
            + sols.num_failed) == sols.num_paths
    assert sols.num_paths == total_degree(sols.target)


def check_conjugate_closure(sols, tol):
    for s in sols.finite:
        best = min(np.abs(np.conj(s) - t).max() for t in sols.finite)
        assert best < tol


def test_config_validation():
    with pytest.raises(ValueError):
        TrackerConfig(min_step=0.05, initial_step=0.05)
    with pytest.raises(ValueError):
        TrackerConfig(corrector_tol=-1.0)
    with pytest.raises(ValueError):
        Homotopy(PolynomialSystem([[M(1.0, (2,)), M(-1.0, (0,))]]),
                 PolynomialSystem([[M(1.0, (2,)), M(-1.0, (0,))]]),
                 gamma=2.0)


def test_start_system_single_quadratic():
    target = PolynomialSystem([[M(1.0, (2,)), M(-3.0, (0,))]])
    start, points = build_start_system(target, seed=5)
    assert len(points) == 2
    got = sorted(complex(p[0]).real for p in points)
    assert got == pytest.approx([-1.0, 1.0], abs=1e-12)
    for p in points:
        assert np.abs(evaluate(start, p)).max() < 1e-12


def test_start_system_power_flow_sixteen_corners():
    target = build_pf_system(complete_net(3))
    start, points = build_start_system(target, seed=0)
    assert len(points) == 16
    patterns = set()
    for p in points:
        assert np.abs(np.abs(p) - 1.0).max() < 1e-12
        assert np.abs(evaluate(start, p)).max() < 1e-12
        patterns.add(tuple(np.sign(np.real(p)).astype(int)))
    # all sign corners of {-1, +1}^4 show up exactly once
    assert patterns == set(itertools.product((-1, 1), repeat=4))


def test_identity_homotopy_stays_at_start_point():
    sys_ = PolynomialSystem([[M(1.0, (2,)), M(-1.0, (0,))]])
    h = Homotopy(start=sys_, target=sys_, gamma=1.0)
    res = track_path(h, np.array([1.0 + 0.0j]), TrackerConfig())
    assert res.status is PathStatus.FINITE
    assert abs(res.endpoint[0] - 1.0) < 1e-10


def test_two_bus_matches_closed_form():
    r, x, p, q = 0.03, 0.10, 0.5, 0.3
    sols = solve_all(build_pf_system(two_bus_net(r, x, p, q)), TrackerConfig())
    check_accounting(sols)
    assert sols.num_finite_complex == 2
    assert sols.num_real == 2
    assert sols.certified
    _, pairs = two_bus_voltages(r, x, p, q)
    for vd, vq in pairs:
        target = np.array([vd, vq], dtype=complex)
        assert min(np.abs(s - target).max() for s in sols.finite) < 1e-8
    for res in sols.path_results:
        if res.status is PathStatus.FINITE:
            assert res.final_residual < TrackerConfig().corrector_tol


def test_two_bus_past_loadability():
    r, x, p, q = 0.03, 0.10, 6.0, 4.0
    disc, pairs = two_bus_voltages(r, x, p, q)
    assert disc < 0.0 and not pairs
    sols = solve_all(build_pf_system(two_bus_net(r, x, p, q)), TrackerConfig())
    check_accounting(sols)
    assert sols.num_real == 0
    assert sols.num_finite_complex == 2
    a, b = sols.finite
    assert np.abs(np.conj(a) - b).max() < 1e-8


def test_two_real_quadrics_four_corners():
    sys_ = PolynomialSystem([[M(1.0, (2, 0)), M(-1.0, (0, 0))],
                             [M(1.0, (0, 2)), M(-1.0, (0, 0))]])
    sols = solve_all(sys_, TrackerConfig())
    check_accounting(sols)
    assert sols.num_finite_complex == 4
    assert sols.num_real == 4
    got = sorted((round(s[0].real), round(s[1].real)) for s in sols.finite)
    assert got == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_filter_real_excludes_imaginary_pair():
    sys_ = PolynomialSystem([[M(1.0, (2,)), M(1.0, (0,))]])
    sols = solve_all(sys_, TrackerConfig())
    assert sols.num_finite_complex == 2
    assert sols.num_real == 0
    assert filter_real(sols, 1e-6) == []


def test_complete_three_bus_attains_kappa():
    k3 = Graph(3, frozenset({(1, 2), (1, 3), (2, 3)}))
    counts = []
    for seed in range(8):
        net = generate_case_on_topology(GenConfig(n_buses=3, seed=seed), k3)
        sols = solve_all(build_pf_system(net), TrackerConfig(seed=seed))
        check_accounting(sols)
        if sols.certified:
            check_conjugate_closure(sols, 10 * TrackerConfig().dedup_tol)
            counts.append(sols.num_finite_complex)
    assert counts
    assert max(counts) == kappa(3) == 6
    assert all(c <= 6 for c in counts)


def test_zero_injection_symmetric_counts():
    # Identical branches make the solution set partly positive-dimensional
    # for n=4; the distinct real endpoints are still exactly 2^(n-1).
    sols3 = solve_all(build_pf_system(complete_net(3)), TrackerConfig())
    check_accounting(sols3)
    assert sols3.num_real == 4
    assert sols3.num_finite_complex == 6
    oracle = zero_injection_roots(complete_net(3))
    assert len(oracle) == 6
    for root in oracle:
        assert min(np.abs(root - s).max() for s in sols3.finite) < 1e-6

    sols4 = solve_all(build_pf_system(complete_net(4)), TrackerConfig())
    check_accounting(sols4)
    assert sols4.num_real == 8


def test_zero_injection_generic_k4_finds_all_twenty():
    rng = np.random.default_rng(42)
    rs = list(0.02 + 0.04 * rng.random(6))
    xs = list(0.06 + 0.09 * rng.random(6))
    net = complete_net(4, rs=rs, xs=xs)
    sys_ = build_pf_system(net)
    oracle = zero_injection_roots(net)
    assert len(oracle) == 20
    for root in oracle:
        assert np.abs(evaluate(sys_, root)).max() < 1e-10
    sols = solve_all(sys_, TrackerConfig())
    check_accounting(sols)
    assert sols.certified
    assert sols.num_singular == 0
    assert sols.num_finite_complex == 20 == kappa(4)
    assert sols.num_real == 8
    for root in oracle:
        assert min(np.abs(root - s).max() for s in sols.finite) < 1e-6


def test_determinism_across_thread_counts():
    sys_ = build_pf_system(
        generate_case_on_topology(GenConfig(n_buses=3, seed=17),
                                  Graph(3, frozenset({(1, 2), (1, 3), (2, 3)}))))
    serial = solve_all(sys_, TrackerConfig(seed=2), threads=1)
    threaded = solve_all(sys_, TrackerConfig(seed=2), threads=4)
    assert serial.gamma == threaded.gamma
    assert serial.num_finite_complex == threaded.num_finite_complex
    assert len(serial.finite) == len(threaded.finite)
    for a, b in zip(serial.finite, threaded.finite):
        assert np.array_equal(a, b)
    assert [r.status for r in serial.path_results] == \
           [r.status for r in threaded.path_results]


def test_backends_agree(monkeypatch):
    net = generate_case_on_topology(GenConfig(n_buses=3, seed=5),
                                    Graph(3, frozenset({(1, 2), (1, 3), (2, 3)})))
    sys_ = build_pf_system(net)
    default = solve_all(sys_, TrackerConfig(seed=5))
    monkeypatch.setenv("GRIDROOTS_BACKEND", "numpy")
    plain = solve_all(sys_, TrackerConfig(seed=5))
    assert default.num_finite_complex == plain.num_finite_complex
    assert default.num_real == plain.num_real
    for a, b in zip(default.finite, plain.finite):
        assert np.abs(a - b).max() < 1e-10
