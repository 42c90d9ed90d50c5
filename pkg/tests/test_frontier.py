import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcharge.dynamics import ChargingEvent
from qcharge.frontier import (
    _staircase_arrays,
    certified_depth,
    default_eta_grid,
    duality_check,
    eta_max,
    frontier_point,
    geometry_checks,
    oracle_equivalence_check,
    randomized_product_fleet,
    run_verification_suite,
    spectator_invariance_check,
    staircase_curve,
    staircase_integer_checks,
    verify_saturation,
)


# ---------------------------------------------------------------------------
# exact formulas
# ---------------------------------------------------------------------------

def test_eta_max_spot_values():
    assert eta_max(5, 5) == 1.0
    assert eta_max(9, 1) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert eta_max(20, 7) == pytest.approx(1.0 / math.sqrt(3), rel=1e-15)


def test_eta_max_range_checks():
    with pytest.raises(ValueError):
        eta_max(4, 0)
    with pytest.raises(ValueError):
        eta_max(4, 5)


def test_frontier_point_fields():
    point = frontier_point(20, 7)
    assert point.m_blocks == 3
    assert point.eta_max == eta_max(20, 7)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=64), st.data())
def test_eta_max_monotonicity(n, data):
    k = data.draw(st.integers(min_value=1, max_value=n))
    value = eta_max(n, k)
    assert 0.0 < value <= 1.0
    if k < n:
        assert eta_max(n, k + 1) >= value  # nondecreasing in k at fixed n
    assert eta_max(n + 1, k) <= value      # nonincreasing in n at fixed k


def test_certified_depth_spot_values():
    assert certified_depth(20, 1.0).depth_certified == 20
    assert certified_depth(20, 0.72).depth_certified == 20
    assert certified_depth(20, 0.72).genuine_npartite
    assert certified_depth(20, 0.70).m_max == 2
    assert certified_depth(20, 0.70).depth_certified == 10
    assert not certified_depth(20, 0.70).genuine_npartite
    cert = certified_depth(20, 0.5)
    assert cert.m_max == 4 and cert.depth_certified == 5
    assert certified_depth(20, 1.0 / math.sqrt(20)).depth_certified == 1


def test_certified_depth_rejections_and_clamp():
    with pytest.raises(ValueError):
        certified_depth(20, 0.0)
    with pytest.raises(ValueError):
        certified_depth(20, -0.2)
    with pytest.raises(ValueError, match="speed limit"):
        certified_depth(20, 1.01)
    clamped = certified_depth(20, 1.0 + 1e-10)
    assert clamped.eta_observed == 1.0 and clamped.depth_certified == 20


def test_certificate_smooth_bound_ordering():
    for eta in default_eta_grid(997):
        cert = certified_depth(17, float(eta))
        assert cert.depth_certified >= cert.smooth_bound


def test_no_genuine_claim_for_single_cell():
    assert not certified_depth(1, 1.0).genuine_npartite
    assert certified_depth(2, 0.9).genuine_npartite


@pytest.mark.parametrize("m", range(1, 51))
def test_snapping_at_staircase_boundaries(m):
    # the numerically computed boundary rate must land on block count m
    assert certified_depth(100, 1.0 / math.sqrt(m)).m_max == m


def test_staircase_curve_matches_pointwise_certificates():
    grid = default_eta_grid(101)
    curve = staircase_curve(12, grid)
    for eta, depth, smooth in curve[::7]:
        cert = certified_depth(12, eta)
        assert (depth, smooth) == (cert.depth_certified, cert.smooth_bound)


def test_staircase_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    etas = rng.uniform(0.05, 1.0, size=200)
    m_arr, depth_arr, smooth_arr = _staircase_arrays(14, etas, 1e-9)
    for eta, m, d, s in zip(etas, m_arr, depth_arr, smooth_arr):
        cert = certified_depth(14, float(eta))
        assert (cert.m_max, cert.depth_certified, cert.smooth_bound) == (m, d, s)


def test_staircase_jump_just_below_half_rate():
    # eta slightly below 1/sqrt(2) certifies only ceil(n/2)
    assert certified_depth(20, 0.707).depth_certified == 10


def test_integer_check_sections():
    assert staircase_integer_checks(20)["passed"]
    assert duality_check(16, 1000)["passed"]


# ---------------------------------------------------------------------------
# simulation-backed checks
# ---------------------------------------------------------------------------

def test_verify_saturation_small():
    report = verify_saturation(6, 2)
    assert report.passed
    assert isinstance(report.event, ChargingEvent)
    assert report.ent_u == 3
    assert report.certificate.depth_certified == 3
    doc = report.to_json()
    assert doc["passed"] and doc["qsl"]["dim_k"] == 3


def test_verify_saturation_single_cell():
    report = verify_saturation(1, 1)
    assert report.passed
    assert report.ent_u == 1
    assert report.qsl.eta == pytest.approx(1.0, abs=1e-9)


def test_fleet_small_and_deterministic():
    report = randomized_product_fleet(4, 2, trials=6, seed=11)
    assert report.passed
    again = randomized_product_fleet(4, 2, trials=6, seed=11)
    assert report.to_json() == again.to_json()
    counts = dict(report.check_counts)
    assert counts["eta_within_block_bound"] == 6
    assert counts["witness_sound"] == 6


def test_fleet_saturates_with_zero_extra_half_flips():
    report = randomized_product_fleet(4, 2, trials=4, seed=5, a_max=0, spectator_prob=0.0)
    assert report.passed


def test_fleet_threads_match_serial():
    serial = randomized_product_fleet(4, 2, trials=6, seed=3)
    threaded = randomized_product_fleet(4, 2, trials=6, seed=3, threads=4)
    assert serial.to_json() == threaded.to_json()


def test_fleet_range_guard():
    with pytest.raises(ValueError):
        randomized_product_fleet(11, 2, trials=1, seed=0)


def test_spectator_section_small():
    assert spectator_invariance_check(trials=4, seed=7)["passed"]


def test_oracle_section_small():
    assert oracle_equivalence_check(states=10, seed=7)["passed"]


def test_suite_runs_and_serializes():
    suite = run_verification_suite(n_max=2, trials=2, seed=7)
    assert suite.passed
    doc = suite.to_json()
    assert set(doc["checks"]) == {
        "staircase", "saturation", "fleet", "spectator",
        "geometry", "depth_oracle", "duality",
    }
    again = run_verification_suite(n_max=2, trials=2, seed=7)
    assert doc == again.to_json()
