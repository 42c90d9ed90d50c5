import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcharge.depth import reconstruct_from_blocks
from qcharge.dynamics import (
    ChargingEvent,
    NotCharged,
    Propagator,
    block_path_lengths,
    block_speeds,
    charging_curve,
    evolve,
    find_complete_charging_time,
    fs_speed,
    path_length,
)
from qcharge.model import (
    BatterySpec,
    ClusterFlipSpec,
    battery_hamiltonian,
    cluster_flip_hamiltonian,
    endpoint_states,
)


def flip_orbit_state(spec: ClusterFlipSpec, t: float) -> np.ndarray:
    """Closed-form cluster-flip orbit: each block rotates |D> -> -i|U>."""
    states = []
    for block in spec.partition.blocks:
        dim = 1 << len(block)
        phi = np.zeros(dim, dtype=complex)
        phi[0] = math.cos(spec.g * t)
        phi[dim - 1] = -1j * math.sin(spec.g * t)
        states.append(phi)
    return reconstruct_from_blocks(spec.partition, states)


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def test_evolve_at_zero_is_identity():
    spec = ClusterFlipSpec.balanced(3, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(3)
    assert_allclose(evolve(h, psi0, 0.0), psi0, atol=1e-15)


@pytest.mark.parametrize("n,m", [(2, 1), (4, 2), (5, 3)])
def test_evolve_matches_analytic_orbit(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    orbit = Propagator(h).orbit(psi0)
    for t in (0.1, 0.37, 0.5, 0.93):
        assert np.max(np.abs(orbit.at(t) - flip_orbit_state(spec, t))) <= 1e-10


@pytest.mark.parametrize("m", [1, 2, 3])
def test_endpoint_phase_is_minus_i_to_the_m(m):
    n = 2 * m
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, psi_up = endpoint_states(n)
    final = evolve(h, psi0, 1.0)
    assert_allclose(final, (-1j) ** m * psi_up, atol=1e-12)


def test_evolve_preserves_norm():
    rng = np.random.default_rng(8)
    g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    h = (g + g.conj().T) / 2
    psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    psi /= np.linalg.norm(psi)
    for t in (0.0, 0.3, 2.7, 31.4):
        assert abs(np.linalg.norm(evolve(h, psi, t)) - 1.0) <= 1e-12


def test_evolve_dimension_mismatch():
    h = np.eye(4, dtype=complex)
    with pytest.raises(ValueError, match="dimension"):
        evolve(h, np.array([1.0, 0.0], dtype=complex), 1.0)


# ---------------------------------------------------------------------------
# charging detection
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(1, 1), (4, 2), (6, 3)])
def test_cluster_flip_charges_at_t_one(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, target = endpoint_states(n)
    event = find_complete_charging_time(h, psi0, target, 1.5)
    assert isinstance(event, ChargingEvent)
    assert abs(event.t_charge - 1.0) <= 1e-10
    assert event.infidelity_at_t <= 1e-9


def test_single_qubit_rabi_half_period():
    g = 0.7
    h = g * np.array([[0, 1], [1, 0]], dtype=complex)
    psi0, target = endpoint_states(1)
    event = find_complete_charging_time(h, psi0, target, 5.0)
    expected = math.pi / (2 * g)
    assert abs(event.t_charge - expected) <= 1e-10 * expected
    # psi(T) = -i |up>, so the endpoint phase is -pi/2
    assert abs(event.phase - (-math.pi / 2)) <= 1e-8


def test_diagonal_hamiltonian_never_charges():
    h = battery_hamiltonian(BatterySpec(3, 1.0))
    psi0, target = endpoint_states(3)
    result = find_complete_charging_time(h, psi0, target, 10.0)
    assert isinstance(result, NotCharged)
    assert result.best_infidelity == pytest.approx(1.0, abs=1e-12)


def test_finds_first_of_several_charging_times():
    # multiplier-3 flip: complete charges at T/3, T, 5T/3, ...
    g = 3 * math.pi / 2
    h = g * np.array([[0, 1], [1, 0]], dtype=complex)
    psi0, target = endpoint_states(1)
    event = find_complete_charging_time(h, psi0, target, 1.2)
    assert abs(event.t_charge - 1.0 / 3.0) <= 1e-10


def test_non_normalized_target_rejected():
    h = np.array([[0, 1], [1, 0]], dtype=complex)
    psi0, target = endpoint_states(1)
    with pytest.raises(ValueError, match="normalized"):
        find_complete_charging_time(h, psi0, 2.0 * target, 1.0)


# ---------------------------------------------------------------------------
# Fubini-Study speed and path length
# ---------------------------------------------------------------------------

def test_fs_speed_vanishes_on_eigenstates():
    h = np.diag([0.0, 1.0, 3.0]).astype(complex)
    psi = np.array([0.0, 1.0, 0.0], dtype=complex)
    assert fs_speed(h, psi) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n,m", [(2, 1), (4, 2), (6, 3), (5, 5)])
def test_fs_speed_of_cluster_flip_initial_state(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    assert fs_speed(h, psi0) == pytest.approx(spec.g * math.sqrt(m), rel=1e-12)


def test_fs_speed_two_level_superposition():
    h = np.diag([0.5, 2.0]).astype(complex)
    psi = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    assert fs_speed(h, psi) == pytest.approx(1.5 / 2, rel=1e-12)


@pytest.mark.parametrize("n,m", [(1, 1), (4, 2), (6, 3)])
def test_path_length_equals_delta_h_times_t(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    length = path_length(h, psi0, 1.0)
    expected = (math.pi / 2) * math.sqrt(m)
    assert abs(length - expected) <= 1e-9 * expected


def test_path_length_zero_for_stationary_orbit():
    h = np.diag([0.0, 1.0]).astype(complex)
    psi = np.array([1.0, 0.0], dtype=complex)
    assert path_length(h, psi, 1.0) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# block speeds
# ---------------------------------------------------------------------------

def test_block_speeds_cluster_flip():
    spec = ClusterFlipSpec.balanced(4, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(4)
    times = np.linspace(0.0, 1.0, 33)
    samples = block_speeds(h, psi0, times, spec.partition)
    # each block is a two-level rotation at rate g
    assert np.max(np.abs(samples.speeds - spec.g)) <= 1e-6 * spec.g
    # squared speeds add up to the squared full speed
    total_sq = samples.total_speed**2
    assert np.max(np.abs(total_sq - np.sum(samples.speeds**2, axis=0))) <= 1e-8 * np.max(total_sq)
    # each block covers at least a quarter turn
    lengths = block_path_lengths(samples)
    assert np.all(lengths >= math.pi / 2 - 1e-8)


def test_block_speeds_rejects_non_product_sample():
    spec = ClusterFlipSpec.balanced(2, 1, 1.0)  # GHZ-type entangler
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(2)
    from qcharge.model import BlockPartition

    singles = BlockPartition(((1,), (2,)))
    with pytest.raises(ValueError, match="not product"):
        block_speeds(h, psi0, [0.5], singles)


# ---------------------------------------------------------------------------
# charging curve
# ---------------------------------------------------------------------------

def test_charging_curve_endpoints():
    n = 3
    spec = ClusterFlipSpec.balanced(n, 1, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, target = endpoint_states(n)
    battery = battery_hamiltonian(BatterySpec(n, 1.0))
    curve = charging_curve(h, psi0, target, battery, np.linspace(0.0, 1.0, 5))
    assert curve.shape == (5, 4)
    assert curve[0, 1] == pytest.approx(0.0, abs=1e-12)   # starts orthogonal
    assert curve[-1, 1] == pytest.approx(1.0, abs=1e-12)  # fully charged
    assert curve[0, 3] == pytest.approx(0.0, abs=1e-12)   # empty battery
    assert curve[-1, 3] == pytest.approx(n, rel=1e-12)    # stores N*omega
    assert np.all(curve[:, 2] >= 0.0)
