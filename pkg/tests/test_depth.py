import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcharge.depth import (
    extract_block_state,
    finest_factorization,
    is_product_across,
    iter_set_partitions,
    min_depth_exhaustive,
    reconstruct_from_blocks,
    trajectory_depth,
)
from qcharge.frontier import random_ghz_product_state
from qcharge.model import (
    BlockPartition,
    ClusterFlipSpec,
    cluster_flip_hamiltonian,
    endpoint_states,
)


def ghz(n):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


# ---------------------------------------------------------------------------
# finest factorization
# ---------------------------------------------------------------------------

def test_all_down_is_fully_separable():
    for n in (1, 3, 5):
        psi0, _ = endpoint_states(n)
        fact = finest_factorization(psi0, n)
        assert fact.depth == 1
        assert fact.partition.blocks == tuple((q,) for q in range(1, n + 1))
        assert all(p >= 1 - 1e-12 for p in fact.purities)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_ghz_is_one_block(n):
    fact = finest_factorization(ghz(n), n)
    assert fact.depth == n
    assert fact.partition.blocks == (tuple(range(1, n + 1)),)


def test_cluster_flip_midpoint_has_two_blocks_of_two():
    spec = ClusterFlipSpec.balanced(4, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(4)
    from qcharge.dynamics import evolve

    psi_half = evolve(h, psi0, 0.5)
    fact = finest_factorization(psi_half, 4)
    assert fact.partition.blocks == ((1, 2), (3, 4))
    assert fact.depth == 2


def test_factorization_requires_normalized_state():
    with pytest.raises(ValueError, match="normalized"):
        finest_factorization(np.ones(4, dtype=complex), 2)


# ---------------------------------------------------------------------------
# product certificates
# ---------------------------------------------------------------------------

def test_is_product_across_ghz():
    singles = BlockPartition(((1,), (2,)))
    whole = BlockPartition(((1, 2),))
    ok, purities = is_product_across(ghz(2), singles)
    assert not ok
    assert purities == pytest.approx((0.5, 0.5), abs=1e-12)
    ok2, _ = is_product_across(ghz(2), whole)
    assert ok2


def test_certificate_monotone_under_coarsening():
    rng = np.random.default_rng(21)
    psi, partition = random_ghz_product_state(6, rng)
    ok, _ = is_product_across(psi, partition)
    assert ok
    if partition.num_blocks >= 2:
        merged = (partition.blocks[0] + partition.blocks[1],) + partition.blocks[2:]
        ok_coarse, _ = is_product_across(psi, BlockPartition(merged))
        assert ok_coarse


def test_cluster_flip_orbit_product_across_its_partition():
    spec = ClusterFlipSpec.balanced(5, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(5)
    from qcharge.dynamics import Propagator

    orbit = Propagator(h).orbit(psi0)
    for t in np.linspace(0.0, 1.0, 7):
        ok, _ = is_product_across(orbit.at(t), spec.partition)
        assert ok


# ---------------------------------------------------------------------------
# block-state extraction and reconstruction
# ---------------------------------------------------------------------------

def test_extract_block_state_product():
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0  # |down> x |up>
    phi = extract_block_state(psi, (2,), 2)
    assert_allclose(phi, [0.0, 1.0], atol=1e-12)


def test_extract_block_state_matches_orbit_formula():
    spec = ClusterFlipSpec.balanced(4, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(4)
    from qcharge.dynamics import evolve

    t = 0.3
    psi = evolve(h, psi0, t)
    phi = extract_block_state(psi, (1, 2), 4)
    expected = np.zeros(4, dtype=complex)
    expected[0] = math.cos(spec.g * t)
    expected[3] = -1j * math.sin(spec.g * t)
    overlap = abs(np.vdot(expected, phi))
    assert overlap == pytest.approx(1.0, abs=1e-10)


def test_extract_block_state_rejects_mixed_block():
    with pytest.raises(ValueError, match="not pure"):
        extract_block_state(ghz(2), (1,), 2)


def test_extraction_phase_convention():
    rng = np.random.default_rng(31)
    psi, partition = random_ghz_product_state(4, rng)
    for block in partition.blocks:
        phi = extract_block_state(psi, block, 4)
        pivot = np.argmax(np.abs(phi))
        assert phi[pivot].imag == pytest.approx(0.0, abs=1e-12)
        assert phi[pivot].real > 0


def test_reconstruction_fidelity():
    rng = np.random.default_rng(41)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        psi, _ = random_ghz_product_state(n, rng)
        fact = finest_factorization(psi, n)
        states = [extract_block_state(psi, b, n) for b in fact.partition.blocks]
        rebuilt = reconstruct_from_blocks(fact.partition, states)
        fidelity = abs(np.vdot(rebuilt, psi)) ** 2
        assert fidelity >= 1 - 10 * 1e-8


# ---------------------------------------------------------------------------
# trajectory depth
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(4, 1), (4, 2), (4, 4), (6, 3)])
def test_trajectory_depth_of_cluster_flip(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    profile = trajectory_depth(h, psi0, 1.0, samples=101)
    assert profile.ent_u == -(-n // m)
    assert profile.depths[0] == 1 and profile.depths[-1] == 1
    peak = np.argmax(profile.depths)
    assert profile.witness_time == pytest.approx(profile.times[peak])
    assert int(profile.depths[peak]) == profile.ent_u


def test_trajectory_depth_needs_three_samples():
    spec = ClusterFlipSpec.balanced(2, 1, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(2)
    with pytest.raises(ValueError, match="samples"):
        trajectory_depth(h, psi0, 1.0, samples=2)


def test_depth_profile_serialization():
    spec = ClusterFlipSpec.balanced(3, 1, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(3)
    doc = trajectory_depth(h, psi0, 1.0, samples=11).to_json()
    assert doc["ent_u"] == 3
    assert len(doc["times"]) == len(doc["depths"]) == 11
    assert doc["witness_partition"] == [[1, 2, 3]]


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def test_set_partition_counts_are_bell_numbers():
    for n, bell in ((1, 1), (2, 2), (3, 5), (4, 15), (5, 52)):
        assert sum(1 for _ in iter_set_partitions(list(range(1, n + 1)))) == bell


def test_exhaustive_depth_on_known_states():
    assert min_depth_exhaustive(ghz(4), 4) == 4
    psi0, _ = endpoint_states(4)
    assert min_depth_exhaustive(psi0, 4) == 1


def test_greedy_matches_exhaustive_on_random_products():
    rng = np.random.default_rng(51)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        psi, partition = random_ghz_product_state(n, rng)
        greedy = finest_factorization(psi, n).depth
        assert greedy == min_depth_exhaustive(psi, n) == partition.max_block_size
