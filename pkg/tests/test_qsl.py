import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcharge.dynamics import Propagator, find_complete_charging_time
from qcharge.model import (
    ClusterFlipSpec,
    cluster_flip_hamiltonian,
    embed_with_spectator,
    endpoint_states,
)
from qcharge.qsl import cyclic_frame, qsl_report


def krylov_rank_oracle(h, psi0, powers=None):
    """Independent oracle for the cyclic dimension: rank of [psi0, H psi0, H^2 psi0, ...].

    Each power vector is normalized before stacking so the rank tolerance is
    not swamped by ||H||^j growth.
    """
    d = h.shape[0]
    powers = d if powers is None else powers
    vecs = [psi0 / np.linalg.norm(psi0)]
    for _ in range(powers - 1):
        v = h @ vecs[-1]
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            break
        vecs.append(v / nrm)
    stack = np.column_stack(vecs)
    return int(np.linalg.matrix_rank(stack, tol=1e-8))


# ---------------------------------------------------------------------------
# cyclic frame
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(2, 1), (4, 2), (6, 3), (5, 5)])
def test_cyclic_dimension_is_m_plus_one(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    frame = cyclic_frame(h, psi0)
    assert frame.dim_k == m + 1
    assert frame.dim_k == krylov_rank_oracle(h, psi0)


def test_cyclic_frame_basis_properties():
    spec = ClusterFlipSpec.balanced(5, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(5)
    frame = cyclic_frame(h, psi0)
    b = frame.basis
    assert np.max(np.abs(b.conj().T @ b - np.eye(frame.dim_k))) <= 1e-10
    residual = psi0 - b @ (b.conj().T @ psi0)
    assert np.linalg.norm(residual) <= 1e-10
    # the restricted ground energy of the flip sector is -m*g
    assert frame.e_min_k == pytest.approx(-2 * spec.g, rel=1e-12)


def test_eigenstate_gives_trivial_frame_and_degenerate_report():
    h = np.diag([0.0, 1.0, 2.0]).astype(complex)
    psi = np.array([0.0, 1.0, 0.0], dtype=complex)
    frame = cyclic_frame(h, psi)
    assert frame.dim_k == 1
    report = qsl_report(h, psi)
    assert report.degenerate
    assert report.eta is None and report.tau_qsl is None


# ---------------------------------------------------------------------------
# qsl report on the saturating construction
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,m", [(4, 1), (4, 2), (4, 4), (6, 3)])
def test_qsl_report_matches_closed_forms(n, m):
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    prop = Propagator(h)
    psi0, target = endpoint_states(n)
    event = find_complete_charging_time(prop, psi0, target, 1.5)
    report = qsl_report(prop, psi0, event)
    g = spec.g
    assert report.delta_h == pytest.approx(g * math.sqrt(m), rel=1e-12)
    assert report.e_ml == pytest.approx(m * g, rel=1e-12)
    assert report.tau_mt == pytest.approx(math.pi / (2 * g * math.sqrt(m)), rel=1e-12)
    assert report.tau_ml == pytest.approx(math.pi / (2 * m * g), rel=1e-12)
    assert report.tau_qsl == max(report.tau_mt, report.tau_ml)
    assert report.eta == pytest.approx(1.0 / math.sqrt(m), abs=1e-9)
    assert report.dim_k == m + 1


def test_fully_coherent_charging_reaches_unit_rate():
    spec = ClusterFlipSpec.balanced(5, 1, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, target = endpoint_states(5)
    event = find_complete_charging_time(h, psi0, target, 1.5)
    report = qsl_report(h, psi0, event)
    assert report.eta == pytest.approx(1.0, abs=1e-9)


def test_parallel_charging_rate_is_inverse_sqrt_n():
    n = 6
    spec = ClusterFlipSpec.balanced(n, n, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, target = endpoint_states(n)
    event = find_complete_charging_time(h, psi0, target, 1.5)
    report = qsl_report(h, psi0, event)
    assert report.eta == pytest.approx(1.0 / math.sqrt(n), abs=1e-9)


@pytest.mark.parametrize("m", range(1, 7))
def test_mt_branch_dominates_on_cluster_flips(m):
    n = 6
    spec = ClusterFlipSpec.balanced(n, m, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(n)
    report = qsl_report(h, psi0)
    assert report.tau_mt >= report.tau_ml - 1e-15
    if m == 1:
        assert report.tau_mt == pytest.approx(report.tau_ml, rel=1e-12)


# ---------------------------------------------------------------------------
# spectator invariance
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("levels", [[1e6], [-25.0], [3.5, -11.0, 1e6]])
def test_spectator_levels_leave_report_unchanged(levels):
    spec = ClusterFlipSpec.balanced(4, 2, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, _ = endpoint_states(4)
    base = qsl_report(h, psi0)
    h2, psi2 = embed_with_spectator(h, psi0, levels)
    extended = qsl_report(h2, psi2)
    assert extended.dim_k == base.dim_k
    for attr in ("delta_h", "e_ml", "tau_mt", "tau_ml", "tau_qsl"):
        b, e = getattr(base, attr), getattr(extended, attr)
        assert abs(e - b) <= 1e-10 * abs(b)


def test_report_serialization_keys():
    spec = ClusterFlipSpec.balanced(2, 1, 1.0)
    h = cluster_flip_hamiltonian(spec)
    psi0, target = endpoint_states(2)
    event = find_complete_charging_time(h, psi0, target, 1.5)
    doc = qsl_report(h, psi0, event).to_json()
    assert set(doc) == {
        "delta_h", "e_ml", "tau_mt", "tau_ml", "tau_qsl",
        "t_charge", "eta", "dim_k", "degenerate",
    }
    assert doc["eta"] == pytest.approx(1.0, abs=1e-9)
