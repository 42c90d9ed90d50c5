"""Cyclic-subspace construction and QSL-normalized charging rates.

The orbit of a time-independent generator from a fixed initial state spans a
cyclic subspace equal to the Krylov space of (H, psi0).  Both speed-limit
branches are evaluated on that dynamical support: the energy-uncertainty
branch uses Delta H in the initial state, and the mean-energy branch
measures the initial energy above the *restricted* ground energy, i.e. the
smallest eigenvalue of H compressed to the cyclic subspace.  Spectrum
outside the subspace is never populated by the orbit and must not shift the
mean-energy offset; computing from the compressed matrix guarantees that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dynamics import ChargingEvent, Propagator, fs_speed
from .numkit import as_operator, as_state
from .tolerances import DEFAULT

__all__ = ["CyclicFrame", "cyclic_frame", "QslReport", "qsl_report"]


@dataclass(frozen=True)
class CyclicFrame:
    """Orthonormal basis of the cyclic subspace plus the compressed Hamiltonian."""

    basis: np.ndarray         # (d, dim_k), orthonormal columns; column 0 is psi0
    restricted_h: np.ndarray  # (dim_k, dim_k) Hermitian compression of H
    e_min_k: float            # smallest eigenvalue of restricted_h

    @property
    def dim_k(self) -> int:
        return self.basis.shape[1]


def cyclic_frame(
    h: Union[np.ndarray, Propagator],
    psi0: np.ndarray,
    tol: float = DEFAULT.krylov,
) -> CyclicFrame:
    """Krylov realization of the cyclic subspace span{H^j psi0}.

    Vectors psi0, H psi0, H^2 psi0, ... are orthonormalized with full
    reorthogonalization; iteration stops when the component of H b_k
    orthogonal to the running basis drops below ``tol`` relative to
    ||H b_k||.  The subspace dimension never exceeds the number of distinct
    eigenvalues of H carrying overlap with psi0.
    """
    matrix = h.matrix if isinstance(h, Propagator) else as_operator(h)
    psi0 = as_state(psi0)
    d = matrix.shape[0]
    if psi0.size != d:
        raise ValueError(f"state dimension {psi0.size} does not match operator {d}")
    nrm = float(np.linalg.norm(psi0))
    if nrm == 0.0:
        raise ValueError("initial state must be nonzero")

    basis = np.zeros((d, d), dtype=complex)
    basis[:, 0] = psi0 / nrm
    k = 1
    while k < d:
        w = matrix @ basis[:, k - 1]
        scale = float(np.linalg.norm(w))
        if scale == 0.0:
            break
        view = basis[:, :k]
        for _ in range(2):
            w -= view @ (view.conj().T @ w)
        residual = float(np.linalg.norm(w))
        if residual <= tol * scale:
            break
        basis[:, k] = w / residual
        k += 1

    frame = basis[:, :k].copy()
    hk = frame.conj().T @ (matrix @ frame)
    hk = (hk + hk.conj().T) / 2.0
    e_min = float(np.linalg.eigvalsh(hk)[0])
    return CyclicFrame(basis=frame, restricted_h=hk, e_min_k=e_min)


@dataclass(frozen=True)
class QslReport:
    """Speed-limit scalars for one charging orbit.

    ``degenerate`` marks stationary orbits (psi0 an eigenstate): the energy
    uncertainty and restricted mean energy vanish, so no finite speed-limit
    times or rate exist and the tau/eta fields are None.
    """

    delta_h: float
    e_ml: float
    tau_mt: Optional[float]
    tau_ml: Optional[float]
    tau_qsl: Optional[float]
    t_charge: Optional[float]
    eta: Optional[float]
    dim_k: int
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "delta_h": self.delta_h,
            "e_ml": self.e_ml,
            "tau_mt": self.tau_mt,
            "tau_ml": self.tau_ml,
            "tau_qsl": self.tau_qsl,
            "t_charge": self.t_charge,
            "eta": self.eta,
            "dim_k": self.dim_k,
            "degenerate": self.degenerate,
        }


def qsl_report(
    h: Union[np.ndarray, Propagator],
    psi0: np.ndarray,
    event: Optional[ChargingEvent] = None,
    *,
    krylov_tol: float = DEFAULT.krylov,
) -> QslReport:
    """Energy scales, speed-limit times, and the QSL-normalized rate.

    delta_h is the initial energy uncertainty; e_ml is the initial mean
    energy above the cyclic-subspace ground energy.  tau_mt = pi/(2 delta_h),
    tau_ml = pi/(2 e_ml), tau_qsl = max of the two, and eta = tau_qsl / T for
    the charging time of ``event`` (eta and t_charge are None without one).
    """
    prop_or_matrix = h
    matrix = h.matrix if isinstance(h, Propagator) else as_operator(h)
    psi0 = as_state(psi0)
    delta_h = fs_speed(prop_or_matrix, psi0)
    frame = cyclic_frame(matrix, psi0, krylov_tol)
    mean_energy = float(np.vdot(psi0, matrix @ psi0).real)
    e_ml = mean_energy - frame.e_min_k

    if frame.dim_k == 1 or delta_h <= 0.0 or e_ml <= 0.0:
        return QslReport(
            delta_h=delta_h, e_ml=e_ml, tau_mt=None, tau_ml=None, tau_qsl=None,
            t_charge=None, eta=None, dim_k=frame.dim_k, degenerate=True,
        )

    tau_mt = math.pi / (2.0 * delta_h)
    tau_ml = math.pi / (2.0 * e_ml)
    tau_qsl = max(tau_mt, tau_ml)
    t_charge = event.t_charge if event is not None else None
    eta = (tau_qsl / t_charge) if t_charge else None
    return QslReport(
        delta_h=delta_h, e_ml=e_ml, tau_mt=tau_mt, tau_ml=tau_ml, tau_qsl=tau_qsl,
        t_charge=t_charge, eta=eta, dim_k=frame.dim_k, degenerate=False,
    )
