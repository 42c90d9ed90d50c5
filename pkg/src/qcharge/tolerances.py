"""Central table of numerical thresholds.

Every tolerance the library uses lives in one frozen dataclass so that a
single override (for instance from a command-line flag) propagates
consistently.  The defaults below are load-bearing: the staircase witness
rounds floating-point rates onto exact integers, so changing `snap` or
`eps_c` shifts where certified depths jump.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # matrix and basis hygiene
    hermitian: float = 1e-12          # relative entrywise |M - M^dag| bound
    orthonormal: float = 1e-12        # orthonormality of constructed bases
    gram_schmidt_drop: float = 1e-10  # post-projection norm below which a vector is dependent
    krylov: float = 1e-10             # cyclic-subspace termination, relative residual

    # complete-charging detection
    eps_c: float = 1e-9               # infidelity threshold for complete charging
    capture_band: float = 1e-2        # grid infidelity below which a dip is refined
    time_tol: float = 1e-10           # relative accuracy of the located charging time

    # entanglement depth
    eps_p: float = 1e-8               # block purity threshold certifying a product factor

    # staircase arithmetic
    snap: float = 1e-9                # relative window snapping 1/eta^2 and n*eta^2 to integers

    # trajectory geometry
    fd_step: float = 1e-6             # finite-difference step for block speeds, relative to T


DEFAULT = Tolerances()


def with_overrides(**kwargs: float) -> Tolerances:
    """Copy of the default table with the given fields replaced."""
    return dataclasses.replace(DEFAULT, **kwargs)
