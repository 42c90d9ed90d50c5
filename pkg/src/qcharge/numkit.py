"""Dense complex linear algebra for small multi-qubit Hilbert spaces.

States are one-dimensional ``complex128`` arrays of length ``2**n`` and
operators are square ``complex128`` matrices.  Everything here is a pure
function of its inputs; nothing mutates its arguments, so values can be
shared freely across parallel workers.

Qubit-index convention (fixed once, used everywhere):

* qubits are numbered ``1..n``;
* qubit 1 is the *most significant bit* of the computational-basis index,
  so basis index ``b`` carries qubit ``j`` in bit position ``n - j``;
* bit value 0 is spin-down, bit value 1 is spin-up.  The all-down state is
  basis index 0 and the all-up state is basis index ``2**n - 1``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .tolerances import DEFAULT

__all__ = [
    "as_state",
    "as_operator",
    "infer_qubit_count",
    "hermiticity_defect",
    "require_hermitian",
    "hermitian_eigendecomposition",
    "gram_schmidt_extend",
    "partial_trace",
    "purity",
    "reduced_purity",
    "tensor_subset_purity",
]


def as_state(psi: np.ndarray) -> np.ndarray:
    """Validate and return a one-dimensional complex amplitude vector."""
    arr = np.asarray(psi, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"state must be a nonempty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError("state contains non-finite amplitudes")
    return arr


def as_operator(m: np.ndarray) -> np.ndarray:
    """Validate and return a square complex matrix."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"operator must be a nonempty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError("operator contains non-finite entries")
    return arr


def infer_qubit_count(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, rejecting non-powers of two."""
    n = int(dim).bit_length() - 1
    if n < 1 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not 2**n for any n >= 1")
    return n


# ---------------------------------------------------------------------------
# Hermitian eigenproblems
# ---------------------------------------------------------------------------

def hermiticity_defect(m: np.ndarray) -> float:
    """Relative entrywise deviation from Hermiticity, max|M - M^dag| / max|M|."""
    m = np.asarray(m)
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T))) / scale


def require_hermitian(m: np.ndarray, tol: float = DEFAULT.hermitian) -> np.ndarray:
    """Return ``m`` validated as Hermitian within the relative tolerance."""
    m = as_operator(m)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(
            f"matrix is not Hermitian: relative defect {defect:.3e} exceeds tolerance {tol:.3e}"
        )
    return m


def hermitian_eigendecomposition(
    m: np.ndarray, *, tol: float = DEFAULT.hermitian
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (real, ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(w, v)`` with ``m ~ v @ diag(w) @ v.conj().T``.  Input more than
    ``tol`` away from Hermitian (relative, entrywise) is rejected with a
    diagnostic; smaller defects are symmetrized away before solving.
    """
    m = require_hermitian(m, tol)
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w, v


# ---------------------------------------------------------------------------
# Orthonormalization
# ---------------------------------------------------------------------------

def gram_schmidt_extend(
    vectors: Iterable[np.ndarray], tol: float = DEFAULT.gram_schmidt_drop
) -> list[np.ndarray]:
    """Orthonormalize ``vectors`` in order, dropping linearly dependent ones.

    A vector whose norm after projection onto the running basis falls below
    ``tol`` is considered dependent and skipped.  Two projection passes keep
    the output orthonormal to much better than 1e-12 even for nearly
    dependent inputs.  An empty input yields an empty basis.
    """
    basis: list[np.ndarray] = []
    dim: int | None = None
    for v in vectors:
        w = as_state(v).copy()
        if dim is None:
            dim = w.size
        elif w.size != dim:
            raise ValueError(f"all vectors must share one dimension, got {w.size} != {dim}")
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        nrm = float(np.linalg.norm(w))
        if nrm < tol:
            continue
        basis.append(w / nrm)
    return basis


# ---------------------------------------------------------------------------
# Reduced density matrices
# ---------------------------------------------------------------------------

def partial_trace(psi: np.ndarray, keep: Iterable[int], n: int) -> np.ndarray:
    """Reduced density matrix of ``|psi><psi|`` on the qubits in ``keep``.

    ``keep`` holds 1-based qubit indices; the rows/columns of the result
    follow the kept qubits in ascending index order.  An empty ``keep``
    traces out everything and returns the 1x1 matrix ``[[<psi|psi>]]``.
    """
    psi = as_state(psi)
    if psi.size != (1 << n):
        raise ValueError(f"state dimension {psi.size} does not match {n} qubits")
    kept = sorted({int(q) for q in keep})
    if kept and (kept[0] < 1 or kept[-1] > n):
        raise ValueError(f"keep indices {kept} out of range 1..{n}")
    axes = tuple(q - 1 for q in kept)
    tensor = psi.reshape((2,) * n)
    rest = tuple(ax for ax in range(n) if ax not in set(axes))
    block = tensor.transpose(axes + rest).reshape(1 << len(axes), -1)
    return block @ block.conj().T


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2) of a Hermitian density matrix, computed as sum |rho_ij|^2."""
    rho = as_operator(rho)
    return float(np.vdot(rho, rho).real)


def tensor_subset_purity(tensor: np.ndarray, axes: Sequence[int]) -> float:
    """Purity of the reduced state on the given tensor axes.

    ``tensor`` is a state already reshaped to ``(2,)*n``; ``axes`` are 0-based.
    This is the hot path of factorization search: the Gram matrix is formed
    on whichever side of the bipartition is smaller, costing
    ``O(2**(n + min(k, n-k)))`` instead of building the reduced matrix.
    """
    n = tensor.ndim
    k = len(axes)
    in_subset = frozenset(axes)
    order = tuple(axes) + tuple(ax for ax in range(n) if ax not in in_subset)
    block = tensor.transpose(order).reshape(1 << k, 1 << (n - k))
    if k <= n - k:
        gram = block @ block.conj().T
    else:
        gram = block.conj().T @ block
    return float(np.vdot(gram, gram).real)


def reduced_purity(psi: np.ndarray, keep: Iterable[int], n: int) -> float:
    """Tr(rho_keep^2) for a pure state without forming the larger-side matrix."""
    psi = as_state(psi)
    if psi.size != (1 << n):
        raise ValueError(f"state dimension {psi.size} does not match {n} qubits")
    kept = sorted({int(q) for q in keep})
    if kept and (kept[0] < 1 or kept[-1] > n):
        raise ValueError(f"keep indices {kept} out of range 1..{n}")
    return tensor_subset_purity(psi.reshape((2,) * n), tuple(q - 1 for q in kept))
