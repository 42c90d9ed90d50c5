"""Battery Hamiltonians, endpoint states, partitions, and block-flip generators.

The energy-storage register is N two-level cells with level splitting omega
(hbar = 1).  Charging drives the all-down state to the all-up state; the
stored energy on a basis state is omega times its number of up spins.

Cluster-flip generators rotate each block of a partition coherently between
its local all-down and all-up states and act as zero on everything else in
the block.  With coupling g = pi/(2T) the product of block flips charges the
register completely at time T.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .numkit import as_operator, as_state

__all__ = [
    "MAX_QUBITS",
    "BatterySpec",
    "BlockPartition",
    "ClusterFlipSpec",
    "battery_hamiltonian",
    "endpoint_states",
    "balanced_partition",
    "block_flip_operator",
    "cluster_flip_hamiltonian",
    "embed_block_operator",
    "embed_with_spectator",
    "hamiltonian_from_json",
    "hamiltonian_to_json",
    "load_hamiltonian_file",
]

# Dense-size guard: dim 4096 keeps O(dim^3) eigensolves at desk scale.
MAX_QUBITS = 12


def _check_size(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"qubit count {n} exceeds the dense-size guard of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class BatterySpec:
    """Register size and single-cell level splitting omega > 0."""

    n: int
    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"qubit count must be >= 1, got {self.n}")
        if not (self.omega > 0):
            raise ValueError(f"level splitting must be positive, got {self.omega}")


@dataclass(frozen=True)
class BlockPartition:
    """Ordered disjoint blocks of 1-based qubit indices covering 1..n."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(int(q) for q in b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if any(len(b) == 0 for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        flat = sorted(q for b in blocks for q in b)
        if not flat or flat != list(range(1, len(flat) + 1)):
            raise ValueError(f"blocks must be disjoint and cover 1..n, got {blocks}")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def max_block_size(self) -> int:
        return max(self.sizes)

    def to_index_lists(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


@dataclass(frozen=True)
class ClusterFlipSpec:
    """Partition plus coupling g and charging time T with g*T = pi/2."""

    partition: BlockPartition
    g: float
    t_charge: float

    def __post_init__(self) -> None:
        if not (self.t_charge > 0):
            raise ValueError(f"charging time must be positive, got {self.t_charge}")
        if abs(self.g * self.t_charge - math.pi / 2) > 1e-12:
            raise ValueError(
                f"g*T must equal pi/2 within 1e-12, got g*T = {self.g * self.t_charge!r}"
            )

    @classmethod
    def balanced(cls, n: int, m: int, t_charge: float = 1.0) -> "ClusterFlipSpec":
        return cls(balanced_partition(n, m), math.pi / (2 * t_charge), t_charge)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def battery_hamiltonian(spec: BatterySpec) -> np.ndarray:
    """Diagonal storage Hamiltonian: basis state with w up spins has energy omega*w."""
    n = _check_size(spec.n)
    weights = np.array([b.bit_count() for b in range(1 << n)], dtype=float)
    return np.diag(spec.omega * weights).astype(complex)


def endpoint_states(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The all-down and all-up computational basis states (exactly orthogonal)."""
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    dim = 1 << n
    psi_down = np.zeros(dim, dtype=complex)
    psi_down[0] = 1.0
    psi_up = np.zeros(dim, dtype=complex)
    psi_up[dim - 1] = 1.0
    return psi_down, psi_up


def balanced_partition(n: int, m: int) -> BlockPartition:
    """Contiguous partition into m blocks of sizes floor(n/m) or ceil(n/m).

    Deterministic: larger blocks come first, indices run contiguously from
    qubit 1.  The physics is permutation invariant; fixing the assignment
    keeps tests reproducible.
    """
    if not 1 <= m <= n:
        raise ValueError(f"block count must satisfy 1 <= m <= n, got m={m}, n={n}")
    base, extra = divmod(n, m)
    sizes = [base + 1] * extra + [base] * (m - extra)
    blocks: list[tuple[int, ...]] = []
    start = 1
    for s in sizes:
        blocks.append(tuple(range(start, start + s)))
        start += s
    return BlockPartition(tuple(blocks))


def _block_mask(block: Sequence[int], n: int) -> int:
    mask = 0
    for q in block:
        if not 1 <= q <= n:
            raise ValueError(f"qubit index {q} out of range 1..{n}")
        mask |= 1 << (n - q)
    return mask


def block_flip_operator(block: Sequence[int], n: int) -> np.ndarray:
    """Full-register flip |U><D| + |D><U| between the block's all-down and all-up states.

    The operator is zero on the block's orthogonal complement and acts as the
    identity on all other qubits: every basis state whose block bits are all
    down is coupled to its partner with the block bits all up.
    """
    _check_size(n)
    mask = _block_mask(block, n)
    dim = 1 << n
    idx = np.arange(dim)
    down = idx[(idx & mask) == 0]
    up = down | mask
    x = np.zeros((dim, dim), dtype=complex)
    x[up, down] = 1.0
    x[down, up] = 1.0
    return x


def cluster_flip_hamiltonian(spec: ClusterFlipSpec) -> np.ndarray:
    """Sum of block flips, g * sum_mu X_mu, for the spec's partition."""
    n = spec.partition.n
    _check_size(n)
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for block in spec.partition.blocks:
        h += block_flip_operator(block, n)
    return spec.g * h


def embed_block_operator(op: np.ndarray, block: Sequence[int], n: int) -> np.ndarray:
    """Lift an operator on the block's qubits (ascending order) to the full register."""
    op = as_operator(op)
    block = tuple(sorted(int(q) for q in block))
    s = len(block)
    if op.shape[0] != (1 << s):
        raise ValueError(f"operator dimension {op.shape[0]} does not match block size {s}")
    _block_mask(block, n)  # range validation
    rest = [q for q in range(1, n + 1) if q not in set(block)]
    full = np.kron(op, np.eye(1 << (n - s), dtype=complex))
    # Tensor axes currently follow block + rest; permute to natural qubit order.
    pos = {q: i for i, q in enumerate(list(block) + rest)}
    perm = [pos[q] for q in range(1, n + 1)]
    tensor = full.reshape((2,) * (2 * n))
    tensor = tensor.transpose(perm + [n + p for p in perm])
    return np.ascontiguousarray(tensor.reshape(1 << n, 1 << n))


def embed_with_spectator(
    h: np.ndarray, psi0: np.ndarray, extra_levels: Iterable[float]
) -> tuple[np.ndarray, np.ndarray]:
    """Direct-sum extra diagonal energy levels that the orbit never populates.

    Returns ``(h ⊕ diag(extra_levels), psi0 padded with zeros)``.  Because the
    extension is block diagonal and the padded amplitudes are exactly zero,
    the orbit, the charging time, and the cyclic subspace are unchanged.
    """
    h = as_operator(h)
    psi0 = as_state(psi0)
    if psi0.size != h.shape[0]:
        raise ValueError(f"state dimension {psi0.size} does not match operator {h.shape[0]}")
    extra = np.asarray(list(extra_levels), dtype=float)
    if extra.size and not np.all(np.isfinite(extra)):
        raise ValueError("extra levels must be finite")
    d = h.shape[0]
    d_ext = d + extra.size
    h_ext = np.zeros((d_ext, d_ext), dtype=complex)
    h_ext[:d, :d] = h
    h_ext[np.arange(d, d_ext), np.arange(d, d_ext)] = extra
    psi_ext = np.zeros(d_ext, dtype=complex)
    psi_ext[:d] = psi0
    return h_ext, psi_ext


# ---------------------------------------------------------------------------
# JSON wire format for Hamiltonian specs
# ---------------------------------------------------------------------------
#
#   {"type": "cluster_flip", "n": 8, "m": 2, "T": 1.0}        (g = pi/(2T) implied)
#   {"type": "cluster_flip", "n": 8, "m": 2, "g": 1.5708}     (T = pi/(2g) implied)
#   {"type": "battery", "n": 4, "omega": 1.0}
#   {"type": "custom_dense", "n": 2, "matrix": [[[re, im], ...], ...]}   (row-major)

def hamiltonian_from_json(doc: dict) -> tuple[np.ndarray, dict]:
    """Build a Hamiltonian from its JSON spec; returns (matrix, normalized spec)."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValueError("hamiltonian spec must be an object with a 'type' field")
    kind = doc["type"]
    if kind == "cluster_flip":
        n = int(doc["n"])
        m = int(doc["m"])
        g = doc.get("g")
        t = doc.get("T")
        if g is None and t is None:
            raise ValueError("cluster_flip spec needs 'g' or 'T'")
        if t is None:
            t = math.pi / (2 * float(g))
        if g is None:
            g = math.pi / (2 * float(t))
        spec = ClusterFlipSpec(balanced_partition(n, m), float(g), float(t))
        return cluster_flip_hamiltonian(spec), {
            "type": "cluster_flip", "n": n, "m": m, "g": float(g), "T": float(t),
        }
    if kind == "battery":
        n = int(doc["n"])
        omega = float(doc.get("omega", 1.0))
        return battery_hamiltonian(BatterySpec(n, omega)), {
            "type": "battery", "n": n, "omega": omega,
        }
    if kind == "custom_dense":
        n = int(doc["n"])
        rows = doc["matrix"]
        dim = 1 << n
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError(f"custom_dense matrix must be {dim}x{dim} for n={n}")
        h = np.array(
            [[complex(entry[0], entry[1]) for entry in row] for row in rows],
            dtype=complex,
        )
        return as_operator(h), {"type": "custom_dense", "n": n, "matrix": rows}
    raise ValueError(f"unknown hamiltonian type {kind!r}")


def hamiltonian_to_json(kind: str, **fields) -> dict:
    """Normalize a Hamiltonian spec dict (round-trips through hamiltonian_from_json)."""
    doc = {"type": kind, **fields}
    _, normalized = hamiltonian_from_json(doc)
    return normalized


def load_hamiltonian_file(path: str) -> tuple[np.ndarray, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return hamiltonian_from_json(json.load(fh))
