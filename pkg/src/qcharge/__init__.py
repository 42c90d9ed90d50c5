"""qcharge: complete-quantum-charging simulation and depth certification.

A dense-state-vector toolkit for N-qubit charging orbits: spectral time
evolution, first-complete-charging detection, QSL-normalized rates on the
cyclic subspace, trajectory entanglement depth, and the exact integer
staircase linking the two.
"""

from .depth import (
    DepthProfile,
    Factorization,
    extract_block_state,
    finest_factorization,
    is_product_across,
    min_depth_exhaustive,
    trajectory_depth,
)
from .dynamics import (
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
from .frontier import (
    Certificate,
    FrontierPoint,
    certified_depth,
    default_eta_grid,
    eta_max,
    randomized_product_fleet,
    run_verification_suite,
    staircase_curve,
    verify_saturation,
)
from .model import (
    BatterySpec,
    BlockPartition,
    ClusterFlipSpec,
    balanced_partition,
    battery_hamiltonian,
    block_flip_operator,
    cluster_flip_hamiltonian,
    embed_with_spectator,
    endpoint_states,
)
from .numkit import (
    gram_schmidt_extend,
    hermitian_eigendecomposition,
    partial_trace,
    purity,
    reduced_purity,
)
from .qsl import CyclicFrame, QslReport, cyclic_frame, qsl_report
from .tolerances import DEFAULT, Tolerances, with_overrides

__version__ = "0.1.0"

__all__ = [
    "BatterySpec",
    "BlockPartition",
    "Certificate",
    "ChargingEvent",
    "ClusterFlipSpec",
    "CyclicFrame",
    "DEFAULT",
    "DepthProfile",
    "Factorization",
    "FrontierPoint",
    "NotCharged",
    "Propagator",
    "QslReport",
    "Tolerances",
    "balanced_partition",
    "battery_hamiltonian",
    "block_flip_operator",
    "block_path_lengths",
    "block_speeds",
    "certified_depth",
    "charging_curve",
    "cluster_flip_hamiltonian",
    "cyclic_frame",
    "default_eta_grid",
    "embed_with_spectator",
    "endpoint_states",
    "eta_max",
    "evolve",
    "extract_block_state",
    "find_complete_charging_time",
    "finest_factorization",
    "fs_speed",
    "gram_schmidt_extend",
    "hermitian_eigendecomposition",
    "is_product_across",
    "min_depth_exhaustive",
    "partial_trace",
    "path_length",
    "purity",
    "qsl_report",
    "randomized_product_fleet",
    "reduced_purity",
    "run_verification_suite",
    "staircase_curve",
    "trajectory_depth",
    "verify_saturation",
    "with_overrides",
]
