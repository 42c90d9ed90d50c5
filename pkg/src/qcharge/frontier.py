"""The integer speed-depth staircase: exact formulas, certificates, verification.

For an N-cell register charged completely by a trajectory of entanglement
depth at most k, the QSL-normalized rate eta = tau_qsl / T can reach at most
1/sqrt(ceil(N/k)); conversely an observed rate certifies trajectory depth at
least ceil(N / floor(eta^-2)).  Both directions are integer-exact, so the
certified depth is a staircase in eta with jumps exactly at eta = 1/sqrt(m).

Floating-point rates measured from simulations land on those jump points to
roundoff, so the integer arithmetic snaps eta^-2 (and N*eta^2) onto integers
within a relative window before flooring/ceiling.

This module also hosts the numerical verification harness: balanced
cluster-flip saturation sweeps, a randomized fleet of product-block
trajectories probing the upper bound, spectator-spectrum invariance, orbit
geometry, the exhaustive depth oracle, and pure-integer duality checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from .depth import (
    finest_factorization,
    min_depth_exhaustive,
    reconstruct_from_blocks,
    trajectory_depth,
)
from .dynamics import (
    ChargingEvent,
    NotCharged,
    Propagator,
    block_path_lengths,
    block_speeds,
    find_complete_charging_time,
    fs_speed,
    path_length,
)
from .model import (
    BlockPartition,
    ClusterFlipSpec,
    balanced_partition,
    block_flip_operator,
    cluster_flip_hamiltonian,
    embed_block_operator,
    embed_with_spectator,
    endpoint_states,
)
from .qsl import QslReport, qsl_report
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "FrontierPoint",
    "Certificate",
    "eta_max",
    "frontier_point",
    "certified_depth",
    "default_eta_grid",
    "staircase_curve",
    "CheckResult",
    "SaturationReport",
    "verify_saturation",
    "saturation_sweep",
    "TrialResult",
    "FleetReport",
    "randomized_product_fleet",
    "random_ghz_product_state",
    "spectator_invariance_check",
    "geometry_checks",
    "oracle_equivalence_check",
    "duality_check",
    "staircase_integer_checks",
    "SuiteReport",
    "run_verification_suite",
]


# ---------------------------------------------------------------------------
# Exact staircase formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrontierPoint:
    """Largest admissible rate for a given depth cap."""

    n: int
    k: int
    m_blocks: int
    eta_max: float


@dataclass(frozen=True)
class Certificate:
    """Depth certificate read off an observed QSL-normalized rate."""

    n: int
    eta_observed: float
    m_max: int          # floor(eta^-2): max independently orthogonalizing blocks
    depth_certified: int
    smooth_bound: int   # ceil(n * eta^2), always <= depth_certified
    genuine_npartite: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eta_observed": self.eta_observed,
            "m_max": self.m_max,
            "depth_certified": self.depth_certified,
            "smooth_bound": self.smooth_bound,
            "genuine_npartite": self.genuine_npartite,
        }


def eta_max(n: int, k: int) -> float:
    """Largest QSL-normalized rate of a depth-<=k complete charge: 1/sqrt(ceil(n/k))."""
    n, k = int(n), int(k)
    if not 1 <= k <= n:
        raise ValueError(f"depth cap must satisfy 1 <= k <= n, got k={k}, n={n}")
    m = -(-n // k)
    return 1.0 / math.sqrt(m)


def frontier_point(n: int, k: int) -> FrontierPoint:
    value = eta_max(n, k)
    return FrontierPoint(n=int(n), k=int(k), m_blocks=-(-int(n) // int(k)), eta_max=value)


def _snap(value: float, snap_tol: float) -> float:
    rounded = round(value)
    if rounded >= 1 and abs(value - rounded) <= snap_tol * value:
        return float(rounded)
    return value


def certified_depth(n: int, eta: float, snap_tol: float = DEFAULT.snap) -> Certificate:
    """Integer depth certificate ceil(n / floor(eta^-2)) with boundary snapping.

    Rates computed numerically from saturating trajectories land on the
    staircase discontinuities 1/sqrt(m); ``snap_tol`` is the relative window
    within which eta^-2 (and n*eta^2 for the smooth bound) is treated as the
    neighbouring integer so roundoff cannot push the floor to m - 1.  Rates
    above 1 beyond the window contradict the speed limit for complete
    charging and are rejected; within the window they clamp to 1.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    eta = float(eta)
    if not eta > 0.0:
        raise ValueError(f"rate must be positive, got {eta}")
    if eta > 1.0:
        if eta <= 1.0 + snap_tol:
            eta = 1.0
        else:
            raise ValueError(
                f"rate {eta!r} exceeds 1 beyond the snap window; "
                "a complete charge cannot beat its quantum speed limit"
            )
    inv_sq = _snap(1.0 / (eta * eta), snap_tol)
    m_max = int(math.floor(inv_sq))
    depth = -(-n // m_max)
    smooth = int(math.ceil(_snap(n * eta * eta, snap_tol)))
    return Certificate(
        n=n,
        eta_observed=eta,
        m_max=m_max,
        depth_certified=depth,
        smooth_bound=smooth,
        genuine_npartite=(m_max == 1 and n > 1),
    )


def default_eta_grid(points: int = 2001) -> np.ndarray:
    """Uniform rate grid on (0, 1]: i/points for i = 1..points."""
    points = int(points)
    if points < 1:
        raise ValueError(f"grid needs at least one point, got {points}")
    return np.arange(1, points + 1, dtype=float) / points


def staircase_curve(
    n: int, eta_grid: Sequence[float], snap_tol: float = DEFAULT.snap
) -> list[tuple[float, int, int]]:
    """Pointwise certificates (eta, depth_certified, smooth_bound) over a rate grid."""
    rows = []
    for eta in eta_grid:
        cert = certified_depth(n, float(eta), snap_tol)
        rows.append((cert.eta_observed, cert.depth_certified, cert.smooth_bound))
    return rows


def _staircase_arrays(
    n: int, etas: np.ndarray, snap_tol: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Vectorized twin of certified_depth for dense integer checks.
    etas = np.asarray(etas, dtype=float)
    x = 1.0 / (etas * etas)
    xr = np.round(x)
    x = np.where((xr >= 1) & (np.abs(x - xr) <= snap_tol * x), xr, x)
    m = np.floor(x).astype(np.int64)
    depth = -(-int(n) // m)
    y = int(n) * etas * etas
    yr = np.round(y)
    y = np.where(np.abs(y - yr) <= snap_tol * y, yr, y)
    smooth = np.ceil(y).astype(np.int64)
    return m, depth, smooth


# ---------------------------------------------------------------------------
# Check bookkeeping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: object = None
    expected: object = None
    tolerance: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
        }


def _scalar_check(name, observed, expected, tolerance) -> CheckResult:
    passed = abs(observed - expected) <= tolerance
    return CheckResult(name, bool(passed), float(observed), float(expected), float(tolerance))


def _bound_check(name, observed, bound, slack) -> CheckResult:
    passed = observed <= bound + slack
    return CheckResult(name, bool(passed), float(observed), float(bound), float(slack))


# ---------------------------------------------------------------------------
# Saturating construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SaturationReport:
    """Simulation of one balanced cluster flip checked against the exact frontier."""

    n: int
    m: int
    g: float
    t_target: float
    event: Union[ChargingEvent, NotCharged]
    qsl: Optional[QslReport]
    ent_u: Optional[int]
    witness_time: Optional[float]
    certificate: Optional[Certificate]
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        charged = isinstance(self.event, ChargingEvent)
        return {
            "n": self.n,
            "m": self.m,
            "g": self.g,
            "t_target": self.t_target,
            "charged": charged,
            "t_charge": self.event.t_charge if charged else None,
            "qsl": self.qsl.to_json() if self.qsl else None,
            "ent_u": self.ent_u,
            "witness_time": self.witness_time,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def verify_saturation(
    n: int,
    m: int,
    *,
    t_charge: float = 1.0,
    samples: int = 201,
    tol: Tolerances = DEFAULT,
    eta_tol: float = 1e-9,
    rel_tol: float = 1e-10,
) -> SaturationReport:
    """Simulate the balanced m-block flip and check it saturates the frontier.

    Expected exactly: Delta H = g sqrt(m), restricted mean energy m g, first
    charging at T = pi/(2g), eta = 1/sqrt(m), trajectory depth ceil(n/m), and
    a certificate that reproduces the trajectory depth.  Failures come back
    as a structured report (this is the theorem check, so a failed assertion
    is data, not an exception).
    """
    spec = ClusterFlipSpec.balanced(n, m, t_charge)
    h = cluster_flip_hamiltonian(spec)
    prop = Propagator(h)
    psi0, target = endpoint_states(n)
    event = find_complete_charging_time(
        prop, psi0, target, 1.5 * t_charge,
        eps_c=tol.eps_c, capture_band=tol.capture_band, time_tol=tol.time_tol,
    )
    g = spec.g
    if isinstance(event, NotCharged):
        checks = (CheckResult(
            "complete_charging_detected", False,
            observed=event.best_infidelity, expected=0.0, tolerance=tol.eps_c,
        ),)
        return SaturationReport(n, m, g, t_charge, event, None, None, None, None, checks)

    report = qsl_report(prop, psi0, event, krylov_tol=tol.krylov)
    profile = trajectory_depth(prop, psi0, event.t_charge, samples, eps_p=tol.eps_p)
    cert = certified_depth(n, report.eta, tol.snap)
    expected_depth = -(-n // m)
    checks = (
        CheckResult("complete_charging_detected", True,
                    observed=event.infidelity_at_t, expected=0.0, tolerance=tol.eps_c),
        _scalar_check("eta_saturates_frontier", report.eta, 1.0 / math.sqrt(m), eta_tol),
        _scalar_check("delta_h_matches_g_sqrt_m",
                      report.delta_h, g * math.sqrt(m), rel_tol * g * math.sqrt(m)),
        _scalar_check("ml_energy_matches_m_g", report.e_ml, m * g, rel_tol * m * g),
        _scalar_check("charging_time_matches_pi_over_2g",
                      event.t_charge, t_charge, rel_tol * t_charge),
        CheckResult("trajectory_depth_matches_ceil_n_over_m",
                    profile.ent_u == expected_depth,
                    observed=profile.ent_u, expected=expected_depth),
        CheckResult("certificate_matches_trajectory_depth",
                    cert.depth_certified == profile.ent_u,
                    observed=cert.depth_certified, expected=profile.ent_u),
    )
    return SaturationReport(
        n, m, g, t_charge, event, report, profile.ent_u, profile.witness_time, cert, checks
    )


def saturation_sweep(
    n_max: int,
    *,
    n_min: int = 1,
    t_charge: float = 1.0,
    samples: int = 201,
    tol: Tolerances = DEFAULT,
) -> list[SaturationReport]:
    """verify_saturation over every (n, m) with n_min <= n <= n_max, 1 <= m <= n."""
    return [
        verify_saturation(n, m, t_charge=t_charge, samples=samples, tol=tol)
        for n in range(n_min, n_max + 1)
        for m in range(1, n + 1)
    ]


# ---------------------------------------------------------------------------
# Randomized product-block fleet (upper-bound direction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialResult:
    trial: int
    odd_multipliers: tuple[int, ...]
    with_spectator: bool
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "odd_multipliers": list(self.odd_multipliers),
            "with_spectator": self.with_spectator,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


_FLEET_CHECK_ORDER = (
    "charged_at_prescribed_time",
    "charging_event_found",
    "eta_within_block_bound",
    "ml_ratio_within_block_bound",
    "witness_sound",
    "endpoint_depths_product",
)


@dataclass(frozen=True)
class FleetReport:
    n: int
    m: int
    trials: int
    seed: int
    check_counts: tuple[tuple[str, int], ...]
    failures: tuple[TrialResult, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "check_counts": {name: count for name, count in self.check_counts},
            "failures": [t.to_json() for t in self.failures],
        }


def _in_block_spectator(size: int, g0: float, rng: np.random.Generator) -> np.ndarray:
    # Random Hermitian term supported on the block's orthogonal complement of
    # span{all-down, all-up}; rows/columns touching the flip plane are zeroed
    # exactly, so the orbit and its cyclic subspace are untouched.
    dim = 1 << size
    gin = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    herm = (gin + gin.conj().T) / 2.0
    herm[0, :] = 0.0
    herm[-1, :] = 0.0
    herm[:, 0] = 0.0
    herm[:, -1] = 0.0
    return float(g0 * rng.uniform(0.5, 2.0)) * herm


def _fleet_trial(
    n: int,
    m: int,
    trial: int,
    seed: int,
    *,
    t_charge: float,
    a_max: int,
    spectator_prob: float,
    samples: int,
    tol: Tolerances,
) -> TrialResult:
    rng = np.random.default_rng([seed, n, m, trial])
    partition = balanced_partition(n, m)
    half_flips = rng.integers(0, a_max + 1, size=m)
    multipliers = tuple(int(2 * a + 1) for a in half_flips)
    g0 = math.pi / (2.0 * t_charge)

    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for mult, block in zip(multipliers, partition.blocks):
        h += (mult * g0) * block_flip_operator(block, n)
    with_spectator = bool(rng.random() < spectator_prob) and partition.max_block_size >= 2
    if with_spectator:
        for block in partition.blocks:
            if len(block) >= 2:
                h += embed_block_operator(_in_block_spectator(len(block), g0, rng), block, n)

    prop = Propagator(h)
    psi0, target = endpoint_states(n)

    psi_end = prop.evolve(psi0, t_charge)
    infid_end = 1.0 - float(np.abs(np.vdot(target, psi_end)) ** 2)
    checks: list[CheckResult] = [CheckResult(
        "charged_at_prescribed_time", infid_end <= tol.eps_c,
        observed=infid_end, expected=0.0, tolerance=tol.eps_c,
    )]

    event = find_complete_charging_time(
        prop, psi0, target, 1.05 * t_charge,
        eps_c=tol.eps_c, capture_band=tol.capture_band, time_tol=tol.time_tol,
    )
    if isinstance(event, NotCharged):
        checks.append(CheckResult(
            "charging_event_found", False,
            observed=event.best_infidelity, expected=0.0, tolerance=tol.eps_c,
        ))
        return TrialResult(trial, multipliers, with_spectator, tuple(checks))
    checks.append(CheckResult(
        "charging_event_found", True,
        observed=event.infidelity_at_t, expected=0.0, tolerance=tol.eps_c,
    ))

    report = qsl_report(prop, psi0, event, krylov_tol=tol.krylov)
    checks.append(_bound_check(
        "eta_within_block_bound", report.eta, 1.0 / math.sqrt(m), 1e-9,
    ))
    checks.append(_bound_check(
        "ml_ratio_within_block_bound", report.tau_ml / event.t_charge, 1.0 / m, 1e-9,
    ))

    profile = trajectory_depth(prop, psi0, event.t_charge, samples, eps_p=tol.eps_p)
    cert = certified_depth(n, report.eta, tol.snap)
    checks.append(CheckResult(
        "witness_sound", profile.ent_u >= cert.depth_certified,
        observed=profile.ent_u, expected=cert.depth_certified,
    ))
    ends_product = int(profile.depths[0]) == 1 and int(profile.depths[-1]) == 1
    checks.append(CheckResult(
        "endpoint_depths_product", ends_product,
        observed=[int(profile.depths[0]), int(profile.depths[-1])], expected=[1, 1],
    ))
    return TrialResult(trial, multipliers, with_spectator, tuple(checks))


def randomized_product_fleet(
    n: int,
    m: int,
    trials: int = 200,
    seed: int = 0,
    *,
    t_charge: float = 1.0,
    a_max: int = 3,
    spectator_prob: float = 0.5,
    samples: int = 65,
    tol: Tolerances = DEFAULT,
    threads: int = 1,
) -> FleetReport:
    """Randomized product-block trajectories probing the block-count bounds.

    Each trial assigns every balanced block an independent coupling
    (2a + 1) * pi/(2T) with a drawn from 0..a_max, so every block completes
    an odd number of half flips by the common time T, and optionally adds a
    random in-block spectator term supported away from the flip plane.  The
    trial then checks complete charging at T, eta <= 1/sqrt(m), the
    mean-energy branch ratio tau_ml/T <= 1/m, witness soundness of the
    certified depth, and product endpoints.  Trial RNG streams are keyed by
    (seed, n, m, trial), so results are order-independent and reproducible.
    """
    if not 1 <= m <= n:
        raise ValueError(f"block count must satisfy 1 <= m <= n, got m={m}, n={n}")
    if n > 10:
        raise ValueError(f"fleet is limited to n <= 10, got {n}")

    def run(trial: int) -> TrialResult:
        return _fleet_trial(
            n, m, trial, seed,
            t_charge=t_charge, a_max=a_max, spectator_prob=spectator_prob,
            samples=samples, tol=tol,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(trial) for trial in range(trials)]

    counts = {name: 0 for name in _FLEET_CHECK_ORDER}
    for result in results:
        for check in result.checks:
            if check.passed:
                counts[check.name] += 1
    failures = tuple(r for r in results if not r.passed)
    return FleetReport(
        n=n, m=m, trials=trials, seed=seed,
        check_counts=tuple(counts.items()), failures=failures,
    )


# ---------------------------------------------------------------------------
# Spectator invariance
# ---------------------------------------------------------------------------

def spectator_invariance_check(
    trials: int = 20,
    seed: int = 7,
    *,
    rel_tol: float = 1e-10,
    tol: Tolerances = DEFAULT,
) -> dict:
    """Direct-sum spectator levels must leave all three QSL times unchanged.

    Half the embeddings extend balanced cluster flips, half extend random
    dense Hermitian generators; the extra levels include values far above the
    spectrum and values below the existing ground energy.
    """
    failures = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, 7001, trial])
        n = int(rng.integers(2, 6))
        psi0, _ = endpoint_states(n)
        if trial % 2 == 0:
            m = int(rng.integers(1, n + 1))
            h = cluster_flip_hamiltonian(ClusterFlipSpec.balanced(n, m, 1.0))
        else:
            dim = 1 << n
            gin = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            h = (gin + gin.conj().T) / 2.0
        base = qsl_report(h, psi0, krylov_tol=tol.krylov)

        levels = list(rng.uniform(-10.0, 10.0, size=int(rng.integers(1, 5))))
        if trial % 3 == 0:
            levels.append(1e6)
        elif trial % 3 == 1:
            levels.append(float(np.linalg.eigvalsh(h)[0]) - 5.0)
        h_ext, psi_ext = embed_with_spectator(h, psi0, levels)
        extended = qsl_report(h_ext, psi_ext, krylov_tol=tol.krylov)

        deltas = {
            "tau_mt": abs(extended.tau_mt - base.tau_mt) / base.tau_mt,
            "tau_ml": abs(extended.tau_ml - base.tau_ml) / base.tau_ml,
            "tau_qsl": abs(extended.tau_qsl - base.tau_qsl) / base.tau_qsl,
        }
        if any(d > rel_tol for d in deltas.values()):
            failures.append({"trial": trial, "n": n, "relative_shifts": deltas})
    return {
        "passed": not failures,
        "trials": trials,
        "tolerance": rel_tol,
        "failures": failures,
    }


# ---------------------------------------------------------------------------
# Orbit geometry
# ---------------------------------------------------------------------------

def geometry_checks(
    seed: int = 7,
    *,
    tol: Tolerances = DEFAULT,
    speed_rel_tol: float = 1e-10,
    path_rel_tol: float = 1e-9,
    additivity_rel_tol: float = 1e-8,
    block_length_tol: float = 1e-8,
    speed_samples: int = 64,
    block_samples: int = 65,
) -> dict:
    """Projective-geometry identities along product charging orbits.

    Checks, per case: constant speed along the orbit (time-independent
    generators), path length equal to Delta H * T, additivity of squared
    block speeds, and at least a quarter turn (pi/2) of path per
    orthogonalizing block.
    """
    cases = []
    for n, m in ((2, 1), (4, 2), (5, 2), (6, 3), (8, 4)):
        spec = ClusterFlipSpec.balanced(n, m, 1.0)
        cases.append((f"cluster_flip_n{n}_m{m}", cluster_flip_hamiltonian(spec),
                      spec.partition, 1.5))
    for idx, (n, m) in enumerate(((6, 2), (6, 3))):
        rng = np.random.default_rng([seed, 7002, idx])
        partition = balanced_partition(n, m)
        g0 = math.pi / 2.0
        h = np.zeros((1 << n, 1 << n), dtype=complex)
        for block in partition.blocks:
            mult = 2 * int(rng.integers(0, 3)) + 1
            h += (mult * g0) * block_flip_operator(block, n)
            if len(block) >= 2:
                h += embed_block_operator(_in_block_spectator(len(block), g0, rng), block, n)
        cases.append((f"odd_multiple_n{n}_m{m}", h, partition, 1.05))

    failures = []
    for name, h, partition, horizon in cases:
        n = partition.n
        prop = Propagator(h)
        psi0, target = endpoint_states(n)
        event = find_complete_charging_time(
            prop, psi0, target, horizon,
            eps_c=tol.eps_c, capture_band=tol.capture_band, time_tol=tol.time_tol,
        )
        if isinstance(event, NotCharged):
            failures.append({"case": name, "check": "charging_event_found"})
            continue
        t_end = event.t_charge
        delta_h = fs_speed(prop, psi0)

        orbit = prop.orbit(psi0)
        speed_dev = max(
            abs(fs_speed(prop, orbit.at(t)) - delta_h) / delta_h
            for t in np.linspace(0.0, t_end, speed_samples)
        )
        if speed_dev > speed_rel_tol:
            failures.append({"case": name, "check": "constant_speed", "observed": speed_dev})

        length = path_length(prop, psi0, t_end)
        path_dev = abs(length - delta_h * t_end) / (delta_h * t_end)
        if path_dev > path_rel_tol:
            failures.append({"case": name, "check": "path_length", "observed": path_dev})

        times = np.linspace(0.0, t_end, block_samples)
        samples = block_speeds(prop, psi0, times, partition,
                               eps_p=tol.eps_p, fd_step=tol.fd_step)
        total_sq = samples.total_speed**2
        additivity_dev = float(np.max(
            np.abs(total_sq - np.sum(samples.speeds**2, axis=0)) / total_sq
        ))
        if additivity_dev > additivity_rel_tol:
            failures.append(
                {"case": name, "check": "speed_additivity", "observed": additivity_dev}
            )

        lengths = block_path_lengths(samples)
        shortfall = float(np.min(lengths) - (math.pi / 2.0 - block_length_tol))
        if shortfall < 0.0:
            failures.append(
                {"case": name, "check": "block_path_length", "observed": float(np.min(lengths))}
            )
    return {"passed": not failures, "cases": len(cases), "failures": failures}


# ---------------------------------------------------------------------------
# Depth oracle equivalence
# ---------------------------------------------------------------------------

def _apply_single_qubit(psi: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    tensor = psi.reshape((2,) * n)
    rotated = np.tensordot(u, tensor, axes=([1], [qubit - 1]))
    return np.moveaxis(rotated, 0, qubit - 1).reshape(-1)


def random_ghz_product_state(
    n: int, rng: np.random.Generator
) -> tuple[np.ndarray, BlockPartition]:
    """Product of GHZ blocks over a random partition, with random local rotations.

    Single-qubit Haar rotations inside each block leave every reduced purity
    invariant, so the state's finest product partition is exactly the drawn
    partition and its depth is the largest block size.
    """
    order = [int(q) + 1 for q in rng.permutation(n)]
    blocks = []
    i = 0
    while i < n:
        size = int(rng.integers(1, n - i + 1))
        blocks.append(tuple(sorted(order[i:i + size])))
        i += size
    partition = BlockPartition(tuple(blocks))

    states = []
    for block in partition.blocks:
        s = len(block)
        ghz = np.zeros(1 << s, dtype=complex)
        ghz[0] = ghz[-1] = 1.0 / math.sqrt(2.0)
        for q in range(1, s + 1):
            ghz = _apply_single_qubit(ghz, unitary_group.rvs(2, random_state=rng), q, s)
        states.append(ghz)
    return reconstruct_from_blocks(partition, states), partition


def oracle_equivalence_check(
    states: int = 100,
    seed: int = 7,
    *,
    n_values: Sequence[int] = (2, 3, 4, 5, 6),
    eps_p: float = DEFAULT.eps_p,
) -> dict:
    """Greedy factorization must match exhaustive partition search on random states."""
    failures = []
    for idx in range(states):
        rng = np.random.default_rng([seed, 4242, idx])
        n = int(n_values[idx % len(n_values)])
        psi, partition = random_ghz_product_state(n, rng)
        greedy = finest_factorization(psi, n, eps_p).depth
        brute = min_depth_exhaustive(psi, n, eps_p)
        constructed = partition.max_block_size
        if not greedy == brute == constructed:
            failures.append({
                "state": idx, "n": n, "greedy": greedy,
                "exhaustive": brute, "constructed": constructed,
            })
    return {"passed": not failures, "states": states, "failures": failures}


# ---------------------------------------------------------------------------
# Pure-integer duality
# ---------------------------------------------------------------------------

def duality_check(
    n_max: int = 64,
    grid_points: int = 10_000,
    snap_tol: float = DEFAULT.snap,
) -> dict:
    """Integer consistency of the two staircase directions, no simulation.

    For every 1 <= k <= n <= n_max the certificate at the frontier rate must
    not exceed k (with equality when k divides n or k = n); on a dense rate
    grid the certificate must dominate the smooth bound ceil(n eta^2) and
    feeding the certified depth back into the frontier must return at least
    the original rate.
    """
    failures = []
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            cert = certified_depth(n, eta_max(n, k), snap_tol)
            if cert.depth_certified > k:
                failures.append({"n": n, "k": k, "check": "depth_exceeds_cap",
                                 "depth": cert.depth_certified})
            if (n % k == 0 or k == n) and cert.depth_certified != k:
                failures.append({"n": n, "k": k, "check": "equality_at_divisors",
                                 "depth": cert.depth_certified})

    etas = default_eta_grid(grid_points)
    for n in range(1, n_max + 1):
        _, depth, smooth = _staircase_arrays(n, etas, snap_tol)
        if not np.all(depth >= smooth):
            bad = int(np.argmin(depth >= smooth))
            failures.append({"n": n, "check": "smooth_bound_order", "eta": float(etas[bad])})
        back = 1.0 / np.sqrt(-(-n // depth))
        if not np.all(back >= etas):
            bad = int(np.argmin(back >= etas))
            failures.append({"n": n, "check": "frontier_roundtrip", "eta": float(etas[bad])})
    return {
        "passed": not failures,
        "n_max": n_max,
        "grid_points": grid_points,
        "failures": failures,
    }


def staircase_integer_checks(
    n: int = 20, grid_points: int = 2001, snap_tol: float = DEFAULT.snap
) -> dict:
    """Spot values and exact jump locations of the certified-depth staircase."""
    failures = []
    spots = [
        (1.0, n),
        (1.0 / math.sqrt(n), 1),
    ]
    for eta, expected in spots:
        got = certified_depth(n, eta, snap_tol).depth_certified
        if got != expected:
            failures.append({"check": "spot_value", "eta": eta,
                             "expected": expected, "got": got})

    # Jumps exactly at eta = 1/sqrt(m): the block count must flip between the
    # boundary value and rational-square probes on either side of it.
    for m in range(2, n + 1):
        at_boundary = certified_depth(n, math.sqrt(1.0 / m), snap_tol).m_max
        below = certified_depth(n, math.sqrt((1.0 / m + 1.0 / (m + 1)) / 2.0), snap_tol).m_max
        above = certified_depth(n, math.sqrt((1.0 / m + 1.0 / (m - 1)) / 2.0), snap_tol).m_max
        if not (at_boundary == m and below == m and above == m - 1):
            failures.append({"check": "jump_location", "m": m,
                             "at": at_boundary, "below": below, "above": above})

    curve = staircase_curve(n, default_eta_grid(grid_points), snap_tol)
    depths = [row[1] for row in curve]
    if any(d2 < d1 for d1, d2 in zip(depths, depths[1:])):
        failures.append({"check": "monotone_in_eta"})
    if any(row[1] < row[2] for row in curve):
        failures.append({"check": "smooth_bound_order"})
    return {"passed": not failures, "n": n, "grid_points": grid_points, "failures": failures}


# ---------------------------------------------------------------------------
# The full suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteReport:
    seed: int
    n_max: int
    trials: int
    passed: bool
    sections: tuple[tuple[str, dict], ...]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "n_max": self.n_max,
            "trials": self.trials,
            "passed": self.passed,
            "checks": {name: body for name, body in self.sections},
        }


_MAX_REPORTED_FAILURES = 50


def run_verification_suite(
    *,
    n_max: int = 8,
    trials: int = 100,
    seed: int = 7,
    t_charge: float = 1.0,
    tol: Tolerances = DEFAULT,
    threads: int = 1,
    fleet_samples: int = 65,
    saturation_samples: int = 201,
) -> SuiteReport:
    """Every theorem-level check in one deterministic pass.

    Sections: staircase integer spot/jump checks, the balanced saturation
    sweep, the randomized product-block fleet, spectator invariance, orbit
    geometry, depth-oracle equivalence, and pure-integer duality.  All
    randomness is keyed by ``seed``, so two runs with the same arguments
    produce identical reports.
    """
    sections: list[tuple[str, dict]] = []

    sections.append(("staircase", staircase_integer_checks(20, snap_tol=tol.snap)))

    sat_reports = saturation_sweep(
        min(n_max, 12), t_charge=t_charge, samples=saturation_samples, tol=tol
    )
    sat_failures = [r.to_json() for r in sat_reports if not r.passed]
    sections.append(("saturation", {
        "passed": not sat_failures,
        "cases": len(sat_reports),
        "failures": sat_failures[:_MAX_REPORTED_FAILURES],
    }))

    fleet_counts: dict[str, int] = {name: 0 for name in _FLEET_CHECK_ORDER}
    fleet_failures: list[dict] = []
    fleet_cases = 0
    fleet_trials_total = 0
    for n in range(1, min(n_max, 10) + 1):
        for m in range(1, n + 1):
            report = randomized_product_fleet(
                n, m, trials=trials, seed=seed,
                t_charge=t_charge, samples=fleet_samples, tol=tol, threads=threads,
            )
            fleet_cases += 1
            fleet_trials_total += report.trials
            for name, count in report.check_counts:
                fleet_counts[name] += count
            for failure in report.failures:
                doc = failure.to_json()
                doc["n"], doc["m"] = n, m
                fleet_failures.append(doc)
    sections.append(("fleet", {
        "passed": not fleet_failures,
        "cases": fleet_cases,
        "trials_per_case": trials,
        "trials": fleet_trials_total,
        "check_passes": dict(fleet_counts),
        "failures": fleet_failures[:_MAX_REPORTED_FAILURES],
    }))

    sections.append(("spectator", spectator_invariance_check(20, seed, tol=tol)))
    sections.append(("geometry", geometry_checks(seed, tol=tol)))
    sections.append(("depth_oracle", oracle_equivalence_check(100, seed, eps_p=tol.eps_p)))
    sections.append(("duality", duality_check(64, 10_000, snap_tol=tol.snap)))

    passed = all(body["passed"] for _, body in sections)
    return SuiteReport(
        seed=seed, n_max=n_max, trials=trials, passed=passed, sections=tuple(sections)
    )
