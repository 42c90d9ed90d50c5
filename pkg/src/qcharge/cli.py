"""Command-line interface.

Subcommands
-----------
staircase   emit the certified-depth staircase for a register size
simulate    run one charging simulation end to end (event, QSL report,
            depth profile, certificate) from a cluster-flip spec or a
            Hamiltonian JSON file
certify     turn an observed rate into an entanglement-depth certificate
verify      run the full numerical verification suite
sweep       saturation sweep over (n, m) pairs

Exit codes: 0 completed (a NotCharged simulation is a completed run),
1 validation or assertion failure, 2 usage error.  Figures are rendered
with --plot next to the delimited output.  All floating-point output uses
17 significant digits, and identical invocations (including --seed)
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import frontier, plotting
from .dynamics import (
    ChargingEvent,
    Propagator,
    charging_curve,
    find_complete_charging_time,
)
from .depth import trajectory_depth
from .model import (
    BatterySpec,
    battery_hamiltonian,
    endpoint_states,
    hamiltonian_from_json,
    load_hamiltonian_file,
)
from .qsl import qsl_report
from .reporting import dumps_json, format_float, with_schema, write_csv, write_text
from .tolerances import DEFAULT, with_overrides

_PLOT_AUTO = "__auto__"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_tolerance_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("tolerances")
    group.add_argument("--eps-c", type=float, default=DEFAULT.eps_c,
                       help="complete-charging infidelity threshold")
    group.add_argument("--eps-p", type=float, default=DEFAULT.eps_p,
                       help="block purity threshold for product factors")
    group.add_argument("--snap-tol", type=float, default=DEFAULT.snap,
                       help="relative integer-snapping window for the staircase")
    group.add_argument("--krylov-tol", type=float, default=DEFAULT.krylov,
                       help="cyclic-subspace termination residual")
    group.add_argument("--time-tol", type=float, default=DEFAULT.time_tol,
                       help="relative accuracy of the located charging time")


def _tolerances(args: argparse.Namespace):
    return with_overrides(
        eps_c=args.eps_c, eps_p=args.eps_p, snap=args.snap_tol,
        krylov=args.krylov_tol, time_tol=args.time_tol,
    )


def _add_plot_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--plot", nargs="?", const=_PLOT_AUTO, default=None, metavar="PNG",
        help="render a figure next to the data (default name derived from --out)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcharge",
        description="Simulate, certify, and plot the integer speed-depth "
                    "staircase of complete quantum charging.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("staircase", help="emit the certified-depth staircase")
    p.add_argument("--n", type=int, required=True, help="register size N")
    p.add_argument("--grid", type=int, default=2001, help="rate grid points on (0, 1]")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    _add_plot_flag(p)
    p.add_argument("--snap-tol", type=float, default=DEFAULT.snap)
    p.set_defaults(handler=cmd_staircase)

    p = sub.add_parser("simulate", help="simulate one charging orbit end to end")
    p.add_argument("--cluster-flip", action="store_true",
                   help="balanced cluster-flip Hamiltonian (requires --n, --m)")
    p.add_argument("--n", type=int, help="register size N")
    p.add_argument("--m", type=int, help="number of blocks")
    p.add_argument("--t", type=float, default=1.0, help="target charging time T")
    p.add_argument("--hamiltonian", metavar="JSON",
                   help="Hamiltonian spec file (cluster_flip | battery | custom_dense)")
    p.add_argument("--t-max", type=float, default=None,
                   help="detection horizon (default 1.5*T for cluster flips, else 10)")
    p.add_argument("--omega", type=float, default=1.0,
                   help="cell splitting for the stored-energy readout")
    p.add_argument("--samples", type=int, default=201, help="depth-profile samples")
    p.add_argument("--grid-points", type=int, default=2048, help="detection scan points")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.add_argument("--trajectory", default=None, metavar="CSV",
                   help="write the charging curve (t, fidelity, speed, energy)")
    _add_plot_flag(p)
    _add_tolerance_flags(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("certify", help="depth certificate from an observed rate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--snap-tol", type=float, default=DEFAULT.snap)
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("verify", help="run the numerical verification suite")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=100, help="fleet trials per (n, m)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None, help="also write the summary to a file")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("QCHARGE_THREADS", "1")))
    _add_tolerance_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("sweep", help="saturation sweep over (n, m)")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--t", type=float, default=1.0, help="target charging time")
    p.add_argument("--samples", type=int, default=201, help="depth-profile samples")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    _add_plot_flag(p)
    _add_tolerance_flags(p)
    p.set_defaults(handler=cmd_sweep)

    return parser


def _plot_target(plot_arg: str | None, out_arg: str | None, default_name: str) -> str | None:
    if plot_arg is None:
        return None
    if plot_arg != _PLOT_AUTO:
        return plot_arg
    if out_arg and out_arg != "-":
        return str(Path(out_arg).with_suffix(".png"))
    return default_name


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------

def cmd_staircase(args: argparse.Namespace) -> int:
    grid = frontier.default_eta_grid(args.grid)
    points = frontier.staircase_curve(args.n, grid, args.snap_tol)
    if args.format == "csv":
        write_csv(args.out, ("eta", "depth_certified", "smooth_bound"), points)
    else:
        doc = with_schema({
            "n": args.n,
            "points": [
                {"eta": eta, "depth_certified": depth, "smooth_bound": smooth}
                for eta, depth, smooth in points
            ],
        })
        write_text(args.out, dumps_json(doc))
    plot_path = _plot_target(args.plot, args.out, "staircase.png")
    if plot_path:
        plotting.plot_staircase(points, args.n, plot_path)
    return 0


def _event_json(event: ChargingEvent) -> dict:
    return {
        "t_charge": event.t_charge,
        "phase": event.phase,
        "infidelity_at_t": event.infidelity_at_t,
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    if args.cluster_flip:
        if args.n is None or args.m is None:
            raise ValueError("--cluster-flip requires --n and --m")
        h, meta = hamiltonian_from_json(
            {"type": "cluster_flip", "n": args.n, "m": args.m, "T": args.t}
        )
        t_max = args.t_max if args.t_max is not None else 1.5 * args.t
    elif args.hamiltonian:
        h, meta = load_hamiltonian_file(args.hamiltonian)
        t_max = args.t_max if args.t_max is not None else (
            1.5 * meta["T"] if meta.get("T") else 10.0
        )
    else:
        raise ValueError("simulate needs --cluster-flip or --hamiltonian FILE")

    n = int(meta["n"])
    psi0, target = endpoint_states(n)
    prop = Propagator(h)
    event = find_complete_charging_time(
        prop, psi0, target, t_max,
        eps_c=tol.eps_c, grid_points=args.grid_points,
        capture_band=tol.capture_band, time_tol=tol.time_tol,
    )
    charged = isinstance(event, ChargingEvent)

    doc = with_schema({
        "status": "charged" if charged else "not_charged",
        "hamiltonian": meta,
        "detection": {
            "t_max": t_max,
            "eps_c": tol.eps_c,
            "grid_points": args.grid_points,
        },
    })
    window = t_max
    if charged:
        window = event.t_charge
        report = qsl_report(prop, psi0, event, krylov_tol=tol.krylov)
        profile = trajectory_depth(prop, psi0, event.t_charge, args.samples, eps_p=tol.eps_p)
        cert = (
            frontier.certified_depth(n, report.eta, tol.snap)
            if report.eta is not None else None
        )
        doc["event"] = _event_json(event)
        doc["qsl"] = report.to_json()
        doc["depth"] = profile.to_json()
        doc["certificate"] = cert.to_json() if cert else None
    else:
        doc["detection"]["best_infidelity"] = event.best_infidelity
        doc["detection"]["best_time"] = event.best_time
        doc["event"] = None
        doc["qsl"] = qsl_report(prop, psi0, None, krylov_tol=tol.krylov).to_json()
        doc["depth"] = None
        doc["certificate"] = None
    write_text(args.out, dumps_json(doc))

    curve = None
    if args.trajectory or args.plot:
        battery = battery_hamiltonian(BatterySpec(n, args.omega))
        times = np.linspace(0.0, window, max(args.samples, 3))
        curve = charging_curve(prop, psi0, target, battery, times)
    if args.trajectory:
        write_csv(args.trajectory,
                  ("t", "fidelity_to_target", "fs_speed", "energy"), curve)
    plot_path = _plot_target(args.plot, args.out, "simulate.png")
    if plot_path:
        if charged:
            plotting.plot_charging(
                curve, profile.times, profile.depths, event.t_charge,
                n, args.omega, plot_path,
            )
        else:
            plotting.plot_charging(curve, None, None, None, n, args.omega, plot_path)
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    cert = frontier.certified_depth(args.n, args.eta, args.snap_tol)
    write_text(None, dumps_json(with_schema(cert.to_json())))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    suite = frontier.run_verification_suite(
        n_max=args.n_max, trials=args.trials, seed=args.seed,
        tol=tol, threads=max(args.threads, 1),
    )
    text = dumps_json(with_schema(suite.to_json()))
    write_text(None, text)
    if args.out:
        write_text(args.out, text)
    return 0 if suite.passed else 1


_SWEEP_COLUMNS = (
    "n", "m", "g", "t_charge", "eta", "delta_h", "e_ml",
    "tau_mt", "tau_ml", "tau_qsl", "dim_k", "ent_u", "depth_certified", "passed",
)


def cmd_sweep(args: argparse.Namespace) -> int:
    tol = _tolerances(args)
    reports = frontier.saturation_sweep(
        args.n_max, n_min=args.n_min, t_charge=args.t, samples=args.samples, tol=tol,
    )
    rows = []
    for r in reports:
        charged = isinstance(r.event, ChargingEvent)
        rows.append({
            "n": r.n, "m": r.m, "g": r.g,
            "t_charge": r.event.t_charge if charged else None,
            "eta": r.qsl.eta if r.qsl else None,
            "delta_h": r.qsl.delta_h if r.qsl else None,
            "e_ml": r.qsl.e_ml if r.qsl else None,
            "tau_mt": r.qsl.tau_mt if r.qsl else None,
            "tau_ml": r.qsl.tau_ml if r.qsl else None,
            "tau_qsl": r.qsl.tau_qsl if r.qsl else None,
            "dim_k": r.qsl.dim_k if r.qsl else None,
            "ent_u": r.ent_u,
            "depth_certified": r.certificate.depth_certified if r.certificate else None,
            "passed": r.passed,
        })
    if args.format == "csv":
        write_csv(
            args.out, _SWEEP_COLUMNS,
            ([("" if row[c] is None else row[c]) for c in _SWEEP_COLUMNS] for row in rows),
        )
    else:
        write_text(args.out, dumps_json(with_schema({"reports": [r.to_json() for r in reports]})))
    plot_path = _plot_target(args.plot, args.out, "sweep.png")
    if plot_path:
        plotting.plot_sweep(rows, plot_path)
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"qcharge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
