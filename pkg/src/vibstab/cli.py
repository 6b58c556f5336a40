"""Command-line front end.

Exit codes: 0 success (or stabilizable), 1 condition not met, 2 input error.
Human-readable summaries go to stdout; machine output goes to ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, network
from .averaging import averaged_matrix_numeric, compare_methods, functional_matrix_closed_form
from .design import DesignError, design_vibrations, load_schedule, save_schedule
from .graph import CyclicGraphError, DirectedGraph, NotStabilizableError, is_structurally_stabilizable, place_controls
from .robustness import NotHurwitzError, robustness_report, stress_test
from .simulation import UnderResolvedError, classify_decay, save_csv, simulate_controlled, simulate_lti

EXIT_OK, EXIT_UNMET, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _edges(edges):
    return ", ".join(f"{a + 1}->{b + 1}" for a, b in sorted(edges)) or "(none)"


def _cycle(witness):
    return " -> ".join(str(v + 1) for v in witness + witness[:1])


def _write_json(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    return text


def _load_network(path):
    try:
        return network.load(path)
    except FileNotFoundError as exc:
        raise InputError(f"{path}: no such file") from exc
    except network.NetworkError as exc:
        raise InputError(str(exc)) from exc


def _load_schedule(path, n):
    try:
        sched = load_schedule(path)
    except FileNotFoundError as exc:
        raise InputError(f"{path}: no such file") from exc
    except DesignError as exc:
        raise InputError(str(exc)) from exc
    for e in sched.entries:
        if not (0 <= e.row < n and 0 <= e.col < n):
            raise InputError(f"{path}: entry ({e.row + 1}, {e.col + 1}) outside a {n}-node network")
    return sched


def _placement(sys_):
    return place_controls(DirectedGraph.from_network(sys_))


def cmd_check(args) -> int:
    sys_ = _load_network(args.network)
    report = network.validate(sys_)
    for (i, j), msg in report.violations:
        print(f"warning: m_{i}{j}: {msg}")
    ok, residual, witness = is_structurally_stabilizable(DirectedGraph.from_network(sys_))
    print(f"residual edges: {_edges(residual.edges)}")
    if ok:
        print("verdict: stabilizable (unidirected residual is acyclic)")
        return EXIT_OK
    print(f"verdict: condition not met (inconclusive); residual cycle: {_cycle(witness)}")
    return EXIT_UNMET


def cmd_place(args) -> int:
    sys_ = _load_network(args.network)
    try:
        result = _placement(sys_)
    except NotStabilizableError as exc:
        print(f"cannot place controls: {exc}")
        return EXIT_UNMET
    _write_json(result.to_dict(), args.out)
    print(f"control set: {_edges(result.control_set)}")
    print(f"kept edges:  {_edges(result.kept_set)}")
    return EXIT_OK


def cmd_design(args) -> int:
    sys_ = _load_network(args.network)
    try:
        result = _placement(sys_)
    except NotStabilizableError as exc:
        print(f"cannot place controls: {exc}")
        return EXIT_UNMET
    M = network.build_matrix(sys_)
    try:
        sched = design_vibrations(M, result.control_set, args.omega_base,
                                  epsilon=args.epsilon, phase=args.phase)
    except DesignError as exc:
        raise InputError(str(exc)) from exc
    if args.out:
        save_schedule(sched, args.out)
    for e in sched.entries:
        print(f"v{e.row + 1}{e.col + 1}(s) = {e.mu:.10g} sin({e.omega:.10g} s + {e.phi:.4g})")
    return EXIT_OK


def _functional(M, sched, method, horizon):
    closed = numeric = None
    if method in ("closed-form", "both"):
        closed = functional_matrix_closed_form(M, sched)
    if method in ("numeric", "both"):
        numeric = averaged_matrix_numeric(M, sched, T=horizon, center=True)
    return closed, numeric


def cmd_average(args) -> int:
    sys_ = _load_network(args.network)
    M = network.build_matrix(sys_)
    sched = _load_schedule(args.schedule, sys_.n)
    try:
        closed, numeric = _functional(M, sched, args.method, args.horizon)
    except CyclicGraphError as exc:
        print(f"cannot average: {exc}; cycle {_cycle(exc.cycle)}")
        return EXIT_UNMET
    doc = {}
    for fm in (closed, numeric):
        if fm is not None:
            doc[fm.method] = fm.to_dict()
            print(f"{fm.method}: spectral abscissa {fm.spectrum.abscissa:.6g}")
            for note in fm.notes:
                print(f"  note: {note}")
    if closed is not None and numeric is not None:
        doc["agreement"] = compare_methods(numeric, closed)
        print("agreement: spectral {spectral_distance:.3g}, entrywise {entrywise_distance:.3g}"
              .format(**doc["agreement"]))
    _write_json(doc, args.out)
    return EXIT_OK


def _parse_x0(text, n):
    if text is None:
        return np.ones(n)
    try:
        x0 = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InputError(f"--x0: {exc}") from exc
    if x0.shape != (n,):
        raise InputError(f"--x0 has {x0.size} values, network has {n} nodes")
    return x0


def cmd_simulate(args) -> int:
    sys_ = _load_network(args.network)
    M = network.build_matrix(sys_)
    x0 = _parse_x0(args.x0, sys_.n)
    if args.schedule:
        sched = _load_schedule(args.schedule, sys_.n)
        if args.epsilon is not None:
            sched = sched.with_epsilon(args.epsilon)
        try:
            traj = simulate_controlled(M, sched, x0, args.tfinal, args.dt)
        except UnderResolvedError as exc:
            raise InputError(str(exc)) from exc
    else:
        traj = simulate_lti(M, x0, args.tfinal, args.dt or 1e-3)
    if args.out:
        save_csv(traj, args.out)
    t = traj.times
    window = args.window if args.window else (t[-1] - t[0]) / 5
    verdict = classify_decay(traj, window)
    print(f"samples: {len(t)}, t_final: {t[-1]:.6g}, finite: {traj.finite}")
    print(f"|x(T)| = {traj.norms[-1]:.6g}; {verdict.classification} "
          f"(shrink factor {verdict.shrink_factor:.3g})")
    return EXIT_OK


def cmd_robustness(args) -> int:
    sys_ = _load_network(args.network)
    M = network.build_matrix(sys_)
    mats = {"M": M}
    if args.schedule:
        sched = _load_schedule(args.schedule, sys_.n)
        try:
            mats["Mbar"] = functional_matrix_closed_form(M, sched).matrix
        except CyclicGraphError as exc:
            print(f"cannot average: {exc}")
            return EXIT_UNMET
    doc = {}
    for name, A in mats.items():
        try:
            rep = robustness_report(A)
        except NotHurwitzError as exc:
            doc[name] = {"hurwitz": False}
            print(f"{name}: not Hurwitz ({exc})")
            continue
        entry = rep.to_dict()
        entry["hurwitz"] = True
        entry["stress_stable_fraction"] = stress_test(A, rep.ursr_lower_bound, args.trials, args.seed)
        doc[name] = entry
        print(f"{name}: hinf {rep.hinf_norm:.6g}, bound {rep.ursr_lower_bound:.6g}, "
              f"stress {entry['stress_stable_fraction']:.2f}")
    _write_json(doc, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["system", "bound"])
            for name, entry in doc.items():
                w.writerow([name, repr(entry.get("bound", float("nan")))])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vibstab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="test the structural stabilizability condition")
    s.add_argument("network")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("place", help="choose the edges to vibrate")
    s.add_argument("network")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_place)

    s = sub.add_parser("design", help="design a stabilizing vibration schedule")
    s.add_argument("network")
    s.add_argument("--omega-base", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=1.0)
    s.add_argument("--phase", type=float, default=0.0)
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("average", help="compute the averaged (functional) matrix")
    s.add_argument("network")
    s.add_argument("schedule")
    s.add_argument("--method", choices=("closed-form", "numeric", "both"), default="closed-form")
    s.add_argument("--horizon", type=float, default=None, help="averaging horizon in fast time")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_average)

    s = sub.add_parser("simulate", help="simulate and write a trajectory CSV")
    s.add_argument("network")
    s.add_argument("schedule", nargs="?")
    s.add_argument("--x0", help="comma-separated initial state (default all ones)")
    s.add_argument("--tfinal", type=float, default=10.0)
    s.add_argument("--dt", type=float, default=None)
    s.add_argument("--epsilon", type=float, default=None, help="override the schedule epsilon")
    s.add_argument("--window", type=float, default=None, help="decay classification window")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("robustness", help="H-infinity robustness bounds for M and the averaged M")
    s.add_argument("network")
    s.add_argument("schedule", nargs="?")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_robustness)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
