"""Command-line interface: ``hamsim <command> [options]``.

Exit codes: 0 success, 1 a verification reported FAIL, 2 parse error,
3 contract violation, 4 infeasible request (local source, degenerate input).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import generic_sim, polyhedron, protocol
from .errors import ContractViolation, DegenerateInputError, GeometryError, NoSimulationError
from .normal_form import normal_form
from .pauli import decompose
from .serialize import (
    ParseError,
    dumps,
    hamiltonian_from_json,
    loads,
    protocol_from_json,
    protocol_to_json,
    schedule_to_json,
)

EXIT_FAIL, EXIT_PARSE, EXIT_CONTRACT, EXIT_INFEASIBLE = 1, 2, 3, 4


def _read(path, what):
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{what}: cannot read {path} ({exc.strerror})") from exc
    return loads(text, what)


def _hamiltonian(path, what):
    return hamiltonian_from_json(_read(path, what))


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ParseError("missing required option(s): " + ", ".join("--" + m for m in missing))


def _fmt(v):
    return np.array2string(np.asarray(v), precision=6, suppress_small=True, floatmode="fixed")


def _verdict(value, tol, label="residual"):
    ok = value <= tol
    return f"{label} {value:.1e} <= {tol:.0e}: {'PASS' if ok else 'FAIL'}", ok


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# commands ---------------------------------------------------------------------


def cmd_decompose(args):
    h, dims = _hamiltonian(args.input or args.source, "hamiltonian")
    if dims != (2, 2):
        raise ContractViolation("decompose works on two-qubit (4x4) Hamiltonians")
    dec = decompose(h)
    if args.json:
        print(dumps({"c0": dec.c0, "a": dec.a.tolist(), "b": dec.b.tolist(), "M": dec.M.tolist()}))
    else:
        print(f"c0 = {dec.c0:.6f}\na  = {_fmt(dec.a)}\nb  = {_fmt(dec.b)}\nM  =\n{_fmt(dec.M)}")
    return 0


def cmd_normal_form(args):
    h, dims = _hamiltonian(args.input or args.source, "hamiltonian")
    if dims != (2, 2):
        raise ContractViolation("normal-form works on two-qubit (4x4) Hamiltonians")
    nf = normal_form(h)
    if args.json:
        from .serialize import matrix_to_json

        print(dumps({"h": nf.h.tolist(), "U": matrix_to_json(nf.U), "V": matrix_to_json(nf.V), "R": nf.R.tolist(), "S": nf.S.tolist()}))
    else:
        print(f"h = {_fmt(nf.h)}")
        print(f"U =\n{_fmt(nf.U)}\nV =\n{_fmt(nf.V)}")
    return 0


def _pair(args):
    _need(args, "source", "target")
    h, dh = _hamiltonian(args.source, "source")
    hp, dt = _hamiltonian(args.target, "target")
    if dh != (2, 2) or dt != (2, 2):
        raise ContractViolation("this command works on two-qubit (4x4) Hamiltonians")
    return h, hp


def cmd_factor(args):
    h, hp = _pair(args)
    res = polyhedron.optimal_factor(normal_form(hp).h, normal_form(h).h)
    if args.json:
        print(dumps({"factor": res.s, "case": res.face_case, "tight": sorted(res.tight_terms)}))
    else:
        print(f"s = {res.s:.6f}, case {res.face_case}")
        print("tight: " + ", ".join(sorted(res.tight_terms)))
    return 0


def cmd_check(args):
    h, hp = _pair(args)
    tol = 1e-9 if args.tolerance is None else args.tolerance
    ok = polyhedron.s_majorizes(normal_form(hp).h, normal_form(h).h, tol)
    if args.json:
        print(dumps({"efficient": ok}))
    else:
        print(f"target efficiently simulable (s >= 1): {'yes' if ok else 'no'}")
    return 0


def cmd_synthesize(args):
    h, hp = _pair(args)
    prot = protocol.synthesize(h, hp)
    _emit(dumps(protocol_to_json(prot)), args.output)
    return 0


def _protocol_arg(args):
    prot = protocol_from_json(_read(args.input, "protocol"))
    if args.source is not None:
        prot = prot.bind(_hamiltonian(args.source, "source")[0], prot.target)
    if args.target is not None:
        prot = protocol.SimulationProtocol(
            prot.steps, prot.s, prot.source, _hamiltonian(args.target, "target")[0], prot.final_local, prot.meta
        )
    if prot.source is None or prot.target is None:
        raise ContractViolation("protocol has no source/target; pass --source/--target")
    return prot


def cmd_verify(args):
    prot = _protocol_arg(args)
    tol = 1e-8 if args.tolerance is None else args.tolerance
    r = protocol.verify_average(prot)
    line, ok = _verdict(r, tol)
    print(dumps({"residual": r, "tolerance": tol, "pass": ok}) if args.json else line)
    return 0 if ok else EXIT_FAIL


def cmd_strobe(args):
    if args.input is not None:
        prot = _protocol_arg(args)
    else:
        prot = protocol.synthesize(*_pair(args))
    tol = 1e-3 if args.tolerance is None else args.tolerance
    t = 1.0 if args.time is None else args.time
    n = 100 if args.cycles is None else args.cycles
    if np.linalg.norm(prot.source, 2) * t > 10:
        raise ContractViolation("need ||H|| * time <= 10")
    err = protocol.stroboscopic_error(prot, t, n)
    line, ok = _verdict(err, tol, f"error(t={t:g}, N={n})")
    print(dumps({"error": err, "time": t, "cycles": n, "tolerance": tol, "pass": ok}) if args.json else line)
    return 0 if ok else EXIT_FAIL


def cmd_invert(args):
    if args.universal:
        prot = protocol.invert_universal()
        if args.source is not None:
            prot = prot.bind(_hamiltonian(args.source, "source")[0])
    else:
        _need(args, "source")
        h, dims = _hamiltonian(args.source, "source")
        if dims != (2, 2):
            raise ContractViolation("invert works on two-qubit (4x4) Hamiltonians")
        prot = protocol.invert_optimal(h)
    if args.json or args.output:
        _emit(dumps(protocol_to_json(prot)), args.output)
    else:
        print(f"s = {prot.s:.6f}, {len(prot.steps)} steps")
        if prot.source is not None:
            print(_verdict(protocol.verify_average(prot), 1e-8)[0])
    return 0


def cmd_decouple(args):
    h, dims = _hamiltonian(args.input or args.source, "hamiltonian")
    if args.d is not None or dims[0] not in (2, 4):
        d = args.d or dims[0]
        sched = generic_sim.decouple_ddim(h, d, args.side or "both")
    else:
        sched = generic_sim.decouple_qubits(h, {2: 1, 4: 2}[dims[0]])
    avg = sched.average(h)
    if args.json or args.output:
        _emit(dumps(schedule_to_json(sched)), args.output)
        return 0
    print(f"{len(sched)} steps")
    if sched.meta.get("side", "both") == "both":
        r = np.linalg.norm(avg - np.trace(h) / h.shape[0] * np.eye(h.shape[0]))
        print(_verdict(r, 1e-10 if args.tolerance is None else args.tolerance, "distance to tr(H)/D I")[0])
    else:
        from .pauli import nonlocal_part_bipartite

        da = sched.dims[0]
        ka = np.einsum("ibjb->ij", avg.reshape(*sched.dims, *sched.dims)) / sched.dims[1]
        r = np.linalg.norm(nonlocal_part_bipartite(avg, sched.dims)) + np.linalg.norm(ka - np.trace(ka) / da * np.eye(da))
        print(_verdict(r, 1e-10 if args.tolerance is None else args.tolerance, "distance to I x K_B")[0])
    return 0


def cmd_baseline(args):
    h, hp = _pair(args)
    prot = generic_sim.baseline_simulation(h, hp)
    if args.json or args.output:
        _emit(dumps(protocol_to_json(prot)), args.output)
        return 0
    opt = protocol.factor(h, hp)
    print(f"s_base = {prot.s:.6f}, s_opt = {opt:.6f}, {len(prot.steps)} steps")
    print(_verdict(protocol.verify_average(prot), 1e-8 if args.tolerance is None else args.tolerance)[0])
    return 0


def cmd_generic_ddim(args):
    _need(args, "source", "target")
    h, dh = _hamiltonian(args.source, "source")
    hp, dt = _hamiltonian(args.target, "target")
    d = args.d or dh[0]
    if dh != (d, d) or dt != (d, d):
        raise ContractViolation(f"expected two {d}-level systems, got dims {dh} and {dt}")
    sched = generic_sim.simulate_generic_ddim(h, hp, d, seed=args.seed)
    if args.json or args.output:
        _emit(dumps(schedule_to_json(sched)), args.output)
        return 0
    r = generic_sim.schedule_residual(sched, h, hp)
    print(f"s = {sched.factor:.6f}, {len(sched)} steps")
    print(_verdict(r, 1e-8 if args.tolerance is None else args.tolerance)[0])
    return 0


COMMANDS = {
    "decompose": (cmd_decompose, "Pauli decomposition of a two-qubit Hamiltonian"),
    "normal-form": (cmd_normal_form, "normal-form triple and its local unitaries"),
    "factor": (cmd_factor, "optimal simulation factor s of target by source"),
    "check": (cmd_check, "whether target is efficiently simulable by source"),
    "synthesize": (cmd_synthesize, "emit the optimal protocol as JSON"),
    "verify": (cmd_verify, "first-order residual of a protocol"),
    "strobe": (cmd_strobe, "stroboscopic evolution error"),
    "invert": (cmd_invert, "protocol simulating -H"),
    "decouple": (cmd_decouple, "twirl schedule simulating the zero Hamiltonian"),
    "baseline": (cmd_baseline, "two-stage universal simulation"),
    "generic-ddim": (cmd_generic_ddim, "d-dimensional universal simulation"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="input file ('-' or absent: stdin)")
    common.add_argument("--source", help="source Hamiltonian JSON file")
    common.add_argument("--target", help="target Hamiltonian JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--cycles", type=int)
    common.add_argument("--time", type=float)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--d", type=int, help="local dimension")
    common.add_argument("--side", choices=("A", "both"))
    common.add_argument("-o", "--output", help="write JSON output to this file")
    common.add_argument("--universal", action="store_true", help="invert: use the H-independent protocol")
    parser = argparse.ArgumentParser(prog="hamsim", description="Local-unitary simulation of bipartite Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (fn, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NoSimulationError, DegenerateInputError, GeometryError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
