"""JSON wire format for Hamiltonians, protocols and schedules.

Complex matrices travel as nested ``[re, im]`` pairs.  A Hamiltonian
document carries exactly one of ``matrix``, ``pauli`` or ``diag`` and an
optional ``dims``.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ContractViolation, HamsimError
from .generic_sim import ConjugationSchedule
from .numerics import is_hermitian
from .pauli import compose, from_diag
from .protocol import ProtocolStep, SimulationProtocol


class ParseError(HamsimError):
    """Malformed JSON or a document that does not follow the schema."""


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, name="matrix"):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: expected nested [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParseError(f"{name}: expected shape (rows, cols, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _vec(obj, n, name):
    try:
        v = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: expected {n} numbers") from exc
    if v.shape != (n,):
        raise ParseError(f"{name}: expected {n} numbers, got shape {v.shape}")
    return v


def hamiltonian_from_json(doc, eps=1e-8):
    """Parse a Hamiltonian document; returns ``(H, dims)``."""
    if not isinstance(doc, dict):
        raise ParseError("Hamiltonian document must be a JSON object")
    forms = [k for k in ("matrix", "pauli", "diag") if k in doc]
    if len(forms) != 1:
        raise ParseError(f"exactly one of matrix/pauli/diag is required, found {forms or 'none'}")
    form = forms[0]
    if form == "matrix":
        h = matrix_from_json(doc["matrix"])
        if h.shape[0] != h.shape[1]:
            raise ContractViolation(f"matrix must be square, got {h.shape}")
        n = h.shape[0]
        default = (int(round(np.sqrt(n))),) * 2
        dims = tuple(doc.get("dims", default))
    else:
        dims = tuple(doc.get("dims", (2, 2)))
        if dims != (2, 2):
            raise ContractViolation(f"{form} form describes two qubits; dims {dims} given")
        if form == "pauli":
            p = doc["pauli"]
            if not isinstance(p, dict):
                raise ParseError("pauli: expected an object with a, b, M")
            m = np.asarray(p.get("M", np.zeros((3, 3))), dtype=float)
            if m.shape != (3, 3):
                raise ParseError(f"pauli.M: expected 3x3, got {m.shape}")
            h = compose(
                float(p.get("c0", 0.0)), _vec(p.get("a", [0, 0, 0]), 3, "pauli.a"), _vec(p.get("b", [0, 0, 0]), 3, "pauli.b"), m
            )
        else:
            h = from_diag(_vec(doc["diag"], 3, "diag"))
    if len(dims) != 2 or dims[0] * dims[1] != h.shape[0]:
        raise ContractViolation(f"dims {dims} inconsistent with a {h.shape[0]}x{h.shape[0]} matrix")
    if not is_hermitian(h, eps):
        raise ContractViolation(f"Hamiltonian is not Hermitian within {eps:g}")
    return h, (int(dims[0]), int(dims[1]))


def hamiltonian_to_json(h, dims=None):
    h = np.asarray(h, dtype=complex)
    if dims is None:
        dims = (int(round(np.sqrt(h.shape[0]))),) * 2
    return {"matrix": matrix_to_json(h), "dims": list(dims)}


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def protocol_to_json(prot):
    meta = _jsonable(dict(prot.meta))
    if prot.source is not None:
        meta["source"] = hamiltonian_to_json(prot.source, prot.dims)
    if prot.target is not None:
        meta["target"] = hamiltonian_to_json(prot.target, prot.dims)
    steps = []
    for st in prot.steps:
        d = {"p": float(st.p), "U": matrix_to_json(st.U), "V": matrix_to_json(st.V)}
        if st.label is not None:
            d["label"] = _jsonable(st.label)
        steps.append(d)
    fl = None
    if prot.final_local is not None:
        fl = [matrix_to_json(m) for m in prot.final_local]
    return {"factor": float(prot.s), "steps": steps, "final_local": fl, "meta": meta}


def schedule_to_json(sched):
    steps = [{"p": float(w), "U": matrix_to_json(a), "V": matrix_to_json(b)} for w, a, b in sched.steps]
    factor = None if sched.factor is None else float(sched.factor)
    return {"factor": factor, "steps": steps, "final_local": None, "meta": _jsonable(dict(sched.meta))}


def protocol_from_json(doc):
    """Rebuild a ``SimulationProtocol``; source/target come from ``meta`` when present."""
    if not isinstance(doc, dict) or "steps" not in doc or "factor" not in doc:
        raise ParseError("protocol document needs 'factor' and 'steps'")
    if not doc["steps"]:
        raise ParseError("protocol has no steps")
    steps = []
    for k, st in enumerate(doc["steps"]):
        try:
            label = st.get("label")
            steps.append(
                ProtocolStep(
                    float(st["p"]),
                    matrix_from_json(st["U"], f"steps[{k}].U"),
                    matrix_from_json(st["V"], f"steps[{k}].V"),
                    None if label is None else tuple(label),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"steps[{k}]: expected p, U, V") from exc
    meta = dict(doc.get("meta") or {})
    src = meta.pop("source", None)
    tgt = meta.pop("target", None)
    source = hamiltonian_from_json(src)[0] if src is not None else None
    target = hamiltonian_from_json(tgt)[0] if tgt is not None else None
    fl = doc.get("final_local")
    if fl is not None:
        fl = tuple(matrix_from_json(m) for m in fl)
    factor = doc["factor"]
    return SimulationProtocol(tuple(steps), float(factor) if factor is not None else 1.0, source, target, fl, meta)


def schedule_from_json(doc):
    prot = protocol_from_json(doc)
    steps = tuple((st.p, st.U, st.V) for st in prot.steps)
    return ConjugationSchedule(steps, prot.dims, doc.get("factor"), prot.meta)


def dumps(doc):
    return json.dumps(doc, indent=None, separators=(",", ":"))


def loads(text, what="input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from exc
