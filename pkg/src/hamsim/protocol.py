"""Optimal local-unitary simulation protocols for two-qubit Hamiltonians.

A protocol is a list of ``(p, U, V)``: run the source Hamiltonian ``H`` for
a fraction ``p`` of the total time, conjugated by ``U x V``.  To first order
the net generator is ``sum_k p_k (U_k x V_k) H (U_k x V_k)^dagger`` which
must equal ``s H'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractViolation, NoSimulationError
from .normal_form import normal_form
from .numerics import (
    I2,
    PAULIS,
    dagger,
    expm_i,
    kron,
    phase_distance,
    require_hermitian,
    so3_to_su2,
)
from .pauli import nonlocal_part_bipartite
from .polyhedron import FLIP3, canonicalize, decompose_on_face, optimal_factor


@dataclass(frozen=True)
class ProtocolStep:
    p: float
    U: np.ndarray
    V: np.ndarray
    label: tuple | None = None


@dataclass(frozen=True)
class SimulationProtocol:
    steps: tuple
    s: float
    source: np.ndarray | None = None
    target: np.ndarray | None = None
    final_local: tuple | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dims(self):
        return self.steps[0].U.shape[0], self.steps[0].V.shape[0]

    @property
    def weights(self):
        return np.array([st.p for st in self.steps])

    def bind(self, source, target=None):
        """Attach a source (and target) to an H-independent template."""
        source = require_hermitian(source)
        if target is None and self.meta.get("kind") == "invert-universal":
            target = -nonlocal_part_bipartite(source, self.dims)
        return replace(self, source=source, target=target)


def average_hamiltonian(steps, h):
    """``sum_k p_k (U_k x V_k) h (U_k x V_k)^dagger``."""
    out = np.zeros_like(np.asarray(h, dtype=complex))
    for st in steps:
        w = kron(st.U, st.V)
        out += st.p * (w @ h @ dagger(w))
    return out


def _order_steps(steps):
    return tuple(sorted(steps, key=lambda st: (-round(st.p, 12), st.label or ())))


def synthesize(h, hp):
    """Build the optimal protocol simulating ``hp`` with ``h``.

    Both Hamiltonians are reduced to normal form, the scaled target is written
    as a mix of at most three polyhedron vertices and each vertex is realised
    by a pair of single-qubit unitaries, then carried back through the
    normal-form witnesses.
    """
    h = require_hermitian(h)
    hp = require_hermitian(hp)
    if h.shape != (4, 4) or hp.shape != (4, 4):
        raise ContractViolation("synthesize expects 4x4 Hamiltonians")
    nf = normal_form(h)
    if nf.is_local:
        raise NoSimulationError("source Hamiltonian is local; only the zero Hamiltonian is reachable")
    nft = normal_form(hp)
    if nft.is_local:
        from .generic_sim import decouple_qubits

        sched = decouple_qubits(h, 1)
        steps = tuple(ProtocolStep(w, a, b) for w, a, b in sched.steps)
        return SimulationProtocol(steps, 1.0, h, hp, meta={"kind": "decouple"})

    res = optimal_factor(nft.h, nf.h)
    x, c, _, flipped = canonicalize(nft.h, nf.h)
    dec = decompose_on_face(res.s * x, c)
    steps = []
    for p, lab in dec.terms:
        rk, sk = lab.left(), lab.right()
        if flipped:
            sk = FLIP3 @ sk @ FLIP3
        r_step = nf.R @ rk @ nft.R.T
        s_step = nf.S @ sk @ nft.S.T
        steps.append(ProtocolStep(p, so3_to_su2(r_step), so3_to_su2(s_step), (lab.i, lab.j)))
    return SimulationProtocol(
        steps=_order_steps(steps),
        s=res.s,
        source=h,
        target=hp,
        meta={
            "kind": "optimal",
            "case": res.face_case,
            "tight": sorted(res.tight_terms),
            "vertices": [list(st.label) for st in _order_steps(steps)],
        },
    )


def verify_average(prot, source=None, target=None):
    """Frobenius residual of the first-order identity ``avg(H) = s H'`` on nonlocal parts."""
    h = prot.source if source is None else np.asarray(source, dtype=complex)
    hp = prot.target if target is None else np.asarray(target, dtype=complex)
    if h is None or hp is None:
        raise ContractViolation("protocol has no source/target bound")
    dims = prot.dims
    avg = average_hamiltonian(prot.steps, nonlocal_part_bipartite(h, dims))
    diff = nonlocal_part_bipartite(avg, dims) - prot.s * nonlocal_part_bipartite(hp, dims)
    return float(np.linalg.norm(diff))


def _local_parts(h, dims):
    da, db = dims
    t = np.asarray(h).reshape(da, db, da, db)
    ka = np.einsum("ibjb->ij", t) / db
    kb = np.einsum("aiaj->ij", t) / da
    ka = ka - np.trace(ka) / da * np.eye(da)
    kb = kb - np.trace(kb) / db * np.eye(db)
    return ka, kb


def cycle_unitary(prot, dt):
    """One stroboscopic cycle of total source time ``dt``.

    Each slice runs ``H`` for ``p_k dt`` between two half-slice local
    corrections ``exp(+i K tau/2)`` that cancel the source's local terms, and
    the conjugated slice is itself wrapped in half-slice evolutions under the
    target's local terms.  Slices are individually exact to third order; the
    cycle keeps the first-order error of non-commuting slices.
    """
    h = prot.source
    dims = prot.dims
    ka, kb = _local_parts(h, dims)
    ta, tb = _local_parts(prot.target, dims)
    loc = np.kron(ta, np.eye(dims[1])) + np.kron(np.eye(dims[0]), tb)
    w = np.eye(h.shape[0], dtype=complex)
    for st in prot.steps:
        tau = st.p * dt
        undo = np.kron(expm_i(ka, -tau / 2), expm_i(kb, -tau / 2))
        tgt = expm_i(loc, prot.s * tau / 2)
        c = kron(st.U, st.V)
        w = tgt @ c @ undo @ expm_i(h, tau) @ undo @ dagger(c) @ tgt @ w
    return w


def stroboscopic_error(prot, t_total, n_cycles):
    """Phase-minimised spectral distance between ``N`` cycles and ``exp(-i s H' t)``."""
    if n_cycles < 1:
        raise ContractViolation("need at least one cycle")
    w = np.linalg.matrix_power(cycle_unitary(prot, t_total / n_cycles), n_cycles)
    return phase_distance(w, expm_i(prot.target, prot.s * t_total))


def invert_optimal(h):
    """Optimal protocol for ``H' = -H``."""
    h = require_hermitian(h)
    return synthesize(h, -nonlocal_part_bipartite(h, (2, 2)))


def invert_universal():
    """``H``-independent protocol: conjugate side A by each Pauli for a third of the time.

    Since ``sum_i s_i s_j s_i = -s_j`` the average of any purely nonlocal
    two-qubit ``H`` is ``-H/3``.
    """
    steps = tuple(ProtocolStep(1 / 3, s, I2, ("A", k)) for k, s in zip("xyz", PAULIS))
    return SimulationProtocol(steps, 1 / 3, meta={"kind": "invert-universal"})


def _triple(x):
    x = np.asarray(x)
    return x.astype(float) if x.shape == (3,) else normal_form(x).h


def factor(h, hp):
    """Optimal ``s_{H'|H}`` from matrices or normal-form triples."""
    return optimal_factor(_triple(hp), _triple(h)).s


def interconversion_product(h, hp):
    """``s_{H|H'} * s_{H'|H}``; normalisation independent, at most 1."""
    a, b = _triple(h), _triple(hp)
    return optimal_factor(a, b).s * optimal_factor(b, a).s


def ancilla_effective(h, steps):
    """Effective two-qubit generator of a protocol with one ancilla qubit per side.

    ``steps`` holds ``(p, U, V)`` with ``U`` on ``A A'`` and ``V`` on ``B B'``
    (system leg first); both ancillas start in ``|0>``.  Returns
    ``<0 0| sum_k p_k (U_k x V_k)(H x I)(U_k x V_k)^dagger |0 0>`` on ``A B``.
    """
    h = require_hermitian(h)
    if h.shape != (4, 4):
        raise ContractViolation("ancilla_effective expects a 4x4 H")
    ht = h.reshape(2, 2, 2, 2)
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for p, u, v in steps:
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        if u.shape != (4, 4) or v.shape != (4, 4):
            raise ContractViolation("ancilla unitaries must be 4x4 (one qubit + one ancilla)")
        mu = u.reshape(2, 2, 2, 2)[:, 0]  # [a, x, x']
        mv = v.reshape(2, 2, 2, 2)[:, 0]
        out += p * np.einsum("axk,byl,xyzw,czk,dwl->abcd", mu, mv, ht, mu.conj(), mv.conj())
    eff = out.reshape(4, 4)
    return (eff + dagger(eff)) / 2
