"""Universal, non-optimal constructions.

Everything here is built from uniform twirls: averaging ``H`` over
conjugation by a group of local unitaries removes every term that does not
commute with the group.  Schedules are plain data; ``average`` evaluates the
first-order generator they produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import CapacityError, ContractViolation, DegenerateInputError, NoSimulationError
from .normal_form import normal_form
from .numerics import I2, SX, SY, SZ, dagger, herm_eig, kron, random_unitary, require_hermitian, rng_from
from .pauli import PauliString, decompose, nonlocal_part_bipartite, swap, traceless_basis
from .protocol import ProtocolStep, SimulationProtocol

_CHUNK = 4096


@dataclass(frozen=True)
class ConjugationSchedule:
    steps: tuple  # ((w, A, B), ...)
    dims: tuple
    factor: float | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.steps)

    @property
    def weights(self):
        return np.array([w for w, _, _ in self.steps])

    def average(self, h):
        """``sum_k w_k (A_k x B_k) h (A_k x B_k)^dagger``."""
        da, db = self.dims
        h = np.asarray(h, dtype=complex)
        if h.shape != (da * db, da * db):
            raise ContractViolation(f"operator shape {h.shape} does not match dims {self.dims}")
        out = np.zeros_like(h)
        for k in range(0, len(self.steps), _CHUNK):
            chunk = self.steps[k : k + _CHUNK]
            w = np.array([s[0] for s in chunk])
            a = np.array([s[1] for s in chunk])
            b = np.array([s[2] for s in chunk])
            u = np.einsum("nai,nbj->nabij", a, b).reshape(len(chunk), da * db, da * db)
            out += np.einsum("n,nij->ij", w, u @ h @ dagger(u))
        return out

    def is_valid(self, eps=1e-9):
        w = self.weights
        if np.any(w < -eps) or np.any(w > 1 + eps) or abs(w.sum() - 1) > 1e-10:
            return False
        for _, a, b in self.steps:
            if np.linalg.norm(a @ dagger(a) - np.eye(len(a))) > eps:
                return False
            if np.linalg.norm(b @ dagger(b) - np.eye(len(b))) > eps:
                return False
        return True


def _uniform(pairs, dims, **meta):
    pairs = list(pairs)
    w = 1.0 / len(pairs)
    return ConjugationSchedule(tuple((w, a, b) for a, b in pairs), dims, meta=meta)


# zero-Hamiltonian simulation --------------------------------------------------


def decouple_qubits(h, n):
    """Twirl over all ``P_i x P_j`` with ``P`` ranging over n-qubit Pauli strings."""
    if n not in (1, 2):
        raise CapacityError(f"decouple_qubits supports n in {{1, 2}}, got {n}")
    h = require_hermitian(h)
    if h.shape != (4**n, 4**n):
        raise ContractViolation(f"expected a {4**n}x{4**n} operator for n={n}, got {h.shape}")
    paulis = [p.matrix() for p in PauliString.all(n)]
    return _uniform(product(paulis, paulis), (2**n, 2**n), kind="decouple", n=n)


def clock_shift(d):
    """Shift ``X|j> = |j+1>`` and clock ``Z|j> = w^j |j>`` with ``w = exp(2 pi i/d)``."""
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return x, z


def _weyl(d):
    x, z = clock_shift(d)
    return [np.linalg.matrix_power(z, i) @ np.linalg.matrix_power(x, j) for i in range(d) for j in range(d)]


def decouple_ddim(h, d, side="both"):
    """Clock-and-shift twirl on ``C^d x C^d``.

    ``side="A"`` averages over the d^2 operators ``Z^i X^j`` on A only and
    leaves ``I x K_B``; ``side="both"`` twirls both sides (d^4 steps) and
    leaves ``tr(H)/d^2 I``.
    """
    if not 2 <= d <= 4:
        raise CapacityError(f"decouple_ddim supports 2 <= d <= 4, got {d}")
    if side not in ("A", "both"):
        raise ContractViolation(f"side must be 'A' or 'both', got {side!r}")
    h = require_hermitian(h)
    if h.shape != (d * d, d * d):
        raise ContractViolation(f"expected a {d * d}x{d * d} operator, got {h.shape}")
    ops = _weyl(d)
    eye = np.eye(d, dtype=complex)
    pairs = [(a, eye) for a in ops] if side == "A" else product(ops, ops)
    return _uniform(pairs, (d, d), kind="decouple-ddim", side=side)


# Clifford conjugators -----------------------------------------------------------

_R2 = 1 / np.sqrt(2)


def _clifford_table():
    out = [I2, SZ, SX, SY]
    for a, b in ((SX, SZ), (SX, SY), (SY, SZ)):
        out += [(a + b) * _R2, (a - b) * _R2]
    for s in (SX, SY, SZ):
        out += [(I2 - 1j * s) * _R2, (I2 + 1j * s) * _R2]
    for sx, sy, sz in product((1, -1), repeat=3):
        out.append((I2 - 1j * (sx * SX + sy * SY + sz * SZ)) / 2)
    return tuple(out)


CLIFFORDS = _clifford_table()
_PAULI_BY_NAME = {"X": SX, "Y": SY, "Z": SZ}


def _pauli_index(p):
    if isinstance(p, str) and p.upper() in _PAULI_BY_NAME:
        return "XYZ".index(p.upper())
    if isinstance(p, (int, np.integer)) and 0 <= p < 3:
        return int(p)
    raise ContractViolation(f"expected a Pauli X, Y or Z, got {p!r}")


@lru_cache(maxsize=None)
def _conjugator_index(i, j, sign):
    p, q = (SX, SY, SZ)[i], (SX, SY, SZ)[j]
    for k, u in enumerate(CLIFFORDS):
        if np.allclose(u @ p @ dagger(u), sign * q, atol=1e-12):
            return k
    raise AssertionError("unreachable: the Clifford group acts transitively on signed Paulis")  # pragma: no cover


def clifford_conjugator(src, dst, sign=1):
    """First ``U`` in a fixed list of 24 single-qubit Cliffords with ``U src U^dagger = sign dst``.

    The list is: I, Z, X, Y; the six edge rotations ``(a +- b)/sqrt 2``;
    the six quarter turns ``(I -+ i s)/sqrt 2``; the eight turns
    ``(I - i(+-X +-Y +-Z))/2``.  Representatives are in U(2), not SU(2).
    """
    if sign not in (1, -1):
        raise ContractViolation("sign must be +1 or -1")
    return CLIFFORDS[_conjugator_index(_pauli_index(src), _pauli_index(dst), int(sign))].copy()


# two-stage universal simulation ---------------------------------------------------

_HADAMARD = (SX + SZ) * _R2


def baseline_simulation(h, hp, tol=1e-12):
    """Two-stage any-to-any simulation for two qubits.

    ``H`` is rotated to normal form with its largest coefficient on ``ZZ``
    and twirled over ``{I, Z} x {I, Z}``, leaving ``h1 ZZ`` plus local terms.
    Each nonzero ``c'_ij sigma_i sigma_j`` of the target is then rebuilt by a
    Clifford conjugation for a time share proportional to ``|c'_ij|``.
    """
    h = require_hermitian(h)
    hp = require_hermitian(hp)
    if h.shape != (4, 4) or hp.shape != (4, 4):
        raise ContractViolation("baseline_simulation expects 4x4 Hamiltonians")
    nf = normal_form(h)
    if nf.is_local:
        raise NoSimulationError("source Hamiltonian is local")
    c = decompose(hp).M
    total = np.abs(c).sum()
    if total <= tol:
        raise DegenerateInputError("target has no nonlocal part")
    pre_a = _HADAMARD @ nf.U
    pre_b = _HADAMARD @ nf.V
    twirl = [(za, zb) for za in (I2, SZ) for zb in (I2, SZ)]
    names = "XYZ"
    steps = []
    for i, j in product(range(3), repeat=2):
        if abs(c[i, j]) <= tol * total:
            continue
        sg = 1 if c[i, j] > 0 else -1
        ga = clifford_conjugator("Z", names[i], sg)
        gb = clifford_conjugator("Z", names[j], 1)
        for k, (za, zb) in enumerate(twirl):
            w = abs(c[i, j]) / total / 4
            steps.append(ProtocolStep(w, ga @ za @ pre_a, gb @ zb @ pre_b, (i, j, k)))
    return SimulationProtocol(
        steps=tuple(steps),
        s=float(nf.h[0] / total),
        source=h,
        target=hp,
        meta={"kind": "baseline", "terms": int(len(steps) // 4)},
    )


# d-dimensional construction --------------------------------------------------------


def _cycle_fixing(d, k):
    """Cyclic permutation of the basis states other than ``|k>``."""
    others = [j for j in range(d) if j != k]
    p = np.zeros((d, d), dtype=complex)
    p[k, k] = 1
    for a, b in zip(others, others[1:] + others[:1]):
        p[b, a] = 1
    return p


def _unitary_sending(d, k, vec):
    """A unitary with ``U|k> = vec``."""
    vec = np.asarray(vec, dtype=complex)
    m = np.column_stack([vec] + [np.eye(d)[:, j] for j in range(d)])
    q, _ = np.linalg.qr(m)
    col = q[:, 0]
    ph = np.vdot(col, vec)
    q[:, 0] = col * ph / abs(ph)
    order = list(range(1, d))
    order.insert(k, 0)
    return q[:, order]


def diagonal_sector(h, d):
    """Double-centred diagonal ``G[k, l]``: the nonlocal part kept by the clock twirl."""
    diag = np.real(np.diag(np.asarray(h))).reshape(d, d)
    return diag - diag.mean(axis=1, keepdims=True) - diag.mean(axis=0, keepdims=True) + diag.mean()


def _product_terms(hp, d, tol):
    """``nonlocal(hp) = kappa sum_t w_t sgn_t Q(e_t) x Q(f_t)`` with ``w_t > 0``.

    ``Q(e) = |e><e| - (I - |e><e|)/(d-1)``; a traceless ``X = sum lam_m |e_m><e_m|``
    equals ``(d-1)/d sum lam_m Q(e_m)``, hence ``kappa = ((d-1)/d)^2``.
    """
    basis = traceless_basis(d)
    c = basis.coefficients(hp)
    u, sv, vt = np.linalg.svd(c)
    terms = []
    for r, sr in enumerate(sv):
        if sr <= tol * max(1.0, sv[0]):
            continue
        xa = sum(u[i, r] * e for i, e in enumerate(basis.elements))
        xb = sum(vt[r, j] * e for j, e in enumerate(basis.elements))
        la, qa = herm_eig(xa)
        lb, qb = herm_eig(xb)
        for m, n in product(range(d), repeat=2):
            wt = sr * la[m] * lb[n]
            if abs(wt) > tol * sv[0]:
                terms.append((abs(wt), 1 if wt > 0 else -1, qa[:, m], qb[:, n]))
    return terms


def simulate_generic_ddim(h, hp, d, seed=0, attempts=8, tol=1e-12):
    """Ancilla-free simulation of ``hp`` by ``h`` on ``C^d x C^d``.

    Stages: a clock twirl keeps the diagonal sector ``G``; averaging over a
    (d-1)-cycle that fixes ``|k>`` on A and ``|l>`` on B leaves
    ``G[k, l] Q_k x Q_l``; conjugating that product onto each term of the
    target's eigen-expansion, for a time share proportional to its weight,
    rebuilds ``s nonlocal(hp)``.  Positive and negative terms draw on the
    largest positive and most negative entries of ``G``.  For ``d = 2`` the
    two-qubit baseline is used instead.
    """
    if d not in (2, 3, 4):
        raise CapacityError(f"simulate_generic_ddim supports d in {{2, 3, 4}}, got {d}")
    h = require_hermitian(h)
    hp = require_hermitian(hp)
    if h.shape != (d * d, d * d) or hp.shape != (d * d, d * d):
        raise ContractViolation(f"expected {d * d}x{d * d} operators")
    if d == 2:
        prot = baseline_simulation(h, hp)
        steps = tuple((st.p, st.U, st.V) for st in prot.steps)
        return ConjugationSchedule(steps, (2, 2), prot.s, {"kind": "generic-ddim", "d": 2, "via": "baseline"})

    terms = _product_terms(hp, d, tol)
    if not terms:
        raise DegenerateInputError("target has no nonlocal part")
    need = {sg for _, sg, _, _ in terms}
    kappa = ((d - 1) / d) ** 2

    rng = rng_from(seed)
    eye = np.eye(d, dtype=complex)
    wa, wb = eye, eye
    for attempt in range(attempts):
        g = diagonal_sector(kron(wa, wb) @ h @ dagger(kron(wa, wb)), d)
        scale = max(1.0, np.abs(g).max())
        pos, neg = np.unravel_index(np.argmax(g), g.shape), np.unravel_index(np.argmin(g), g.shape)
        ok = (1 not in need or g[pos] > 1e-9 * scale) and (-1 not in need or g[neg] < -1e-9 * scale)
        if ok:
            break
        wa, wb = random_unitary(d, rng), random_unitary(d, rng)
    else:
        raise DegenerateInputError(f"diagonal sector stayed empty after {attempts} random pre-rotations")

    src = {1: (pos, g[pos]), -1: (neg, -g[neg])}
    cost = sum(w / src[sg][1] for w, sg, _, _ in terms)
    s = 1.0 / (kappa * cost)

    _, z = clock_shift(d)
    clocks = [np.linalg.matrix_power(z, a) for a in range(d)]
    steps = []
    for w, sg, ea, eb in terms:
        (k, l), strength = src[sg]
        share = w / strength / cost
        ca, cb = _cycle_fixing(d, k), _cycle_fixing(d, l)
        ua, ub = _unitary_sending(d, k, ea), _unitary_sending(d, l, eb)
        sub = share / (d * d * (d - 1) ** 2)
        for pa, pb in product(range(d - 1), repeat=2):
            left_a = ua @ np.linalg.matrix_power(ca, pa)
            left_b = ub @ np.linalg.matrix_power(cb, pb)
            for za, zb in product(clocks, clocks):
                steps.append((sub, left_a @ za @ wa, left_b @ zb @ wb))
    return ConjugationSchedule(
        tuple(steps),
        (d, d),
        float(s),
        {"kind": "generic-ddim", "d": d, "terms": len(terms), "attempts": attempt + 1},
    )


def schedule_residual(sched, h, hp):
    """Frobenius distance between the nonlocal parts of ``avg(h)`` and ``factor * hp``."""
    avg = sched.average(np.asarray(h, dtype=complex))
    diff = nonlocal_part_bipartite(avg, sched.dims) - sched.factor * nonlocal_part_bipartite(hp, sched.dims)
    return float(np.linalg.norm(diff))


def noswap_fixture():
    """``H = diag(1,-1,0) x diag(1,1,-2)`` on two qutrits and its swap."""
    h = np.kron(np.diag([1.0, -1.0, 0.0]), np.diag([1.0, 1.0, -2.0])).astype(complex)
    return h, swap(h, (3, 3))
