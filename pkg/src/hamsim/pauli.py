"""Pauli-basis bookkeeping for bipartite Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, ContractViolation
from .numerics import I2, PAULIS, SX, SZ, kron, require_hermitian


@dataclass(frozen=True)
class PauliDecomposition:
    """``H = c0 I + sum_i a_i s_i x I + sum_j b_j I x s_j + sum_ij M_ij s_i x s_j``."""

    c0: float
    a: np.ndarray
    b: np.ndarray
    M: np.ndarray

    def compose(self):
        return compose(self.c0, self.a, self.b, self.M)


def decompose(h, eps=1e-10):
    h = require_hermitian(h, eps)
    if h.shape != (4, 4):
        raise ContractViolation(f"two-qubit Hamiltonian must be 4x4, got {h.shape}")
    c0 = np.trace(h).real / 4
    a = np.array([np.trace(kron(s, I2) @ h).real / 4 for s in PAULIS])
    b = np.array([np.trace(kron(I2, s) @ h).real / 4 for s in PAULIS])
    m = np.array([[np.trace(kron(si, sj) @ h).real / 4 for sj in PAULIS] for si in PAULIS])
    return PauliDecomposition(c0, a, b, m)


def compose(c0=0.0, a=(0, 0, 0), b=(0, 0, 0), M=None):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = np.zeros((3, 3)) if M is None else np.asarray(M, dtype=float)
    if a.shape != (3,) or b.shape != (3,) or m.shape != (3, 3):
        raise ContractViolation("a, b must be 3-vectors and M a 3x3 matrix")
    h = c0 * np.eye(4, dtype=complex)
    for i, s in enumerate(PAULIS):
        h = h + a[i] * kron(s, I2) + b[i] * kron(I2, s)
        for j, t in enumerate(PAULIS):
            h = h + m[i, j] * kron(s, t)
    return h


def from_diag(h):
    """``sum_i h_i s_i x s_i``."""
    return compose(M=np.diag(np.asarray(h, dtype=float)))


def nonlocal_part(h):
    """Strip identity and single-side terms from a two-qubit Hamiltonian."""
    return compose(M=decompose(h).M)


def nonlocal_part_bipartite(h, dims):
    """Nonlocal part of a Hermitian operator on ``C^dA x C^dB``.

    Removes ``K_A x I + I x K_B`` (and the identity) using partial traces.
    """
    da, db = dims
    h = np.asarray(h, dtype=complex)
    if h.shape != (da * db, da * db):
        raise ContractViolation(f"operator shape {h.shape} does not match dims {dims}")
    t = h.reshape(da, db, da, db)
    ka = np.einsum("ibjb->ij", t) / db
    kb = np.einsum("aiaj->ij", t) / da
    tot = np.trace(h) / (da * db)
    return h - np.kron(ka, np.eye(db)) - np.kron(np.eye(da), kb) + tot * np.eye(da * db)


def swap_operator(da, db=None):
    """Permutation matrix taking ``x (x) y`` on ``A B`` to ``y (x) x`` on ``B A``."""
    db = da if db is None else db
    p = np.zeros((da * db, da * db))
    for i in range(da):
        for j in range(db):
            p[j * da + i, i * db + j] = 1
    return p


def swap(h, dims=(2, 2)):
    """Exchange the two subsystems: ``S(X x Y) = Y x X``."""
    p = swap_operator(*dims)
    return p @ h @ p.T


# Pauli strings ---------------------------------------------------------------

MAX_QUBITS = 4


@dataclass(frozen=True)
class PauliString:
    """``X^{b1} Z^{b2} (x) X^{b3} Z^{b4} (x) ...`` on ``n`` qubits."""

    n: int
    bits: tuple

    def __post_init__(self):
        if len(self.bits) != 2 * self.n or any(b not in (0, 1) for b in self.bits):
            raise ContractViolation(f"need {2 * self.n} binary entries, got {self.bits}")

    def matrix(self):
        return pauli_string_matrix(self)

    def __mul__(self, other):
        """Return ``(phase, string)`` with ``self @ other = phase * string``."""
        if self.n != other.n:
            raise ContractViolation("qubit counts differ")
        phase = 1
        for k in range(self.n):
            # Z^z1 X^x2 = (-1)^{z1 x2} X^x2 Z^z1
            if self.bits[2 * k + 1] and other.bits[2 * k]:
                phase = -phase
        bits = tuple(x ^ y for x, y in zip(self.bits, other.bits))
        return phase, PauliString(self.n, bits)

    @classmethod
    def all(cls, n):
        for k in range(4**n):
            yield cls(n, tuple((k >> (2 * n - 1 - j)) & 1 for j in range(2 * n)))


def pauli_string_matrix(p):
    if p.n > MAX_QUBITS:
        raise CapacityError(f"at most {MAX_QUBITS} qubits supported, got {p.n}")
    ops = []
    for k in range(p.n):
        op = I2
        if p.bits[2 * k]:
            op = op @ SX
        if p.bits[2 * k + 1]:
            op = op @ SZ
        ops.append(op)
    return kron(*ops)


# Traceless bases -------------------------------------------------------------


@dataclass(frozen=True)
class TracelessBasisD:
    d: int
    elements: tuple

    def coefficients(self, h, dims=None):
        """Real coefficients ``c`` with ``nonlocal(h) = sum_ij c_ij eta_i x eta_j``."""
        d = self.d
        h_nl = nonlocal_part_bipartite(h, (d, d))
        ops = np.array([np.kron(ei, ej).ravel() for ei in self.elements for ej in self.elements]).T
        c, *_ = np.linalg.lstsq(ops, h_nl.ravel(), rcond=None)
        n = len(self.elements)
        return c.real.reshape(n, n)

    def assemble(self, c):
        c = np.asarray(c, dtype=float)
        out = np.zeros((self.d**2, self.d**2), dtype=complex)
        for i, ei in enumerate(self.elements):
            for j, ej in enumerate(self.elements):
                if c[i, j]:
                    out += c[i, j] * np.kron(ei, ej)
        return out


def traceless_basis(d):
    """Non-orthonormal traceless Hermitian basis on ``C^d``.

    First ``|0><0| - |k><k|`` for ``k = 1..d-1``, then for each pair
    ``(j, k)`` in the order (0,1), (0,2), ..., (1,2), ... a real symmetric
    and an imaginary antisymmetric element.
    """
    if not 2 <= d <= 4:
        raise CapacityError(f"traceless_basis supports 2 <= d <= 4, got {d}")
    els = []
    for k in range(1, d):
        e = np.zeros((d, d), dtype=complex)
        e[0, 0], e[k, k] = 1, -1
        els.append(e)
    pairs = sorted(combinations(range(d), 2))
    for j, k in pairs:
        sym = np.zeros((d, d), dtype=complex)
        sym[j, k] = sym[k, j] = 1
        anti = np.zeros((d, d), dtype=complex)
        anti[j, k], anti[k, j] = -1j, 1j
        els += [sym, anti]
    return TracelessBasisD(d, tuple(els))
