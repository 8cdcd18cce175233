"""Local-unitary normal form of two-qubit Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import dagger, kron, so3_to_su2, svd3
from .pauli import decompose, nonlocal_part


@dataclass(frozen=True)
class NormalForm:
    """Canonical triple ``h`` with ``h1 >= h2 >= |h3|`` and its witnesses.

    ``(U x V) nonlocal(K) (U x V)^dagger = sum_i h_i s_i x s_i`` and
    ``R = su2_to_so3(U)``, ``S = su2_to_so3(V)`` satisfy ``R.T @ M @ S = diag(h)``.
    """

    h: np.ndarray
    U: np.ndarray
    V: np.ndarray
    R: np.ndarray
    S: np.ndarray
    local_a: np.ndarray
    local_b: np.ndarray
    c0: float

    @property
    def is_local(self):
        return not np.any(self.h)

    def conjugate(self, k):
        w = kron(self.U, self.V)
        return w @ k @ dagger(w)


def normal_form(k, zero_tol=1e-13):
    """Compute the normal form of a 4x4 Hermitian ``k``.

    ``M = O1 D O2`` (SVD); ``R = O1 diag(1, 1, det O1)`` and
    ``S = O2^T diag(1, 1, det O2)`` are proper rotations with
    ``R^T M S = diag(h1, h2, det(O1) det(O2) |h3|)``.
    """
    dec = decompose(k)
    o1, d, o2 = svd3(dec.M)
    d = np.where(d <= zero_tol * max(1.0, d[0]), 0.0, d)
    d1 = np.sign(np.linalg.det(o1))
    d2 = np.sign(np.linalg.det(o2))
    r = o1 @ np.diag([1.0, 1.0, d1])
    s = o2.T @ np.diag([1.0, 1.0, d2])
    h = np.array([d[0], d[1], d1 * d2 * d[2]])
    if d[2] == 0:
        h[2] = 0.0
    return NormalForm(
        h=h,
        U=so3_to_su2(r),
        V=so3_to_su2(s),
        R=r,
        S=s,
        local_a=dec.a,
        local_b=dec.b,
        c0=dec.c0,
    )


def normal_triple(k):
    return normal_form(k).h


def is_lu_equivalent(k1, k2, eps=1e-8):
    """Decide LU equivalence of the nonlocal parts of ``k1`` and ``k2``.

    Returns ``(equivalent, (U, V))`` where, when equivalent,
    ``(U x V) nonlocal(k1) (U x V)^dagger = nonlocal(k2)`` within ``eps``.
    """
    n1, n2 = normal_form(k1), normal_form(k2)
    if np.max(np.abs(n1.h - n2.h)) > eps:
        return False, None
    # nf(k) = W_k nl(k) W_k^dagger  =>  nl(k2) = W2^dagger W1 nl(k1) W1^dagger W2
    u = dagger(n2.U) @ n1.U
    v = dagger(n2.V) @ n1.V
    w = kron(u, v)
    ok = np.linalg.norm(w @ nonlocal_part(k1) @ dagger(w) - nonlocal_part(k2)) <= eps * max(
        1.0, np.linalg.norm(k2)
    )
    return bool(ok), (u, v)
