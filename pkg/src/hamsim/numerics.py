"""Small dense linear-algebra kernel.

Matrices are plain ``numpy`` arrays.  Everything here is a pure function;
random generators take an explicit seed or ``numpy.random.Generator`` and
never touch global state.

Conventions
-----------
The Pauli matrices are indexed 0, 1, 2 for x, y, z.  A unitary ``U`` acts
on Pauli operators through the real matrix ``R`` defined by

    U sigma_i U^dagger = sum_l R[i, l] sigma_l ,

so ``R.T`` is the ordinary rotation acting on Bloch vectors.
"""

from __future__ import annotations

import numpy as np

from .errors import CapacityError, ContractViolation, NumericError

EPS = 1e-9
MAX_DIM = 16

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def kron(*ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def as_matrix(a, name="matrix"):
    """Coerce to a finite 2-D complex array or raise ContractViolation."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ContractViolation(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation(f"{name} has non-finite entries")
    return m


def is_hermitian(h, eps=1e-10):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return np.linalg.norm(h - dagger(h)) <= eps * max(1.0, np.linalg.norm(h))


def is_unitary(u, eps=EPS):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.linalg.norm(u @ dagger(u) - np.eye(u.shape[0])) <= eps


def is_rotation(r, eps=EPS, proper=True):
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        return False
    if np.linalg.norm(r @ r.T - np.eye(3)) > eps:
        return False
    return abs(np.linalg.det(r) - 1.0) <= eps if proper else True


def require_hermitian(h, eps=1e-10, name="H"):
    h = as_matrix(h, name)
    if h.shape[0] != h.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {h.shape}")
    if not is_hermitian(h, eps):
        raise ContractViolation(f"{name} is not Hermitian within {eps:g}")
    return h


def require_unitary(u, eps=EPS, name="U"):
    u = as_matrix(u, name)
    if not is_unitary(u, eps):
        raise ContractViolation(f"{name} is not unitary within {eps:g}")
    return u


def herm_eig(h, eps=1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, q)`` with eigenvalues in descending order and ``q`` unitary,
    ``h = q @ diag(w) @ q^dagger``.  Each eigenvector is phased so that its
    first non-negligible component is real and positive.
    """
    h = require_hermitian(h, eps)
    if h.shape[0] > MAX_DIM:
        raise CapacityError(f"dimension {h.shape[0]} exceeds {MAX_DIM}")
    try:
        w, q = np.linalg.eigh((h + dagger(h)) / 2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigendecomposition did not converge: {exc}") from exc
    w = w[::-1]
    q = q[:, ::-1].copy()
    for k in range(q.shape[1]):
        col = q[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            ph = col[idx[0]] / abs(col[idx[0]])
            q[:, k] = col / ph
    return w, q


def expm_i(h, t):
    """Return ``exp(-i h t)`` for Hermitian ``h``."""
    h = require_hermitian(h)
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    w, q = herm_eig(h)
    return (q * np.exp(-1j * w * t)) @ dagger(q)


def svd3(m):
    """Real 3x3 singular value decomposition ``m = o1 @ diag(d) @ o2``.

    ``d`` is descending and nonnegative; ``o1``, ``o2`` are orthogonal (either
    determinant).  Column ``k`` of ``o1`` and row ``k`` of ``o2`` are jointly
    sign-fixed so the largest-magnitude entry of the column is positive.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ContractViolation(f"svd3 needs a 3x3 matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("svd3 input has non-finite entries")
    try:
        o1, d, o2 = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"SVD did not converge: {exc}") from exc
    for k in range(3):
        j = int(np.argmax(np.abs(o1[:, k]) + 1e-13 * np.arange(3, 0, -1)))
        if o1[j, k] < 0:
            o1[:, k] *= -1
            o2[k, :] *= -1
    return o1, d, o2


def su2_to_so3(u):
    """Adjoint action of a 2x2 unitary on the Pauli vector.

    ``R[i, l] = tr(sigma_l U sigma_i U^dagger) / 2``.  A global phase of ``u``
    is irrelevant, so any element of U(2) is accepted.
    """
    u = require_unitary(u, name="U")
    if u.shape != (2, 2):
        raise ContractViolation(f"expected a 2x2 unitary, got {u.shape}")
    r = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        conj = u @ si @ dagger(u)
        for l, sl in enumerate(PAULIS):
            r[i, l] = 0.5 * np.trace(sl @ conj).real
    return r


def _quaternion(rot):
    """Unit quaternion (w, x, y, z) of a proper rotation acting on vectors."""
    q = rot
    tr = q[0, 0] + q[1, 1] + q[2, 2]
    if tr > 0:
        s = 2.0 * np.sqrt(tr + 1.0)
        w, x, y, z = s / 4, (q[2, 1] - q[1, 2]) / s, (q[0, 2] - q[2, 0]) / s, (q[1, 0] - q[0, 1]) / s
    elif q[0, 0] >= q[1, 1] and q[0, 0] >= q[2, 2]:
        s = 2.0 * np.sqrt(1.0 + q[0, 0] - q[1, 1] - q[2, 2])
        w, x, y, z = (q[2, 1] - q[1, 2]) / s, s / 4, (q[0, 1] + q[1, 0]) / s, (q[0, 2] + q[2, 0]) / s
    elif q[1, 1] >= q[2, 2]:
        s = 2.0 * np.sqrt(1.0 + q[1, 1] - q[0, 0] - q[2, 2])
        w, x, y, z = (q[0, 2] - q[2, 0]) / s, (q[0, 1] + q[1, 0]) / s, s / 4, (q[1, 2] + q[2, 1]) / s
    else:
        s = 2.0 * np.sqrt(1.0 + q[2, 2] - q[0, 0] - q[1, 1])
        w, x, y, z = (q[1, 0] - q[0, 1]) / s, (q[0, 2] + q[2, 0]) / s, (q[1, 2] + q[2, 1]) / s, s / 4
    v = np.array([w, x, y, z])
    return v / np.linalg.norm(v)


def so3_to_su2(r, eps=1e-8):
    """Lift a rotation (in the ``su2_to_so3`` convention) to SU(2).

    Of the two lifts ``+-U`` the one with ``Re tr U > 0`` is returned.  When
    the trace vanishes (rotations by pi) the first nonzero Pauli coefficient
    of ``U = -i (x sx + y sy + z sz)`` is made positive imaginary.
    """
    r = np.asarray(r, dtype=float)
    if not is_rotation(r, eps):
        raise ContractViolation("input is not in SO(3)")
    w, x, y, z = _quaternion(r.T)
    if w < -1e-12:
        w, x, y, z = -w, -x, -y, -z
    elif abs(w) <= 1e-12:
        w = 0.0
        for c in (x, y, z):
            if abs(c) > 1e-12:
                if c > 0:
                    x, y, z = -x, -y, -z
                break
    return w * I2 - 1j * (x * SX + y * SY + z * SZ)


def phase_distance(w, target):
    """``min_phi ||w - e^{i phi} target||_2`` for unitaries ``w`` and ``target``.

    ``w target^dagger`` is unitary, so the spectral norm reduces to the
    largest chord between ``e^{i phi}`` and its eigenphases; the optimum is
    the midpoint of the shortest arc covering all of them.
    """
    theta = np.sort(np.angle(np.linalg.eigvals(w @ dagger(target))))
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
    cover = 2 * np.pi - gaps.max()
    return 2.0 * np.sin(cover / 4.0)


def frobenius_phase_distance(w, target):
    ov = np.trace(dagger(target) @ w)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(w - ph * target))


# random generators ---------------------------------------------------------

def rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.uint64(seed))


def random_su2(seed):
    g = rng_from(seed)
    q = g.normal(size=4)
    q /= np.linalg.norm(q)
    return q[0] * I2 - 1j * (q[1] * SX + q[2] * SY + q[3] * SZ)


def random_so3(seed):
    return su2_to_so3(random_su2(seed))


def random_unitary(d, seed):
    """Haar-random ``d x d`` unitary."""
    g = rng_from(seed)
    z = (g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(d, seed, scale=1.0):
    g = rng_from(seed)
    a = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
    return scale * (a + dagger(a)) / 2
