"""Geometry of efficiently simulable two-qubit Hamiltonians.

For a normal-form source ``h`` (normalised so ``h3 >= 0`` and ``sum(h) = 1``)
the diagonal triples reachable by local-unitary averaging form a polyhedron
with 24 (not necessarily distinct) vertices and 14 bounding half-spaces.
Membership is equivalent to the three-inequality s-majorization test, which
is also what gives the optimal simulation factor in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ContractViolation, DegenerateInputError, GeometryError

SLACK = 1e-9

# Signed permutations pi_i (all in SO(3)) and even sign patterns s_j.
PI = (
    np.eye(3),
    np.array([[-1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float),
    np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]], dtype=float),
    np.array([[0, 1, 0], [1, 0, 0], [0, 0, -1]], dtype=float),
    np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float),
    np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float),
)
SIGNS = (
    np.eye(3),
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)
FLIP3 = np.diag([1.0, 1.0, -1.0])

_ODD = ((1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1))


@dataclass(frozen=True)
class VertexLabel:
    i: int
    j: int

    def __post_init__(self):
        if not (0 <= self.i < 6 and 0 <= self.j < 4):
            raise ContractViolation(f"invalid vertex label ({self.i}, {self.j})")

    def left(self):
        """Rotation ``R`` with ``R^T D R' = vertex``: here ``R = pi_i^T``."""
        return PI[self.i].T

    def right(self):
        return PI[self.i].T @ SIGNS[self.j]

    def vertex(self, h):
        d = PI[self.i] @ np.diag(np.asarray(h, dtype=float)) @ PI[self.i].T @ SIGNS[self.j]
        return np.diag(d).copy()

    def as_list(self):
        return [self.i, self.j]


ALL_LABELS = tuple(VertexLabel(i, j) for i in range(6) for j in range(4))


@dataclass(frozen=True)
class SOrderedTriple:
    """``v = signs * original[perm]`` with ``v1 >= v2 >= |v3|``."""

    v: np.ndarray
    perm: tuple
    signs: tuple

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return np.array(self.signs) * x[list(self.perm)]


def s_order(x):
    """Sort absolute values descending and move the product sign to the last entry."""
    x = np.asarray(x, dtype=float)
    if x.shape != (3,) or not np.all(np.isfinite(x)):
        raise ContractViolation("s_order expects a finite 3-vector")
    perm = tuple(int(k) for k in np.argsort(-np.abs(x), kind="stable"))
    s1 = -1.0 if x[perm[0]] < 0 else 1.0
    s2 = -1.0 if x[perm[1]] < 0 else 1.0
    signs = (s1, s2, s1 * s2)
    v = np.array(signs) * x[list(perm)]
    v = v + 0.0  # normalise -0.0
    return SOrderedTriple(v=v, perm=perm, signs=signs)


def s_majorizes(hp, h, eps=SLACK):
    """True iff ``hp`` is s-majorized by ``h``."""
    u = s_order(hp).v
    v = s_order(h).v
    return bool(
        u[0] <= v[0] + eps
        and u[0] + u[1] - u[2] <= v[0] + v[1] - v[2] + eps
        and u[0] + u[1] + u[2] <= v[0] + v[1] + v[2] + eps
    )


def is_canonical(h, eps=SLACK):
    h = np.asarray(h, dtype=float)
    return bool(
        h.shape == (3,)
        and h[0] + eps >= h[1]
        and h[1] + eps >= h[2]
        and h[2] >= -eps
        and abs(h.sum() - 1.0) <= eps
    )


@dataclass(frozen=True)
class Constraint:
    kind: str  # "cap", "sum" or "skew"
    normal: tuple
    bound: float

    @property
    def case(self):
        return {"sum": 1, "skew": 2, "cap": 3}[self.kind]

    def describe(self):
        n = " ".join(f"{c:+g}{ax}" for c, ax in zip(self.normal, "xyz") if c)
        return f"{self.kind}: {n} <= {self.bound:.6g}"


def constraints(h):
    """The 14 half-spaces ``normal . x <= bound`` bounding the polyhedron of ``h``."""
    h1, _, h3 = h
    out = []
    for k in range(3):
        for sg in (1.0, -1.0):
            n = [0.0, 0.0, 0.0]
            n[k] = sg
            out.append(Constraint("cap", tuple(n), h1))
    for n in _ODD:
        out.append(Constraint("sum", tuple(float(c) for c in n), 1.0))
    for n in _ODD:
        out.append(Constraint("skew", tuple(-float(c) for c in n), 1.0 - 2.0 * h3))
    return tuple(out)


def _slacks(x, cons):
    x = np.asarray(x, dtype=float)
    return np.array([c.bound - np.dot(c.normal, x) for c in cons])


def membership(x, h, eps=SLACK):
    """Test ``x`` against the 14 inequalities for canonical ``h``.

    ``x`` may be a single triple or an ``(n, 3)`` stack; the result is a bool
    or a boolean array accordingly.
    """
    if not is_canonical(h):
        raise ContractViolation(f"h = {tuple(h)} is not canonical (descending, h3 >= 0, sum 1)")
    cons = constraints(h)
    normals = np.array([c.normal for c in cons])
    bounds = np.array([c.bound for c in cons])
    x = np.asarray(x, dtype=float)
    ok = np.all(bounds - x @ normals.T >= -eps, axis=-1)
    return bool(ok) if x.ndim == 1 else ok


def vertices(h):
    """All 24 labelled vertices ``(label, point)`` in label order."""
    return [(lab, lab.vertex(h)) for lab in ALL_LABELS]


def canonicalize(hp, h):
    """Bring a (target, source) pair into the frame used for membership.

    Returns ``(x, c, scale, flipped)``: both triples s-ordered, the third
    entry of both negated when the source product is negative, and the
    source ``c`` normalised to unit sum (``x`` divided by the same scale).
    """
    u = s_order(hp).v
    v = s_order(h).v
    flipped = bool(v[2] < 0)
    if flipped:
        u = u * np.array([1.0, 1.0, -1.0])
        v = v * np.array([1.0, 1.0, -1.0])
    scale = float(v.sum())
    if scale <= 0:
        raise DegenerateInputError("source triple is zero")
    return u / scale, v / scale, scale, flipped


@dataclass(frozen=True)
class OptimalResult:
    s: float
    face_case: int
    tight_terms: frozenset

    def __iter__(self):
        return iter((self.s, self.face_case))


def optimal_factor(hp, h, rtol=1e-9):
    """Largest ``s`` with ``s * hp`` s-majorized by ``h``.

    ``face_case`` is 3 whenever the cap bound binds (the rectangle faces),
    otherwise 1 for the sum bound and 2 for the skew bound.
    """
    u = s_order(hp).v
    v = s_order(h).v
    if u[0] == 0:
        raise DegenerateInputError("target triple is zero")
    if v[0] == 0:
        raise DegenerateInputError("source triple is zero")
    terms = {
        "sum": (v[0] + v[1] + v[2]) / (u[0] + u[1] + u[2]),
        "skew": (v[0] + v[1] - v[2]) / (u[0] + u[1] - u[2]),
        "cap": v[0] / u[0],
    }
    s = min(terms.values())
    tight = frozenset(k for k, t in terms.items() if t <= s * (1 + rtol))
    case = 3 if "cap" in tight else 1 if "sum" in tight else 2
    return OptimalResult(s=float(s), face_case=case, tight_terms=tight)


def case3_test(hp, h):
    """Two-ratio test for the rectangle faces (normal-form inputs with ``h3 >= 0``)."""
    h1, h2, h3 = h
    g1, g2, g3 = hp
    return bool(h1 * (g2 + g3) <= g1 * (h2 + h3) * (1 + 1e-12) and h1 * (g2 - g3) <= g1 * (h2 - h3) * (1 + 1e-12))


@dataclass(frozen=True)
class ConvexDecomposition:
    terms: tuple  # ((p, VertexLabel), ...)

    def reconstruct(self, h):
        return sum(p * lab.vertex(h) for p, lab in self.terms)

    @property
    def weights(self):
        return np.array([p for p, _ in self.terms])

    @property
    def labels(self):
        return [lab for _, lab in self.terms]


def _barycentric(points, x):
    a = np.vstack([np.array(points).T, np.ones(len(points))])
    rhs = np.append(x, 1.0)
    p, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return p, np.linalg.norm(a @ p - rhs)


def decompose_on_face(x, h, tol=1e-8):
    """Write a boundary point of the polyhedron as a mix of at most 3 vertices.

    The vertices considered are those on the smallest face containing ``x``
    (every constraint tight at ``x`` is tight at the vertex); subsets of size
    1, 2, 3 are tried in label order and the first with nonnegative
    barycentric weights wins.
    """
    if not is_canonical(h):
        raise ContractViolation(f"h = {tuple(h)} is not canonical")
    x = np.asarray(x, dtype=float)
    cons = constraints(h)
    sl = _slacks(x, cons)
    worst = int(np.argmin(sl))
    if sl[worst] < -tol:
        raise GeometryError(f"point lies outside; violated {cons[worst].describe()} by {-sl[worst]:.3g}")
    if sl[worst] > tol:
        raise GeometryError(f"point is interior; nearest face {cons[worst].describe()} has slack {sl[worst]:.3g}")
    uniq = []
    for lab, pt in vertices(h):
        if not any(np.abs(pt - q).max() <= 1e-12 for _, q in uniq):
            uniq.append((lab, pt))

    # near-edge points may look tight on a neighbouring face; widen if needed
    for thresh in (tol, 1e-12, sl[worst]):
        tight = [c for c, s in zip(cons, sl) if s <= thresh]
        face = [
            (lab, pt) for lab, pt in uniq if all(c.bound - np.dot(c.normal, pt) <= tol for c in tight)
        ]
        for size in (1, 2, 3):
            for combo in combinations(face, size):
                p, res = _barycentric([pt for _, pt in combo], x)
                if res <= 1e-9 and np.all(p >= -1e-10):
                    p = np.clip(p, 0.0, None)
                    p = p / p.sum()
                    terms = tuple((float(w), lab) for w, (lab, _) in zip(p, combo) if w > 0)
                    return ConvexDecomposition(terms)
    raise GeometryError("no vertex decomposition found on the supporting face")  # pragma: no cover
