"""Floating-point geometry of linear subspaces of R^n.

Subspaces are stored as orthonormal bases (rows).  The central quantity is
the wedge-norm angle functional

    dang(V_1, ..., V_q) = || v_11 ^ ... ^ v_1m1 ^ v_21 ^ ... ||

computed as sqrt(det(G^T G)) where the columns of G collect all basis
vectors.  It is 0 exactly when the spaces have a nontrivial mutual
intersection and 1 when they are pairwise orthogonal and independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AmbientMismatch, DimMismatch, RankDeficient, Singular

# Gram matrices of stored bases must match the identity this tightly.
ORTHO_TOL = 1e-10
# Relative singular-value threshold deciding numerical rank.
RANK_TOL = 1e-8
# Largest principal angle below which two subspaces count as equal.
EQ_TOL = 1e-8


@dataclass(frozen=True)
class Subspace:
    """An m-dimensional linear subspace of R^n with an orthonormal basis.

    basis has shape (m, n); rows are the basis vectors.  Instances are
    immutable and safe to share across threads.
    """

    ambient_dim: int
    dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        b = b.reshape(self.dim, self.ambient_dim)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        if not (0 <= self.dim <= self.ambient_dim):
            raise DimMismatch(f"dim {self.dim} outside [0, {self.ambient_dim}]")
        gram = b @ b.T
        if self.dim and np.max(np.abs(gram - np.eye(self.dim))) > ORTHO_TOL:
            raise RankDeficient("basis is not orthonormal to tolerance")

    @classmethod
    def span(cls, vectors) -> "Subspace":
        """Orthonormalize independent vectors; alias for orthonormalize()."""
        return orthonormalize(vectors)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, n, np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, 0, np.zeros((0, n)))

    @classmethod
    def coordinate(cls, n: int, axes) -> "Subspace":
        """Span of the given standard basis vectors (0-based axes)."""
        axes = list(axes)
        b = np.zeros((len(axes), n))
        for i, a in enumerate(axes):
            b[i, a] = 1.0
        return cls(n, len(axes), b)


@dataclass(frozen=True)
class LinearMap:
    """An invertible-or-not n x n real matrix with cached norm data."""

    n: int
    entries: np.ndarray = field(repr=False)
    op_norm: float = field(init=False)
    inv_op_norm: float = field(init=False)
    abs_det: float = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float).reshape(self.n, self.n)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        s = np.linalg.svd(a, compute_uv=False)
        object.__setattr__(self, "op_norm", float(s[0]) if self.n else 0.0)
        smin = float(s[-1]) if self.n else 0.0
        object.__setattr__(self, "inv_op_norm", 1.0 / smin if smin > 0 else float("inf"))
        object.__setattr__(self, "abs_det", float(np.prod(s)) if self.n else 1.0)

    @property
    def invertible(self) -> bool:
        return self.abs_det > 0 and np.isfinite(self.inv_op_norm)

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(n, np.eye(n))


def _mgs(arr: np.ndarray) -> np.ndarray:
    """One modified Gram-Schmidt pass over the rows of arr."""
    q = arr.astype(float).copy()
    for i in range(q.shape[0]):
        for j in range(i):
            q[i] -= (q[j] @ q[i]) * q[j]
        nrm = np.linalg.norm(q[i])
        if nrm == 0.0:
            raise RankDeficient("zero vector encountered during orthonormalization")
        q[i] /= nrm
    return q


def orthonormalize(vectors) -> Subspace:
    """Build a Subspace from linearly independent vectors.

    Uses modified Gram-Schmidt with a re-orthogonalization pass; rank is
    decided first by a relative singular-value threshold so dependent
    inputs fail loudly instead of producing a junk basis.
    """
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    m, n = arr.shape
    if m == 0:
        return Subspace.zero(n)
    s = np.linalg.svd(arr, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient(f"numerical rank below {m}")
    q = _mgs(_mgs(arr))
    return Subspace(n, m, q)


def _check_same_ambient(spaces):
    dims = {v.ambient_dim for v in spaces}
    if len(dims) != 1:
        raise AmbientMismatch(f"mixed ambient dimensions {sorted(dims)}")
    return dims.pop()


def dang_gram(*spaces: Subspace) -> float:
    """Wedge-norm angle of one or more subspaces, in [0, 1].

    Returns sqrt(det(G^T G)) for the column-concatenated bases; 0 when the
    total dimension exceeds the ambient one or the bases are dependent.
    """
    if not spaces:
        raise ValueError("need at least one subspace")
    n = _check_same_ambient(spaces)
    total = sum(v.dim for v in spaces)
    if total > n:
        return 0.0
    if total == 0:
        return 1.0
    g = np.vstack([v.basis for v in spaces])  # rows are all basis vectors
    det = np.linalg.det(g @ g.T)
    return float(min(1.0, np.sqrt(max(0.0, det))))


def dang_proj(v: Subspace, w: Subspace) -> float:
    """|det| of the projection V -> W-perp; equals dang_gram(V, W).

    Requires dim V + dim W = n; this is the determinant form of the angle.
    """
    n = _check_same_ambient((v, w))
    if v.dim + w.dim != n:
        raise DimMismatch(f"dim V + dim W = {v.dim + w.dim} != n = {n}")
    wp = perp(w)
    mat = wp.basis @ v.basis.T  # (n - dim W) x dim V, square
    if mat.shape[0] == 0:
        return 1.0
    return float(min(1.0, abs(np.linalg.det(mat))))


def project(v: Subspace, x) -> np.ndarray:
    """Coordinates of the orthogonal projection of x onto V, in V's basis."""
    x = np.asarray(x, dtype=float)
    if x.shape != (v.ambient_dim,):
        raise AmbientMismatch(f"vector length {x.shape} != ambient {v.ambient_dim}")
    return v.basis @ x


def embed(v: Subspace, coords) -> np.ndarray:
    """Inverse of project on V: map V-coordinates back to an R^n vector."""
    return np.asarray(coords, dtype=float) @ v.basis


def sum_spaces(*spaces: Subspace) -> Subspace:
    """Smallest subspace containing all inputs; dimension = numerical rank."""
    n = _check_same_ambient(spaces)
    rows = np.vstack([v.basis for v in spaces]) if spaces else np.zeros((0, n))
    if rows.shape[0] == 0:
        return Subspace.zero(n)
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return Subspace(n, rank, vt[:rank])


def perp(v: Subspace) -> Subspace:
    """Orthogonal complement."""
    n = v.ambient_dim
    if v.dim == 0:
        return Subspace.full(n)
    _, _, vt = np.linalg.svd(v.basis, full_matrices=True)
    return Subspace(n, n - v.dim, vt[v.dim:])


def intersect(*spaces: Subspace) -> Subspace:
    """Intersection via duality: perp of the sum of the perps."""
    _check_same_ambient(spaces)
    return perp(sum_spaces(*[perp(v) for v in spaces]))


def project_space(w: Subspace, v: Subspace) -> Subspace:
    """The subspace pi_W(V), spanned by the projected basis vectors of V.

    Rank may drop when V meets W-perp; the result's dim is the numerical
    rank of the projected basis.
    """
    _check_same_ambient((w, v))
    projected = (v.basis @ w.basis.T) @ w.basis  # rows: pi_W(v_i) in R^n
    if projected.shape[0] == 0:
        return Subspace.zero(w.ambient_dim)
    u, s, vt = np.linalg.svd(projected, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return Subspace(w.ambient_dim, rank, vt[:rank])


def schubert_member(v: Subspace, w: Subspace, rho: float) -> bool:
    """Whether V lies in the rho-thickened Schubert cycle around W."""
    n = _check_same_ambient((v, w))
    if v.dim + w.dim != n:
        raise DimMismatch(f"dim V + dim W = {v.dim + w.dim} != n = {n}")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    return dang_gram(v, w) <= rho


def gl_act(f: LinearMap, v: Subspace) -> Subspace:
    """Action of f in GL(R^n) on the Grassmannian: V -> (f^-1)^* V.

    Equivalently (f V^perp)^perp; the two agree up to numerical tolerance.
    """
    if f.n != v.ambient_dim:
        raise AmbientMismatch(f"map size {f.n} != ambient {v.ambient_dim}")
    if not f.invertible:
        raise Singular("linear map is not invertible")
    if v.dim == 0:
        return Subspace.zero(f.n)
    finv_t = np.linalg.inv(f.entries).T
    image = v.basis @ finv_t.T  # rows f^perp(b_i)
    return orthonormalize(image)


def principal_angles(v: Subspace, w: Subspace) -> np.ndarray:
    """Principal angles (radians, ascending) between two subspaces.

    Uses the sine-based algorithm so angles far below sqrt(eps) are
    resolved; a plain arccos of singular values bottoms out near 1e-8.
    """
    _check_same_ambient((v, w))
    if v.dim == 0 or w.dim == 0:
        return np.zeros(0)
    ang = scipy.linalg.subspace_angles(v.basis.T, w.basis.T)
    return np.sort(ang)


def same_subspace(v: Subspace, w: Subspace, tol: float = EQ_TOL) -> bool:
    """Basis-independent equality: same dim and largest principal angle < tol."""
    if v.ambient_dim != w.ambient_dim or v.dim != w.dim:
        return False
    if v.dim == 0:
        return True
    ang = principal_angles(v, w)
    return float(ang[-1]) < tol
