"""Discretized subsets of R^n at a dyadic scale delta = 2^-k.

A set is a finite collection of lattice cells z in Z^n, each standing for
the half-open box delta*(z + [0,1)^n).  The cell count is the size proxy
for the covering number N_delta; covering_number_balls recovers the ball
version up to dimensional constants via a greedy maximal separated set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import AmbientMismatch, EmptySet, ScaleTooFine
from .grassmann import LinearMap, Subspace


@dataclass(frozen=True)
class DiscretizedSet:
    """Finite set of Z^n cells at scale delta = 2^-k.

    cells are stored as a lexicographically sorted, deduplicated int64
    array of shape (count, n); all queries are read-only.
    """

    n: int
    k: int
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.cells, dtype=np.int64).reshape(-1, self.n)
        if arr.shape[0]:
            arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)
        if self.k < 0:
            raise ValueError("scale exponent k must be nonnegative")

    @property
    def delta(self) -> float:
        return 2.0 ** (-self.k)

    @property
    def cell_count(self) -> int:
        return int(self.cells.shape[0])

    def centers(self) -> np.ndarray:
        return (self.cells + 0.5) * self.delta

    def cell_tuples(self):
        return map(tuple, self.cells.tolist())

    def contains_cells(self, other: "DiscretizedSet") -> bool:
        """Whether every cell of `other` is a cell of self."""
        mine = set(self.cell_tuples())
        return all(c in mine for c in other.cell_tuples())

    def __eq__(self, other):
        return (
            isinstance(other, DiscretizedSet)
            and self.n == other.n
            and self.k == other.k
            and self.cells.shape == other.cells.shape
            and bool(np.all(self.cells == other.cells))
        )

    def __hash__(self):
        return hash((self.n, self.k, self.cells.tobytes()))


def from_points(points, k: int, n: int | None = None) -> DiscretizedSet:
    """Discretize a point cloud: cells = { floor(p / delta) }."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        if n is None:
            raise ValueError("ambient dimension needed for an empty point list")
        return DiscretizedSet(n, k, np.zeros((0, n), dtype=np.int64))
    pts = np.atleast_2d(pts)
    cells = np.floor(pts * 2.0**k).astype(np.int64)
    return DiscretizedSet(pts.shape[1], k, cells)


def cell_count(a: DiscretizedSet) -> int:
    return a.cell_count


def covering_number_balls(a: DiscretizedSet, delta_prime: float) -> int:
    """Size of a greedy maximal 2*delta'-separated subset of cell centers.

    The scan is lexicographic in cell coordinates, so the result is
    deterministic.  It sandwiches the ball covering numbers:
    N_{2d'}(A) <= result <= N_{d'}(A).
    """
    if delta_prime < a.delta:
        raise ScaleTooFine(f"delta' = {delta_prime} finer than set scale {a.delta}")
    if a.cell_count == 0:
        return 0
    sep = 2.0 * delta_prime
    centers = a.centers()
    # bucket kept points on a grid of pitch `sep`; only 3^n neighbor
    # buckets can hold a point closer than `sep`
    buckets: dict[tuple, list[np.ndarray]] = {}
    offsets = list(product((-1, 0, 1), repeat=a.n))
    kept = 0
    for c in centers:
        key = tuple(np.floor(c / sep).astype(np.int64).tolist())
        ok = True
        for off in offsets:
            nb = tuple(key[i] + off[i] for i in range(a.n))
            for p in buckets.get(nb, ()):
                if np.linalg.norm(c - p) < sep:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            buckets.setdefault(key, []).append(c)
            kept += 1
    return kept


def neighborhood(a: DiscretizedSet, rho: float) -> DiscretizedSet:
    """All cells within L-infinity cell distance ceil(rho/delta) of A."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    t = int(math.ceil(rho / a.delta - 1e-12))
    if t == 0 or a.cell_count == 0:
        return a
    offs = np.array(list(product(range(-t, t + 1), repeat=a.n)), dtype=np.int64)
    fat = (a.cells[:, None, :] + offs[None, :, :]).reshape(-1, a.n)
    return DiscretizedSet(a.n, a.k, fat)


def restrict_ball(a: DiscretizedSet, x, rho: float) -> DiscretizedSet:
    """Cells of A whose center lies in B(x, rho + delta*sqrt(n)/2)."""
    x = np.asarray(x, dtype=float)
    if a.cell_count == 0:
        return a
    r = rho + a.delta * math.sqrt(a.n) / 2.0
    d = np.linalg.norm(a.centers() - x, axis=1)
    return DiscretizedSet(a.n, a.k, a.cells[d <= r])


def intersect_cells(a: DiscretizedSet, b: DiscretizedSet) -> DiscretizedSet:
    """Exact cell-level intersection of two sets at the same (n, k)."""
    if a.n != b.n or a.k != b.k:
        raise AmbientMismatch("sets must share ambient dimension and scale")
    bs = set(b.cell_tuples())
    keep = [c for c in a.cell_tuples() if c in bs]
    return DiscretizedSet(a.n, a.k, np.array(keep, dtype=np.int64).reshape(-1, a.n))


def project_set(a: DiscretizedSet, v: Subspace) -> DiscretizedSet:
    """Discretization, at the same k, of the projected cell centers.

    The result lives in V's orthonormal coordinates (ambient dim = dim V).
    """
    if v.ambient_dim != a.n:
        raise AmbientMismatch(f"subspace ambient {v.ambient_dim} != set ambient {a.n}")
    if a.cell_count == 0:
        return DiscretizedSet(v.dim, a.k, np.zeros((0, v.dim), dtype=np.int64))
    coords = a.centers() @ v.basis.T
    cells = np.floor(coords / a.delta).astype(np.int64)
    return DiscretizedSet(v.dim, a.k, cells)


def slice_set(a: DiscretizedSet, v: Subspace, y) -> DiscretizedSet:
    """Fiber of A over y: cells whose projected center shares y's cell.

    y is given in V-coordinates; membership is cell-exact (L-infinity cell
    distance 0 in the projected lattice).
    """
    if v.ambient_dim != a.n:
        raise AmbientMismatch(f"subspace ambient {v.ambient_dim} != set ambient {a.n}")
    y = np.asarray(y, dtype=float).reshape(v.dim)
    if a.cell_count == 0:
        return a
    ycell = np.floor(y / a.delta).astype(np.int64)
    coords = a.centers() @ v.basis.T
    cells = np.floor(coords / a.delta).astype(np.int64)
    mask = np.all(cells == ycell, axis=1)
    return DiscretizedSet(a.n, a.k, a.cells[mask])


def linear_image(a: DiscretizedSet, f: LinearMap) -> DiscretizedSet:
    """Discretization of f(cell centers) at the same scale."""
    if f.n != a.n:
        raise AmbientMismatch(f"map size {f.n} != set ambient {a.n}")
    if a.cell_count == 0:
        return a
    img = a.centers() @ f.entries.T
    return DiscretizedSet(a.n, a.k, np.floor(img / a.delta).astype(np.int64))


def coarsen(a: DiscretizedSet, k_prime: int) -> DiscretizedSet:
    """The same set viewed at a coarser dyadic scale k' <= k."""
    if k_prime > a.k:
        raise ScaleTooFine(f"k' = {k_prime} finer than k = {a.k}")
    shift = a.k - k_prime
    return DiscretizedSet(a.n, k_prime, a.cells >> shift)


def _pairwise_counts(centers: np.ndarray, radius: float, chunk: int = 512) -> np.ndarray:
    """counts[i] = number of centers within Euclidean `radius` of center i."""
    n_pts = centers.shape[0]
    counts = np.empty(n_pts, dtype=np.int64)
    r2 = radius * radius
    for lo in range(0, n_pts, chunk):
        hi = min(lo + chunk, n_pts)
        diff = centers[lo:hi, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        counts[lo:hi] = np.sum(d2 <= r2 + 1e-12, axis=1)
    return counts


def frostman_profile(a: DiscretizedSet, kappa: float) -> list[tuple[float, float]]:
    """Per-radius concentration ratios over the dyadic grid.

    For each rho in {delta, 2*delta, ..., 1} reports the worst ratio
    count(A, B(x, rho)) / (rho^kappa * count(A)) over centers x of A.
    """
    if a.cell_count == 0:
        raise EmptySet("frostman profile needs a nonempty set")
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    centers = a.centers()
    total = a.cell_count
    pad = a.delta * math.sqrt(a.n) / 2.0
    profile = []
    for j in range(a.k + 1):
        rho = a.delta * 2.0**j
        counts = _pairwise_counts(centers, rho + pad)
        profile.append((rho, float(np.max(counts)) / (rho**kappa * total)))
    return profile


def frostman_stat(a: DiscretizedSet, kappa: float) -> float:
    """Worst-case local concentration of A against the rho^kappa law.

    Max of frostman_profile over dyadic radii; a value of at most 1
    corresponds to the non-concentration hypothesis with no loss.
    """
    return max(ratio for _, ratio in frostman_profile(a, kappa))


@dataclass(frozen=True)
class WeightedCellSet:
    """A DiscretizedSet with a probability weight per cell.

    weights align with the sorted cell order of `base.cells`.
    """

    base: DiscretizedSet
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(self.base.cell_count)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @classmethod
    def uniform(cls, base: DiscretizedSet) -> "WeightedCellSet":
        if base.cell_count == 0:
            raise EmptySet("cannot weight an empty set")
        return cls(base, np.full(base.cell_count, 1.0 / base.cell_count))


def mass_levels(w: WeightedCellSet, eps: float) -> list[DiscretizedSet]:
    """Dyadic mass-level partition of a weighted cell set.

    Level l collects cells with delta^((l+1)eps) < weight <= delta^(l*eps),
    for l = 0..L with L = ceil(n/eps) + 1.  Cells lighter than the last
    threshold are dropped; for sets in the unit ball the dropped mass is at
    most delta^eps.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    base = w.base
    levels_count = math.ceil(base.n / eps) + 1
    delta = base.delta
    out = []
    for l in range(levels_count + 1):
        lo = delta ** ((l + 1) * eps)
        hi = delta ** (l * eps)
        mask = (w.weights > lo) & (w.weights <= hi)
        out.append(DiscretizedSet(base.n, base.k, base.cells[mask]))
    return out


def save_set(a: DiscretizedSet, path) -> None:
    """Write the text format: 'n k' header then one cell per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{a.n} {a.k}\n")
        for row in a.cells:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")


def load_set(path) -> DiscretizedSet:
    """Read a set file written by save_set. Round-trips bit-exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("set file: first line must be 'n k'")
        n, k = int(header[0]), int(header[1])
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != n:
                raise ValueError(f"set file: expected {n} integers per line")
            rows.append([int(p) for p in parts])
    return DiscretizedSet(n, k, np.array(rows, dtype=np.int64).reshape(-1, n))


def box_dimension_proxy(a: DiscretizedSet) -> float:
    """log2(cell count) / k; display-only sanity figure for alpha."""
    if a.cell_count == 0 or a.k == 0:
        return 0.0
    return math.log2(a.cell_count) / a.k


def cover_constant(n: int) -> int:
    """Enumerated upper bound for N_1(B(0,2)): unit boxes meeting the ball."""
    rng = range(-3, 3)
    count = 0
    for z in product(rng, repeat=n):
        corner = np.array(z, dtype=float)
        nearest = np.clip(np.zeros(n), corner, corner + 1.0)
        if np.linalg.norm(nearest) <= 2.0:
            count += 1
    return count
