"""Experiment layer: set generators, projection sweeps and certificates.

A direction V is flagged exceptional for (A, alpha, eps) when a large
subset of A projects to fewer than delta^(-m*alpha/n - eps) cells.  The
canonical witness family is heavy-fiber prefixes: order the fibers of the
projection by size, keep the top t (plus their 1-cell dilation), and scan
t for the largest prefix whose projection stays under the threshold.  An
absent certificate is evidence, not proof, of non-membership; the witness
family is the one the non-concentration argument itself constructs.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import dset
from .errors import AmbientMismatch, BadBase, Degenerate, DimMismatch, EmptySet
from .grassmann import (
    LinearMap,
    Subspace,
    dang_gram,
    gl_act,
    perp,
    principal_angles,
    same_subspace,
)
from .randgrass import GrassmannSample, degenerate_probe


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_cantor_product(base: int, digits, n: int, k: int) -> dset.DiscretizedSet:
    """n-fold product of the base-b digit-set Cantor construction.

    Requires the base to be a power of two so levels align with the dyadic
    scale: k = levels * log2(base).  Cell count is |digits|^(levels * n).
    """
    if base < 2 or base & (base - 1):
        raise BadBase(f"base {base} is not a power of two")
    digits = sorted(set(int(d) for d in digits))
    if not digits or digits[0] < 0 or digits[-1] >= base:
        raise BadBase(f"digits must be a nonempty subset of 0..{base - 1}")
    log2b = base.bit_length() - 1
    if k % log2b:
        raise BadBase(f"k = {k} is not a multiple of log2(base) = {log2b}")
    levels = k // log2b
    axis = [0]
    for _ in range(levels):
        axis = [c * base + d for c in axis for d in digits]
    cells = np.array(list(product(axis, repeat=n)), dtype=np.int64)
    return dset.DiscretizedSet(n, k, cells.reshape(-1, n))


def gen_ball(n: int, k: int, radius_exponent: float) -> dset.DiscretizedSet:
    """All cells meeting the ball B(0, delta^theta), theta in [0, 1]."""
    if not 0.0 <= radius_exponent <= 1.0:
        raise ValueError("radius exponent must lie in [0, 1]")
    delta = 2.0**-k
    radius = delta**radius_exponent
    t = int(math.ceil(radius / delta)) + 1
    ranges = [np.arange(-t, t + 1, dtype=np.int64) for _ in range(n)]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, n)
    corner = grid * delta
    nearest = np.clip(0.0, corner, corner + delta)
    d2 = np.einsum("ij,ij->i", nearest, nearest)
    r2 = radius * radius
    # cells are half-open boxes: a tangency on an excluded upper face does
    # not intersect, so an exact-distance hit only counts when the nearest
    # point is attained inside the box
    attained = np.all(nearest != corner + delta, axis=1)
    keep = (d2 < r2) | ((d2 == r2) & attained)
    return dset.DiscretizedSet(n, k, grid[keep])


def gen_slice_union(k: int, side: int, n: int = 3) -> dset.DiscretizedSet:
    """Discretized plane-union-line: {0..s-1}^2 x {0} plus the e3 segment."""
    if n != 3:
        raise ValueError("slice union is a 3-dimensional construction")
    if side > 2**k:
        raise ValueError("side exceeds the grid at this scale")
    cells = [(x, y, 0) for x in range(side) for y in range(side)]
    cells += [(0, 0, z) for z in range(side)]
    return dset.DiscretizedSet(3, k, np.array(cells, dtype=np.int64))


# ---------------------------------------------------------------------------
# exceptional-direction certificates
# ---------------------------------------------------------------------------

def _fiber_cells(a: dset.DiscretizedSet, v: Subspace) -> np.ndarray:
    """Projected cell of every cell of A, in V's lattice (N x dim V)."""
    coords = a.centers() @ v.basis.T
    return np.floor(coords / a.delta).astype(np.int64)


def heavy_fiber_certificate(a: dset.DiscretizedSet, v: Subspace, eps: float,
                            alpha: float) -> dset.DiscretizedSet | None:
    """Largest heavy-fiber prefix witnessing membership in E(A, eps).

    Fibers of the projection to V are sorted by size; prefixes are dilated
    by one projected cell (the delta-neighborhood of the heavy image) and
    grown while the projected count stays strictly below
    delta^(-m*alpha/n - eps).  Returns the subset when it also keeps at
    least delta^eps of the cells of A, else None.
    """
    if a.cell_count == 0:
        raise EmptySet("certificate needs a nonempty set")
    if v.ambient_dim != a.n:
        raise AmbientMismatch(f"direction ambient {v.ambient_dim} != set ambient {a.n}")
    n, m = a.n, v.dim
    delta = a.delta
    total = a.cell_count
    proj_threshold = delta ** (-(m / n) * alpha - eps)
    mass_threshold = delta**eps * total

    ycells = _fiber_cells(a, v)
    fiber_count: dict[tuple, int] = {}
    for yc in map(tuple, ycells.tolist()):
        fiber_count[yc] = fiber_count.get(yc, 0) + 1
    order = sorted(fiber_count, key=lambda y: (-fiber_count[y], y))

    offsets = list(product((-1, 0, 1), repeat=m))
    dilated: set[tuple] = set()
    mass = 0
    proj_count = 0
    accepted = 0
    for y in order:
        new_cells = []
        for off in offsets:
            c = tuple(y[i] + off[i] for i in range(m))
            if c not in dilated:
                new_cells.append(c)
        added_proj = sum(1 for c in new_cells if c in fiber_count)
        if proj_count + added_proj >= proj_threshold:
            break  # prefixes only grow, so the first violation is final
        dilated.update(new_cells)
        proj_count += added_proj
        mass += sum(fiber_count.get(c, 0) for c in new_cells)
        accepted += 1
    if accepted == 0 or mass < mass_threshold:
        return None
    keep = np.array([yc in dilated for yc in map(tuple, ycells.tolist())])
    return dset.DiscretizedSet(n, a.k, a.cells[keep])


def exceptional_threshold(a: dset.DiscretizedSet, m: int, eps: float, alpha: float) -> float:
    """The projected-count bound delta^(-m*alpha/n - eps)."""
    return a.delta ** (-(m / a.n) * alpha - eps)


# ---------------------------------------------------------------------------
# projection sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionRecord:
    dir_index: int
    weight: float
    dang_min_to_probes: float
    proj_cells: int
    threshold: float
    flagged: bool
    cert_cells: int


@dataclass(frozen=True)
class SweepReport:
    n: int
    m: int
    k: int
    alpha: float
    eps: float
    threshold: float
    exceptional_fraction: float
    records: tuple = field(repr=False)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "alpha": _g17(self.alpha),
            "eps": _g17(self.eps),
            "threshold": _g17(self.threshold),
            "exceptional_fraction": _g17(self.exceptional_fraction),
            "records": [
                {
                    "dir_index": r.dir_index,
                    "weight": _g17(r.weight),
                    "dang_min_to_probes": _g17(r.dang_min_to_probes),
                    "proj_cells": r.proj_cells,
                    "threshold": _g17(r.threshold),
                    "flagged": r.flagged,
                    "cert_cells": r.cert_cells,
                }
                for r in self.records
            ],
        }
        return json.dumps(payload, indent=2)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["dir_index", "weight", "dang_min_to_probes", "proj_cells",
                 "threshold", "flagged", "cert_cells"]
            )
            for r in self.records:
                writer.writerow(
                    [r.dir_index, f"{r.weight:.17g}", f"{r.dang_min_to_probes:.17g}",
                     r.proj_cells, f"{r.threshold:.17g}", int(r.flagged), r.cert_cells]
                )


def _g17(x: float) -> float:
    """Round-trip floats through 17 significant digits for stable output."""
    return float(f"{x:.17g}")


def projection_sweep(a: dset.DiscretizedSet, mu: GrassmannSample, eps: float,
                     alpha: float, threads: int = 1) -> SweepReport:
    """Flag every direction of mu admitting a heavy-fiber certificate.

    The exceptional fraction is the mu-weight of flagged directions; it
    estimates 1 - mu(D) in the projection theorem.  Parallelism across
    directions never changes the report (records are reduced by index).
    """
    if mu.n != a.n:
        raise AmbientMismatch(f"measure ambient {mu.n} != set ambient {a.n}")
    if not 0 < alpha < a.n:
        raise ValueError("alpha must lie in (0, n)")
    subspaces = mu.subspaces
    weights = mu.weights
    probes = [degenerate_probe(v) for v in subspaces]
    threshold = exceptional_threshold(a, mu.m, eps, alpha)

    def work(i: int) -> DirectionRecord:
        v = subspaces[i]
        proj = dset.project_set(a, v).cell_count
        cert = heavy_fiber_certificate(a, v, eps, alpha)
        others = [dang_gram(v, w) for j, w in enumerate(probes) if j != i]
        return DirectionRecord(
            dir_index=i,
            weight=float(weights[i]),
            dang_min_to_probes=float(min(others)) if others else 1.0,
            proj_cells=proj,
            threshold=threshold,
            flagged=cert is not None,
            cert_cells=cert.cell_count if cert is not None else 0,
        )

    indices = range(len(subspaces))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, indices))
    else:
        records = [work(i) for i in indices]
    frac = float(sum(r.weight for r in records if r.flagged))
    return SweepReport(
        n=a.n, m=mu.m, k=a.k, alpha=alpha, eps=eps,
        threshold=threshold, exceptional_fraction=frac, records=tuple(records),
    )


# ---------------------------------------------------------------------------
# GL normalization of a transverse pair
# ---------------------------------------------------------------------------

def gl_normalize(v1: Subspace, v2: Subspace) -> LinearMap:
    """An f in GL(R^n) acting on the Grassmannian by fixing V1 and sending
    V2 to V1-perp.

    Shear construction: the dual map g = (f^-1)^* fixes V1 pointwise and
    projects V2 onto V1-perp; its condition number grows as the pair
    degenerates.  Requires dim V1 = dim V2 = n/2 and dang(V1, V2) > 0.
    """
    n = v1.ambient_dim
    if v2.ambient_dim != n or v1.dim != v2.dim or 2 * v1.dim != n:
        raise DimMismatch("need dim V1 = dim V2 = n/2 in a common ambient space")
    if dang_gram(v1, v2) < 1e-8:
        raise Degenerate("pair is numerically degenerate: dang < 1e-8")
    b1, b2 = v1.basis, v2.basis
    p_perp = np.eye(n) - b1.T @ b1
    # g maps the basis (b1 rows, b2 rows) to (b1 rows, projected b2 rows)
    columns_in = np.vstack([b1, b2]).T
    columns_out = np.vstack([b1, b2 @ p_perp.T]).T
    g = columns_out @ np.linalg.inv(columns_in)
    f = np.linalg.inv(g.T)
    return LinearMap(n, f)


def condition_number(f: LinearMap) -> float:
    return f.op_norm * f.inv_op_norm


def certify_gl_normalize(f: LinearMap, v1: Subspace, v2: Subspace, tol: float = 1e-8) -> bool:
    """Post-check: the action fixes V1 and sends V2 to V1-perp within tol."""
    img1 = gl_act(f, v1)
    img2 = gl_act(f, v2)
    ok1 = float(principal_angles(img1, v1)[-1]) < tol if v1.dim else True
    ok2 = same_subspace(img2, perp(v1), tol)
    return ok1 and ok2
