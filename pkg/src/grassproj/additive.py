"""Exact additive combinatorics on finite lattice sets.

Everything here counts with integers; no floating point enters except in
user-supplied thresholds.  These routines double as the trusted oracles
for the discrete projection model.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DimMismatch, EmptyInput, PreconditionViolated, WeightsInvalid

# pair-scan energies refuse inputs above this size
PAIR_SCAN_CAP = 100_000


@dataclass(frozen=True)
class LatticeSet:
    """A finite subset of Z^n."""

    dim: int
    elements: frozenset = field(repr=False)

    def __post_init__(self):
        elems = frozenset(tuple(int(x) for x in e) for e in self.elements)
        for e in elems:
            if len(e) != self.dim:
                raise DimMismatch(f"element {e} has length != {self.dim}")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def of(cls, elements, dim: int | None = None) -> "LatticeSet":
        elems = [tuple(int(x) for x in (e if isinstance(e, (tuple, list, np.ndarray)) else (e,))) for e in elements]
        if dim is None:
            if not elems:
                raise ValueError("dimension needed for an empty set")
            dim = len(elems[0])
        return cls(dim, frozenset(elems))

    @classmethod
    def interval(cls, lo: int, hi: int) -> "LatticeSet":
        """One-dimensional set {lo, ..., hi}."""
        return cls(1, frozenset((i,) for i in range(lo, hi + 1)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))


def _check_dims(*sets: LatticeSet):
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise DimMismatch(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def sumset(a: LatticeSet, b: LatticeSet) -> LatticeSet:
    dim = _check_dims(a, b)
    out = {tuple(x + y for x, y in zip(p, q)) for p in a.elements for q in b.elements}
    return LatticeSet(dim, frozenset(out))


def difference(a: LatticeSet, b: LatticeSet) -> LatticeSet:
    dim = _check_dims(a, b)
    out = {tuple(x - y for x, y in zip(p, q)) for p in a.elements for q in b.elements}
    return LatticeSet(dim, frozenset(out))


def iterated_sumset(a: LatticeSet, k: int) -> LatticeSet:
    """k-fold sumset kA; 0A is the singleton origin."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    acc = LatticeSet(a.dim, frozenset({tuple([0] * a.dim)}))
    for _ in range(k):
        acc = sumset(acc, a)
    return acc


@dataclass(frozen=True)
class FiberMap:
    """Extensional map from lattice elements to integer-tuple keys."""

    table: dict

    def __call__(self, element):
        return self.table[element]

    @classmethod
    def from_callable(cls, domain, fn) -> "FiberMap":
        return cls({e: tuple(np.atleast_1d(fn(e)).astype(int).tolist()) for e in domain})

    @classmethod
    def coordinate(cls, domain, axes) -> "FiberMap":
        axes = tuple(axes)
        return cls({e: tuple(e[i] for i in axes) for e in domain})


def _as_mapping(phi, a: LatticeSet):
    if isinstance(phi, FiberMap):
        get = phi.table.__getitem__
    elif isinstance(phi, dict):
        get = phi.__getitem__
    else:
        get = phi
    try:
        return {e: get(e) for e in a.elements}
    except KeyError as exc:
        raise PreconditionViolated(f"fiber map not total on A: missing {exc}") from exc


def fiber_sizes(phi, a: LatticeSet) -> Counter:
    """Multiset of fiber sizes |A intersect phi^-1(y)| keyed by y."""
    mapping = _as_mapping(phi, a)
    return Counter(mapping.values())


def energy_discrete(phi, a: LatticeSet) -> int:
    """Number of collision pairs: sum over fibers of size squared."""
    return sum(c * c for c in fiber_sizes(phi, a).values())


def energy_delta(phi, a, delta: float | None = None) -> int:
    """Near-collision energy of a discretized set at scale delta.

    phi maps an (N, n) array of cell centers to an (N, d) value array.
    Counts product cells of pairs (a, a') with |phi(a) - phi(a')| <= delta;
    distinct cells yield distinct product cells, so this is a pair count.
    """
    if a.cell_count > PAIR_SCAN_CAP:
        raise ValueError(f"pair scan capped at {PAIR_SCAN_CAP} cells")
    if delta is None:
        delta = a.delta
    if a.cell_count == 0:
        return 0
    values = np.atleast_2d(np.asarray(phi(a.centers()), dtype=float))
    if values.shape[0] != a.cell_count:
        values = values.T
    total = 0
    chunk = 512
    d2 = delta * delta
    for lo in range(0, values.shape[0], chunk):
        diff = values[lo:lo + chunk, None, :] - values[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        total += int(np.sum(dist2 <= d2 + 1e-12))
    return total


def additive_energy(a: LatticeSet, b: LatticeSet) -> int:
    """|{(a, a', b, b') : a + b = a' + b'}| via sumset fiber counting."""
    _check_dims(a, b)
    reps = Counter(
        tuple(x + y for x, y in zip(p, q)) for p in a.elements for q in b.elements
    )
    return sum(r * r for r in reps.values())


def trim_small_fibers(a: LatticeSet, phi, m_bound, k_param) -> LatticeSet:
    """Keep the fibers of size >= M/(2K); the constructive energy lemma.

    Requires En(phi, A) >= (M/K)|A| and every fiber size <= M.  The result
    A' satisfies |A'| >= |A|/(2K) and |phi(A')| <= (2K/M)|A|; both are
    asserted because the lemma guarantees them.
    """
    if k_param < 1:
        raise PreconditionViolated("K must be >= 1")
    if m_bound <= 0:
        raise PreconditionViolated("M must be positive")
    mapping = _as_mapping(phi, a)
    sizes = Counter(mapping.values())
    energy = sum(c * c for c in sizes.values())
    size = len(a)
    if energy * k_param < m_bound * size:
        raise PreconditionViolated(
            f"energy {energy} < (M/K)|A| = {m_bound}/{k_param} * {size}"
        )
    biggest = max(sizes.values(), default=0)
    if biggest > m_bound:
        raise PreconditionViolated(f"fiber of size {biggest} exceeds M = {m_bound}")
    # fiber kept iff size >= M/(2K), tested as 2*K*size >= M (exact for
    # int or Fraction parameters)
    keep = {y for y, c in sizes.items() if 2 * k_param * c >= m_bound}
    trimmed = LatticeSet(a.dim, frozenset(e for e, y in mapping.items() if y in keep))
    assert 2 * k_param * len(trimmed) >= size, "lemma postcondition |A'| failed"
    assert m_bound * len(keep) <= 2 * k_param * size, "lemma postcondition |phi(A')| failed"
    return trimmed


def ruzsa_triangle_defect(a: LatticeSet, b: LatticeSet, c: LatticeSet) -> float:
    """(|B| |A-C|) / (|A-B| |B-C|); at most 1 for finite sets."""
    if not (len(a) and len(b) and len(c)):
        raise EmptyInput("Ruzsa triangle needs nonempty sets")
    _check_dims(a, b, c)
    num = len(b) * len(difference(a, c))
    den = len(difference(a, b)) * len(difference(b, c))
    return num / den


def pluennecke_witness(a: LatticeSet, b: LatticeSet, k: int, l: int):
    """Doubling constant K = |A+B|/|B| and the ratio |kA-lA| / (K^(k+l)|B|)."""
    if not (len(a) and len(b)):
        raise EmptyInput("Pluennecke witness needs nonempty sets")
    if k < 0 or l < 0 or k + l < 1:
        raise ValueError("need k, l >= 0 with k + l >= 1")
    _check_dims(a, b)
    doubling = len(sumset(a, b)) / len(b)
    spread = len(difference(iterated_sumset(a, k), iterated_sumset(a, l)))
    ratio = spread / (doubling ** (k + l) * len(b))
    return doubling, ratio


@dataclass(frozen=True)
class FiniteProbSpace:
    """A finite ground set with a probability weight per element."""

    points: tuple
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(len(self.points))
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "points", tuple(self.points))
        if np.any(w < 0):
            raise WeightsInvalid("negative weight")
        if abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise WeightsInvalid("weights must sum to 1")

    @classmethod
    def uniform(cls, points) -> "FiniteProbSpace":
        pts = tuple(points)
        if not pts:
            raise WeightsInvalid("empty ground set")
        return cls(pts, np.full(len(pts), 1.0 / len(pts)))

    def mass(self, subset) -> float:
        subset = set(subset)
        return float(sum(w for p, w in zip(self.points, self.weights) if p in subset))


# exhaustive/Monte-Carlo switch for the intersection checker
EXHAUSTIVE_LIMIT = 1_000_000


def check_intersection_lemma(space: FiniteProbSpace, a_family: dict, q: int, k_param: float,
                             trials: int = 10_000, seed: int = 0) -> float:
    """Mass of q-tuples whose family intersection stays large.

    Ground set A is the union of the family.  Requires |A_theta| >= |A|/K
    for every theta; returns the (mu^q)-mass of tuples with
    |A_th1 cap ... cap A_thq| >= |A| / (2 K^q), which the lemma bounds
    below by 1/(2 K^q).  Exhaustive when |Theta|^q is small, seeded
    Monte-Carlo otherwise (bound checked up to 3 sigma).
    """
    ground = set()
    family = {th: frozenset(a_family[th]) for th in space.points}
    for s in family.values():
        ground |= s
    total = len(ground)
    if total == 0:
        raise EmptyInput("empty ground set")
    bad = [th for th, s in family.items() if k_param * len(s) < total]
    if bad:
        raise PreconditionViolated(f"|A_theta| < |A|/K for theta in {bad}")
    need = total / (2 * k_param**q)
    lower = 1.0 / (2 * k_param**q)

    if len(space.points) ** q <= EXHAUSTIVE_LIMIT:
        mass = 0.0
        for combo in product(range(len(space.points)), repeat=q):
            inter = family[space.points[combo[0]]]
            for i in combo[1:]:
                inter = inter & family[space.points[i]]
                if not inter:
                    break
            if len(inter) >= need:
                mass += float(np.prod([space.weights[i] for i in combo]))
        assert mass >= lower - 1e-12, "intersection lemma bound failed (exhaustive)"
        return mass

    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    hits = 0
    for _ in range(trials):
        idx = rng.choice(len(space.points), size=q, p=space.weights)
        inter = family[space.points[idx[0]]]
        for i in idx[1:]:
            inter = inter & family[space.points[i]]
            if not inter:
                break
        if len(inter) >= need:
            hits += 1
    est = hits / trials
    sigma = math.sqrt(max(est * (1 - est), 1e-12) / trials)
    assert est >= lower - 3 * sigma, "intersection lemma bound failed (Monte-Carlo)"
    return est


def check_union_cap_lemma(space: FiniteProbSpace, events, weights, a_threshold: float):
    """Exact check that heavily-weighted event overlaps stay improbable.

    lhs = mu{ x : sum of a_i over events containing x >= a }, rhs =
    max_i mu(E_i) / a.  Returns (lhs, rhs) and asserts lhs <= rhs.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
        raise WeightsInvalid("event weights must be nonnegative and sum to 1")
    if a_threshold <= 0:
        raise WeightsInvalid("threshold a must be positive")
    events = [frozenset(e) for e in events]
    lhs = 0.0
    for point, mu_x in zip(space.points, space.weights):
        accum = float(sum(wi for ev, wi in zip(events, w) if point in ev))
        if accum >= a_threshold - 1e-15:
            lhs += float(mu_x)
    rhs = max(space.mass(ev) for ev in events) / a_threshold
    assert lhs <= rhs + 1e-12, "union-cap lemma bound failed"
    return lhs, rhs
