"""Random subspaces and empirical measures on the Grassmannian.

All randomness flows through a counter-based Philox generator keyed by an
explicit 64-bit seed, so every experiment is reproducible bit-for-bit and
per-trial streams can be derived independently of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimOverflow, EmptySupport, RankDeficient
from .grassmann import (
    Subspace,
    dang_gram,
    intersect,
    orthonormalize,
    perp,
    sum_spaces,
)

RANK_TOL = 1e-8


@dataclass(frozen=True)
class Rng:
    """Deterministic counter-based generator: same (seed, stream) => same draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % 2**64, self.stream % 2**64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def derive(self, index: int) -> "Rng":
        """Independent child stream, e.g. one per trial."""
        return Rng(self.seed, self.stream * 0x9E3779B97F4A7C15 + index + 1)


def haar_sample(n: int, m: int, rng: Rng) -> Subspace:
    """Rotation-invariant random m-plane: orthonormalized Gaussian rows."""
    if not 0 < m < n:
        raise DimOverflow(f"need 0 < m < n, got m={m}, n={n}")
    gen = rng.generator()
    while True:
        x = gen.standard_normal((m, n))
        try:
            return orthonormalize(x)
        except RankDeficient:
            continue  # probability-zero event: redraw from the same stream


@dataclass(frozen=True)
class GrassmannSample:
    """Weighted finite list of m-planes standing in for a measure on Gr(n, m)."""

    n: int
    m: int
    entries: tuple = field(repr=False)  # (Subspace, weight) pairs

    def __post_init__(self):
        entries = tuple((v, float(w)) for v, w in self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise EmptySupport("sample needs at least one subspace")
        for v, w in entries:
            if v.ambient_dim != self.n or v.dim != self.m:
                raise DimOverflow(f"subspace of shape ({v.ambient_dim},{v.dim}) in Gr({self.n},{self.m}) sample")
            if w < 0:
                raise ValueError("weights must be nonnegative")
        total = sum(w for _, w in entries)
        if abs(total - 1.0) > 1e-12:
            entries = tuple((v, w / total) for v, w in entries)
            object.__setattr__(self, "entries", entries)

    @property
    def subspaces(self):
        return [v for v, _ in self.entries]

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.entries])

    @classmethod
    def from_haar(cls, n: int, m: int, count: int, rng: Rng) -> "GrassmannSample":
        entries = [(haar_sample(n, m, rng.derive(i)), 1.0 / count) for i in range(count)]
        return cls(n, m, tuple(entries))

    @classmethod
    def point_mass(cls, v: Subspace) -> "GrassmannSample":
        return cls(v.ambient_dim, v.dim, ((v, 1.0),))

    def draw(self, gen: np.random.Generator) -> Subspace:
        idx = int(gen.choice(len(self.entries), p=self.weights))
        return self.entries[idx][0]


@dataclass(frozen=True)
class HaarMeasure:
    """The continuous rotation-invariant measure on Gr(n, m).

    Unlike a finite GrassmannSample, every draw is a fresh subspace, so
    q-tuples never repeat an atom; this is the measure the dimension
    experiments are stated for.
    """

    n: int
    m: int

    def draw(self, gen: np.random.Generator) -> Subspace:
        while True:
            try:
                return orthonormalize(gen.standard_normal((self.m, self.n)))
            except RankDeficient:
                continue


def degenerate_probe(v: Subspace) -> Subspace:
    """A W in Gr(n, n-m) with dang(V, W) = 0: the worst probe for the atom V.

    Built by containment: if m <= n-m, extend V by directions of V-perp;
    otherwise take the first n-m basis directions of V.  Either way W meets
    V nontrivially, so the atom sits on the Schubert cycle of W.
    """
    n, m = v.ambient_dim, v.dim
    target = n - m
    if m <= target:
        extra = perp(v).basis[: target - m]
        rows = np.vstack([v.basis, extra])
    else:
        rows = v.basis[:target]
    return Subspace(n, target, rows)


def noncon_stat(mu: GrassmannSample, kappa: float, k: int, probes: int, rng: Rng) -> float:
    """Worst ratio mu(V(W, rho)) / rho^kappa over probes W and dyadic rho.

    The probe family is finite: for each support atom V both its
    orthocomplement and its degenerate containment probe (the latter has
    dang(V, W) = 0 and is what actually detects atom concentration), plus
    `probes` Haar draws from Gr(n, n-m).  rho runs over {2^-k, ..., 1}.
    A result of at most 1 is the non-concentration hypothesis with no
    loss; for diffuse measures the finite family may under-report the
    true supremum.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    n, m = mu.n, mu.m
    probe_list = [degenerate_probe(v) for v in mu.subspaces]
    probe_list += [perp(v) for v in mu.subspaces]
    probe_list += [haar_sample(n, n - m, rng.derive(i)) for i in range(probes)]
    weights = mu.weights
    stat = 0.0
    for w_probe in probe_list:
        dangs = np.array([dang_gram(v, w_probe) for v in mu.subspaces])
        for j in range(k + 1):
            rho = 2.0**-j
            mass = float(np.sum(weights[dangs <= rho]))
            if mass:
                stat = max(stat, mass / rho**kappa)
    return stat


@dataclass(frozen=True)
class SumExperimentReport:
    full_dim_fraction: float
    min_dang: float
    trials: int


def random_sum_experiment(mu: GrassmannSample, q: int, trials: int, rng: Rng) -> SumExperimentReport:
    """Draw q-tuples iid from mu; how often is V_1 + ... + V_q full rank qm?"""
    n, m = mu.n, mu.m
    if q * m > n:
        raise DimOverflow(f"q*m = {q * m} exceeds n = {n}")
    full = 0
    min_dang = math.inf
    for t in range(trials):
        gen = rng.derive(t).generator()
        vs = [mu.draw(gen) for _ in range(q)]
        stacked = np.vstack([v.basis for v in vs])
        s = np.linalg.svd(stacked, compute_uv=False)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
        if rank == q * m:
            full += 1
        min_dang = min(min_dang, dang_gram(*vs))
    return SumExperimentReport(full / trials, float(min_dang), trials)


@dataclass(frozen=True)
class IntersectionExperimentReport:
    target_dim_fraction: float
    dim_counts: dict
    trials: int


def random_intersection_experiment(mu: GrassmannSample, q: int, trials: int, rng: Rng) -> IntersectionExperimentReport:
    """Draw q-tuples iid from mu; how often does the intersection have the
    generic dimension n - q(n - m)?

    The intersection is computed through perp-sum duality and cross-checked
    against a direct nullspace computation on stacked projectors.
    """
    n, m = mu.n, mu.m
    target = n - q * (n - m)
    if target < 0:
        raise DimOverflow(f"q(n-m) = {q * (n - m)} exceeds n = {n}")
    hits = 0
    counts: dict[int, int] = {}
    for t in range(trials):
        gen = rng.derive(t).generator()
        vs = [mu.draw(gen) for _ in range(q)]
        inter = intersect(*vs)
        # independent check: x in every V_i iff (I - P_i) x = 0 for all i
        stacked = np.vstack([np.eye(n) - v.basis.T @ v.basis for v in vs])
        s = np.linalg.svd(stacked, compute_uv=False)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
        null_dim = n - rank
        assert null_dim == inter.dim, "duality and nullspace computations disagree"
        counts[inter.dim] = counts.get(inter.dim, 0) + 1
        if inter.dim == target:
            hits += 1
    return IntersectionExperimentReport(hits / trials, counts, trials)


def save_sample(mu: GrassmannSample, path) -> None:
    """Text format: 'n m count', then per subspace a weight line and m rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{mu.n} {mu.m} {len(mu.entries)}\n")
        for v, w in mu.entries:
            fh.write(f"{w:.17g}\n")
            for row in v.basis:
                fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_sample(path) -> GrassmannSample:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("sample file: first line must be 'n m count'")
        n, m, count = (int(x) for x in header)
        entries = []
        for _ in range(count):
            w = float(fh.readline().strip())
            rows = []
            for _ in range(m):
                parts = fh.readline().split()
                if len(parts) != n:
                    raise ValueError(f"sample file: expected {n} floats per basis row")
                rows.append([float(p) for p in parts])
            entries.append((Subspace(n, m, np.array(rows)), w))
    return GrassmannSample(n, m, tuple(entries))


def dang_chain_lower_bound(spaces, w: Subspace) -> float:
    """Telescoping lower bound for dang(V_1 + ... + V_q, W)."""
    bound = 1.0
    for j, v in enumerate(spaces):
        prior = list(spaces[:j]) + [w]
        bound *= dang_gram(v, sum_spaces(*prior))
    return bound
