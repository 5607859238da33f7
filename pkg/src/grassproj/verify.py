"""Named invariant suites behind the `verify` CLI command.

Each suite runs a batch of randomized or exhaustive checks and returns a
SuiteResult; the first violation is captured as a JSON-serializable
reproducer so a failing run can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import additive as ad
from . import grassmann as gr
from . import lattice_cover as lc
from .randgrass import Rng


@dataclass
class SuiteResult:
    suite: str
    checked: int
    violations: int
    reproducer: dict | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _haar(gen, n, m):
    return gr.orthonormalize(gen.standard_normal((m, n)))


def _random_split(gen, n, parts, reserve=0):
    """Random positive dimensions summing to at most n - reserve."""
    dims = []
    left = n - reserve
    for i in range(parts):
        remaining_parts = parts - i - 1
        hi = left - remaining_parts
        if hi < 1:
            return None
        d = int(gen.integers(1, hi + 1))
        dims.append(d)
        left -= d
    return dims


def geometry_suite(trials: int = 1000, seed: int = 0, tol: float = 1e-9) -> SuiteResult:
    """Randomized wedge-calculus identities at ambient dimension <= 6."""
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        n = int(gen.integers(3, 7))

        dims = _random_split(gen, n, 3)
        if dims is None:
            continue
        u, v, w = (_haar(gen, n, d) for d in dims)

        lhs = gr.dang_gram(u, v, w)
        rhs = gr.dang_gram(gr.sum_spaces(u, v), w) * gr.dang_gram(u, v)
        if abs(lhs - rhs) > tol:
            return SuiteResult("geometry", checked, 1, {"identity": "dang_uvw", "trial": t, "seed": seed})

        chain = gr.dang_gram(v, u) * gr.dang_gram(w, gr.sum_spaces(u, v))
        if abs(gr.dang_gram(u, v, w) - chain) > tol:
            return SuiteResult("geometry", checked, 1, {"identity": "chain", "trial": t, "seed": seed})

        z = np.sum([gr.embed(s, gen.standard_normal(s.dim)) for s in (u, v, w)], axis=0)
        if float(np.linalg.norm(z)) * lhs > sum(
            float(np.linalg.norm(gr.project(s, z))) for s in (u, v, w)
        ) + tol:
            return SuiteResult("geometry", checked, 1, {"identity": "cylinders", "trial": t, "seed": seed})

        m = int(gen.integers(1, n))
        a = _haar(gen, n, m)
        b = _haar(gen, n, n - m)
        if abs(gr.dang_gram(a, b) - gr.dang_gram(gr.perp(a), gr.perp(b))) > 1e-10:
            return SuiteResult("geometry", checked, 1, {"identity": "perp_duality", "trial": t, "seed": seed})
        if abs(gr.dang_proj(a, b) - gr.dang_gram(a, b)) > 1e-10:
            return SuiteResult("geometry", checked, 1, {"identity": "det_vs_gram", "trial": t, "seed": seed})

        # compatible dimensions: dv + du <= dw, otherwise both sides are an
        # exact zero that the wedge norm can only reach to sqrt(eps)
        dw = int(gen.integers(2, n))
        wsp = _haar(gen, n, dw)
        du = int(gen.integers(1, dw))
        usp = gr.orthonormalize(gen.standard_normal((du, dw)) @ wsp.basis)
        dv = int(gen.integers(1, dw - du + 1))
        vsp = _haar(gen, n, dv)
        lhs2 = gr.dang_gram(vsp, gr.sum_spaces(usp, gr.perp(wsp)))
        rhs2 = gr.dang_gram(vsp, gr.perp(wsp)) * gr.dang_gram(gr.project_space(wsp, vsp), usp)
        if abs(lhs2 - rhs2) > tol:
            return SuiteResult("geometry", checked, 1, {"identity": "v_to_w_and_u", "trial": t, "seed": seed})

        x = gr.embed(wsp, gen.standard_normal(dw))
        vp = gr.project_space(wsp, vsp)
        lo = gr.dang_gram(vsp, gr.perp(wsp)) * float(np.linalg.norm(gr.project(vp, x)))
        mid = float(np.linalg.norm(gr.project(vsp, x)))
        hi = float(np.linalg.norm(gr.project(vp, x)))
        if not (lo <= mid + tol and mid <= hi + tol):
            return SuiteResult("geometry", checked, 1, {"identity": "sandwich", "trial": t, "seed": seed})

        checked += 1
    return SuiteResult("geometry", checked, 0)


def _pair_covers(n: int):
    """All 2-uniform covers of {1..n} by pairs (multisets)."""
    pairs = [frozenset(p) for p in combinations(range(1, n + 1), 2)]
    covers = []
    for count in range(1, len(pairs) * 2 + 1):
        for combo in combinations_with_replacement_cached(pairs, count):
            try:
                cov = lc.UniformCover(tuple(combo), frozenset(range(1, n + 1)))
            except Exception:
                continue
            if cov.k == 2:
                covers.append(cov)
    # dedupe by member multiset
    seen = set()
    unique = []
    for cov in covers:
        key = tuple(sorted(tuple(sorted(m)) for m in cov.members))
        if key not in seen:
            seen.add(key)
            unique.append(cov)
    return unique


_CWR_CACHE: dict = {}


def combinations_with_replacement_cached(items, count):
    from itertools import combinations_with_replacement

    key = (tuple(items), count)
    if key not in _CWR_CACHE:
        _CWR_CACHE[key] = list(combinations_with_replacement(items, count))
    return _CWR_CACHE[key]


def random_uniform_cover(gen, n: int) -> lc.UniformCover:
    """A random k-uniform cover of {1..n}: union of k random partitions."""
    k = int(gen.integers(1, 4))
    members = []
    for _ in range(k):
        labels = gen.integers(0, int(gen.integers(1, n + 1)), size=n)
        for lab in set(labels.tolist()):
            members.append(frozenset(i + 1 for i in range(n) if labels[i] == lab))
    return lc.UniformCover(tuple(members), frozenset(range(1, n + 1)))


def uct_suite(cube_dim: int = 3, random_trials: int = 2000, seed: int = 0) -> SuiteResult:
    """Exhaustive uniform-cover checks on {0,1}^n plus random instances."""
    checked = 0
    cells = list(product((0, 1), repeat=cube_dim))
    covers = _pair_covers(cube_dim)
    for size in range(len(cells) + 1):
        for subset in combinations(cells, size):
            z = lc.LatticeSet(cube_dim, frozenset(subset))
            for cov in covers:
                lhs, rhs = lc.uct_check(z, cov)
                if lhs > rhs:
                    return SuiteResult("uct", checked, 1, {"subset": sorted(subset)})
                checked += 1
    base = Rng(seed)
    for t in range(random_trials):
        gen = base.derive(t).generator()
        pts = {tuple(p) for p in gen.integers(0, 5, size=(int(gen.integers(1, 30)), 4))}
        z = lc.LatticeSet(4, frozenset(pts))
        cov4 = random_uniform_cover(gen, 4)
        lhs, rhs = lc.uct_check(z, cov4)
        if lhs > rhs:
            return SuiteResult("uct", checked, 1, {"set": sorted(pts), "trial": t, "seed": seed})
        checked += 1
    return SuiteResult("uct", checked, 0)


def energy_proj_suite(seed: int = 0, random_trials: int = 1000) -> SuiteResult:
    """Exhaustive refinement checks over {0,1}^3 plus random 4-d sets."""
    checked = 0
    cov = lc.UniformCover((frozenset({1}), frozenset({2})), frozenset({1, 2}))
    cells = list(product((0, 1), repeat=3))
    for size in range(len(cells) + 1):
        for subset in combinations(cells, size):
            z = lc.LatticeSet(3, frozenset(subset))
            lhs, rhs = lc.energy_proj_check(z, frozenset({3}), cov, 1)
            if lhs > rhs:
                return SuiteResult("energy-proj", checked, 1, {"subset": sorted(subset)})
            checked += 1
    cov4 = lc.UniformCover(
        (frozenset({1, 2}), frozenset({2, 3}), frozenset({1, 3})), frozenset({1, 2, 3})
    )
    base = Rng(seed)
    for t in range(random_trials):
        gen = base.derive(t).generator()
        pts = {tuple(p) for p in gen.integers(0, 4, size=(12, 4))}
        z = lc.LatticeSet(4, frozenset(pts))
        lhs, rhs = lc.energy_proj_check(z, frozenset({4}), cov4, 2)
        if lhs > rhs:
            return SuiteResult("energy-proj", checked, 1, {"set": sorted(pts), "trial": t, "seed": seed})
        checked += 1
    return SuiteResult("energy-proj", checked, 0)


TRICHOTOMY_SHAPES = ((3, 2, 2, 1), (5, 3, 2, 1), (5, 4, 4, 1), (4, 3, 3, 1))


def trichotomy_suite(trials: int = 10_000, seed: int = 0) -> SuiteResult:
    """Randomized witnesses across the four (n, m, q, r) shapes."""
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        n, m, q, r = TRICHOTOMY_SHAPES[int(gen.integers(0, len(TRICHOTOMY_SHAPES)))]
        count = int(gen.integers(1, 40))
        pts = {tuple(p) for p in gen.integers(0, 4, size=(count, n))}
        z = lc.LatticeSet(n, frozenset(pts))
        kf = Fraction(int(gen.integers(1, 9)), int(gen.integers(1, 5)))
        if kf < 1:
            kf = 1 / kf
        out = lc.trichotomy(z, n, m, q, r, kf)
        if not out.verify(z):
            return SuiteResult(
                "trichotomy", checked, 1,
                {"set": sorted(pts), "shape": [n, m, q, r], "K": str(kf), "trial": t, "seed": seed},
            )
        checked += 1
    return SuiteResult("trichotomy", checked, 0)


def ruzsa_suite(trials: int = 1000, seed: int = 0) -> SuiteResult:
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        mk = lambda: ad.LatticeSet(2, frozenset(tuple(p) for p in gen.integers(0, 101, (20, 2))))
        a, b, c = mk(), mk(), mk()
        if ad.ruzsa_triangle_defect(a, b, c) > 1.0 + 1e-12:
            return SuiteResult("ruzsa", checked, 1, {"trial": t, "seed": seed})
        checked += 1
    return SuiteResult("ruzsa", checked, 0)


def pluennecke_suite(trials: int = 500, seed: int = 0) -> SuiteResult:
    """K and ratio stay consistent: ratio recomputed from raw counts."""
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        a = ad.LatticeSet(1, frozenset((int(x),) for x in gen.integers(0, 30, 8)))
        b = ad.LatticeSet(1, frozenset((int(x),) for x in gen.integers(0, 30, 8)))
        k = int(gen.integers(0, 3))
        l = int(gen.integers(0, 3))
        if k + l == 0:
            k = 1
        doubling, ratio = ad.pluennecke_witness(a, b, k, l)
        spread = len(ad.difference(ad.iterated_sumset(a, k), ad.iterated_sumset(a, l)))
        expect = spread / (doubling ** (k + l) * len(b))
        if abs(ratio - expect) > 1e-12:
            return SuiteResult("pluennecke", checked, 1, {"trial": t, "seed": seed})
        checked += 1
    return SuiteResult("pluennecke", checked, 0)


def bigcap_suite(trials: int = 200, seed: int = 0) -> SuiteResult:
    """Random small intersection-lemma instances, exhaustive tuple scans."""
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        theta = int(gen.integers(2, 5))
        q = int(gen.integers(1, 4))
        ground = list(range(int(gen.integers(4, 10))))
        size_min = max(1, math.ceil(len(ground) / 2))
        fam = {
            i: set(int(x) for x in gen.choice(len(ground), size=int(gen.integers(size_min, len(ground) + 1)), replace=False))
            for i in range(theta)
        }
        union = set()
        for s in fam.values():
            union |= s
        # exact rational K so the precondition |A_theta| >= |A|/K holds with
        # equality instead of tripping on float rounding
        k_param = max(Fraction(len(union), len(s)) for s in fam.values())
        space = ad.FiniteProbSpace.uniform(list(range(theta)))
        try:
            ad.check_intersection_lemma(space, fam, q=q, k_param=k_param)
        except AssertionError:
            return SuiteResult("bigcap", checked, 1, {"family": {str(k): sorted(v) for k, v in fam.items()}, "q": q, "trial": t, "seed": seed})
        checked += 1
    return SuiteResult("bigcap", checked, 0)


def smallcap_suite(trials: int = 500, seed: int = 0) -> SuiteResult:
    checked = 0
    base = Rng(seed)
    for t in range(trials):
        gen = base.derive(t).generator()
        ground = list(range(int(gen.integers(5, 15))))
        space = ad.FiniteProbSpace.uniform(ground)
        n_events = int(gen.integers(1, 6))
        events = [
            set(int(x) for x in gen.choice(len(ground), size=int(gen.integers(1, len(ground) + 1)), replace=False))
            for _ in range(n_events)
        ]
        raw = gen.random(n_events) + 0.05
        weights = (raw / raw.sum()).tolist()
        a_threshold = float(gen.random() * 0.9 + 0.05)
        try:
            ad.check_union_cap_lemma(space, events, weights, a_threshold)
        except AssertionError:
            return SuiteResult("smallcap", checked, 1, {"events": [sorted(e) for e in events], "trial": t, "seed": seed})
        checked += 1
    return SuiteResult("smallcap", checked, 0)


SUITES = {
    "geometry": geometry_suite,
    "uct": uct_suite,
    "energy-proj": energy_proj_suite,
    "trichotomy": trichotomy_suite,
    "ruzsa": ruzsa_suite,
    "pluennecke": pluennecke_suite,
    "bigcap": bigcap_suite,
    "smallcap": smallcap_suite,
}
