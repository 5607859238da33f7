from fractions import Fraction

import numpy as np
import pytest

from grassproj import additive as ad
from grassproj import dset
from grassproj.errors import DimMismatch, EmptyInput, PreconditionViolated, WeightsInvalid


def L(*elems):
    return ad.LatticeSet.of([(e,) if isinstance(e, int) else e for e in elems])


def test_sumset_identity():
    a = L((1, 2), (3, 4))
    zero = L((0, 0))
    assert ad.sumset(zero, a).elements == a.elements


def test_sumset_small():
    got = ad.sumset(L(0, 1), L(0, 1))
    assert got.elements == frozenset({(0,), (1,), (2,)})


def test_sumset_progression():
    ap = ad.LatticeSet.interval(0, 9)
    s = ad.sumset(ap, ap)
    assert len(s) == 19
    assert s.elements == frozenset((i,) for i in range(19))


def test_sumset_dim_mismatch():
    with pytest.raises(DimMismatch):
        ad.sumset(L(0), L((0, 0)))


def test_energy_discrete_injective():
    a = ad.LatticeSet.interval(0, 6)
    phi = ad.FiberMap.from_callable(a.elements, lambda e: e)
    assert ad.energy_discrete(phi, a) == 7


def test_energy_discrete_constant():
    a = ad.LatticeSet.interval(0, 4)
    phi = ad.FiberMap.from_callable(a.elements, lambda e: (0,))
    assert ad.energy_discrete(phi, a) == 25


def test_energy_discrete_fibers():
    a = L((0, 0), (0, 1), (1, 0))
    phi = ad.FiberMap.coordinate(a.elements, [0])
    assert ad.energy_discrete(phi, a) == 5  # fibers of sizes 2 and 1


def test_energy_discrete_cauchy_schwarz():
    rng = np.random.default_rng(41)
    for _ in range(200):
        pts = {tuple(p) for p in rng.integers(0, 6, size=(rng.integers(1, 25), 2))}
        a = ad.LatticeSet(2, frozenset(pts))
        phi = ad.FiberMap.coordinate(a.elements, [0])
        image = {phi(e) for e in a.elements}
        assert ad.energy_discrete(phi, a) * len(image) >= len(a) ** 2


def test_energy_delta_identity_separated():
    a = dset.DiscretizedSet(1, 4, [[0], [4], [9]])  # pairwise > 2 delta apart
    assert ad.energy_delta(lambda c: c, a) == 3


def test_energy_delta_constant():
    a = dset.DiscretizedSet(1, 4, [[0], [1], [2], [7]])
    assert ad.energy_delta(lambda c: np.zeros((c.shape[0], 1)), a) == 16


def test_energy_delta_bruteforce_oracle():
    a = dset.DiscretizedSet(2, 3, [[i, i] for i in range(8)])
    phi = lambda c: c[:, :1]  # coordinate projection of the diagonal
    got = ad.energy_delta(phi, a)
    centers = a.centers()
    vals = centers[:, :1]
    oracle = sum(
        1
        for i in range(len(vals))
        for j in range(len(vals))
        if abs(vals[i, 0] - vals[j, 0]) <= a.delta + 1e-12
    )
    assert got == oracle


def test_energy_delta_lower_bound():
    a = dset.DiscretizedSet(2, 4, np.random.default_rng(3).integers(0, 12, (30, 2)))
    phi = lambda c: c[:, :1]
    en = ad.energy_delta(phi, a)
    image = dset.from_points(np.asarray(phi(a.centers())), a.k)
    assert en >= 8.0 ** (-2 * a.n) * a.cell_count**2 / image.cell_count


def test_additive_energy_pairs():
    a = L(0, 1)
    assert ad.additive_energy(a, a) == 6


def test_additive_energy_singleton():
    a = L(0)
    b = ad.LatticeSet.interval(0, 6)
    assert ad.additive_energy(a, b) == len(b)


def test_additive_energy_interval():
    a = ad.LatticeSet.interval(0, 3)
    assert ad.additive_energy(a, a) == 44  # sum of (1,2,3,4,3,2,1)^2


def quadruple_oracle(a, b):
    elems_a = list(a.elements)
    elems_b = list(b.elements)
    count = 0
    for p in elems_a:
        for p2 in elems_a:
            for q in elems_b:
                for q2 in elems_b:
                    if all(x + y == x2 + y2 for x, y, x2, y2 in zip(p, q, p2, q2)):
                        count += 1
    return count


def test_additive_energy_quadruple_oracle():
    rng = np.random.default_rng(44)
    for _ in range(50):
        a = ad.LatticeSet(2, frozenset(tuple(p) for p in rng.integers(0, 5, (6, 2))))
        b = ad.LatticeSet(2, frozenset(tuple(p) for p in rng.integers(0, 5, (6, 2))))
        assert ad.additive_energy(a, b) == quadruple_oracle(a, b)


def test_additive_energy_convolution_oracle():
    rng = np.random.default_rng(45)
    for _ in range(100):
        vals = rng.choice(40, size=rng.integers(2, 15), replace=False)
        a = ad.LatticeSet.of([(int(v),) for v in vals])
        ind = np.zeros(41)
        ind[vals] = 1.0
        reps = np.convolve(ind, ind)
        assert ad.additive_energy(a, a) == int(round(float(np.sum(reps**2))))


def make_fiber_instance(sizes):
    """BuildLatticeSet + fiber map with the prescribed fiber sizes."""
    elems = []
    table = {}
    for y, c in enumerate(sizes):
        for i in range(c):
            e = (y, i)
            elems.append(e)
            table[e] = (y,)
    a = ad.LatticeSet(2, frozenset(elems))
    return a, ad.FiberMap(table)


def test_trim_keeps_all():
    a, phi = make_fiber_instance([3, 3, 1])
    out = ad.trim_small_fibers(a, phi, 3, 2)
    assert out.elements == a.elements


def test_trim_drops_small():
    a, phi = make_fiber_instance([4, 4, 1])
    out = ad.trim_small_fibers(a, phi, 4, Fraction(6, 5))
    assert len(out) == 8
    image = {phi(e) for e in out.elements}
    assert len(image) == 2
    assert 2 * Fraction(6, 5) * len(out) >= len(a)
    assert 4 * len(image) <= 2 * Fraction(6, 5) * len(a)


def test_trim_injective():
    a, phi = make_fiber_instance([1] * 9)
    out = ad.trim_small_fibers(a, phi, 1, 1)
    assert out.elements == a.elements


def test_trim_precondition_violations():
    a, phi = make_fiber_instance([1, 1, 1, 1])
    with pytest.raises(PreconditionViolated):
        ad.trim_small_fibers(a, phi, 4, 1)  # energy 4 < (4/1)*4
    a2, phi2 = make_fiber_instance([5, 5])
    with pytest.raises(PreconditionViolated):
        ad.trim_small_fibers(a2, phi2, 4, 100)  # fiber 5 > M = 4


def test_trim_randomized_postconditions():
    rng = np.random.default_rng(46)
    checked = 0
    for _ in range(10_000):
        sizes = rng.integers(1, 21, size=rng.integers(1, 12))
        m_bound = int(sizes.max())
        k_param = Fraction(int(rng.integers(1, 5)), 1) + Fraction(int(rng.integers(0, 4)), 4)
        a, phi = make_fiber_instance([int(s) for s in sizes])
        energy = sum(int(s) ** 2 for s in sizes)
        if energy * k_param < m_bound * len(a):
            continue
        out = ad.trim_small_fibers(a, phi, m_bound, k_param)
        image = {phi(e) for e in out.elements}
        assert 2 * k_param * len(out) >= len(a)
        assert m_bound * len(image) <= 2 * k_param * len(a)
        checked += 1
    assert checked > 1000


def test_ruzsa_triangle_singleton():
    s = L((5, 5))
    assert ad.ruzsa_triangle_defect(s, s, s) == 1.0


def test_ruzsa_triangle_interval():
    a = ad.LatticeSet.interval(0, 9)
    assert ad.ruzsa_triangle_defect(a, a, a) == pytest.approx(10 * 19 / (19 * 19))


def test_ruzsa_triangle_random():
    rng = np.random.default_rng(47)
    for _ in range(300):
        mk = lambda: ad.LatticeSet(
            2, frozenset(tuple(p) for p in rng.integers(0, 101, (20, 2)))
        )
        assert ad.ruzsa_triangle_defect(mk(), mk(), mk()) <= 1.0 + 1e-12


def test_ruzsa_empty_raises():
    a = ad.LatticeSet.interval(0, 3)
    with pytest.raises(EmptyInput):
        ad.ruzsa_triangle_defect(a, ad.LatticeSet(1, frozenset()), a)


def test_pluennecke_interval():
    a = ad.LatticeSet.interval(0, 9)
    k_const, ratio = ad.pluennecke_witness(a, a, 1, 1)
    assert k_const == pytest.approx(1.9)
    assert ratio == pytest.approx(19 / (1.9**2 * 10))


def test_pluennecke_singleton():
    a = L((2, 3))
    b = L((0, 0), (1, 1))
    _, ratio = ad.pluennecke_witness(a, b, 3, 2)
    assert ratio <= 1.0


def test_pluennecke_square():
    a = ad.LatticeSet.of([(x, y) for x in (0, 1) for y in (0, 1)])
    k_const, ratio = ad.pluennecke_witness(a, a, 2, 0)
    assert k_const == pytest.approx(2.25)
    assert ratio == pytest.approx(9 / (2.25**2 * 4))


def test_intersection_lemma_trivial():
    space = ad.FiniteProbSpace.uniform(["t1", "t2", "t3"])
    ground = {(i,) for i in range(5)}
    fam = {t: ground for t in space.points}
    mass = ad.check_intersection_lemma(space, fam, q=2, k_param=1.0)
    assert mass == pytest.approx(1.0)


def test_intersection_lemma_split():
    space = ad.FiniteProbSpace.uniform([1, 2])
    fam = {1: {1, 2}, 2: {3, 4}}
    mass = ad.check_intersection_lemma(space, fam, q=2, k_param=2.0)
    assert mass == pytest.approx(0.5)
    assert mass >= 1.0 / (2 * 2.0**2)


def test_intersection_lemma_q1():
    space = ad.FiniteProbSpace.uniform([1, 2, 3])
    fam = {1: {1}, 2: {2}, 3: {3}}
    mass = ad.check_intersection_lemma(space, fam, q=1, k_param=3.0)
    assert mass == pytest.approx(1.0)


def test_intersection_lemma_precondition():
    space = ad.FiniteProbSpace.uniform([1, 2])
    fam = {1: {1, 2, 3, 4}, 2: {1}}
    with pytest.raises(PreconditionViolated):
        ad.check_intersection_lemma(space, fam, q=2, k_param=2.0)


def test_intersection_lemma_monte_carlo():
    pts = list(range(40))
    space = ad.FiniteProbSpace.uniform(pts)
    ground = set(range(100))
    rng = np.random.default_rng(48)
    fam = {p: set(rng.choice(100, size=60, replace=False)) for p in pts}
    est = ad.check_intersection_lemma(space, fam, q=4, k_param=100 / 60, trials=4000, seed=9)
    assert 0.0 <= est <= 1.0
    est2 = ad.check_intersection_lemma(space, fam, q=4, k_param=100 / 60, trials=4000, seed=9)
    assert est == est2  # seeded determinism


def test_union_cap_single_event():
    space = ad.FiniteProbSpace.uniform(list(range(10)))
    lhs, rhs = ad.check_union_cap_lemma(space, [set(range(4))], [1.0], 1.0)
    assert lhs == pytest.approx(0.4)
    assert rhs == pytest.approx(0.4)


def test_union_cap_disjoint():
    space = ad.FiniteProbSpace.uniform(list(range(9)))
    events = [set(range(0, 3)), set(range(3, 6)), set(range(6, 9))]
    lhs, rhs = ad.check_union_cap_lemma(space, events, [1 / 3] * 3, 2 / 3)
    assert lhs == 0.0


def test_union_cap_overlapping_scan():
    space = ad.FiniteProbSpace.uniform(list(range(10)))
    events = [set(range(0, 6)), set(range(4, 9)), {0, 4, 5, 9}]
    weights = [0.5, 0.3, 0.2]
    lhs, rhs = ad.check_union_cap_lemma(space, events, weights, 0.5)
    # exact scan: accumulated weight per point
    expect = 0.0
    for x in range(10):
        acc = sum(w for ev, w in zip(events, weights) if x in ev)
        if acc >= 0.5 - 1e-15:
            expect += 0.1
    assert lhs == pytest.approx(expect)
    assert lhs <= rhs


def test_union_cap_invalid_weights():
    space = ad.FiniteProbSpace.uniform([1, 2])
    with pytest.raises(WeightsInvalid):
        ad.check_union_cap_lemma(space, [{1}], [0.5], 1.0)
