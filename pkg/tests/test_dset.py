import math
from itertools import combinations, product

import numpy as np
import pytest

from grassproj import dset
from grassproj import grassmann as gr
from grassproj.errors import EmptySet, ScaleTooFine


def full_grid(n, k):
    side = 2**k
    cells = np.array(list(product(range(side), repeat=n)), dtype=np.int64)
    return dset.DiscretizedSet(n, k, cells)


def disc_cells(k, theta):
    """Exact enumeration oracle: all cells meeting B(0, 2^(-k*theta)) in R^2."""
    delta = 2.0**-k
    r = delta**theta if theta > 0 else 1.0
    t = int(math.ceil(r / delta)) + 1
    cells = []
    for z in product(range(-t, t + 1), repeat=2):
        corner = np.array(z, dtype=float) * delta
        nearest = np.clip(np.zeros(2), corner, corner + delta)
        if np.linalg.norm(nearest) <= r:
            cells.append(z)
    return dset.DiscretizedSet(2, k, np.array(cells, dtype=np.int64))


def segment(k, length):
    return dset.DiscretizedSet(1, k, np.arange(length, dtype=np.int64).reshape(-1, 1))


def test_from_points_grid():
    pts = [[i / 8.0] for i in range(8)]
    a = dset.from_points(pts, 3)
    assert a.cell_count == 8


def test_from_points_empty():
    a = dset.from_points([], 3, n=2)
    assert a.cell_count == 0


def test_from_points_collision():
    a = dset.from_points([[0.0], [0.01]], 3)
    assert a.cell_count == 1


def test_cell_count_full_grid():
    assert full_grid(2, 3).cell_count == 64


def test_cell_count_disc():
    a = disc_cells(10, 0.5)
    assert 3000 <= a.cell_count <= 3500  # approx pi * 2^10


def test_covering_number_single_cell():
    a = dset.DiscretizedSet(2, 4, [[0, 0]])
    assert dset.covering_number_balls(a, 0.25) == 1
    assert dset.covering_number_balls(a, 1.0) == 1


def test_covering_number_scale_too_fine():
    a = dset.DiscretizedSet(1, 3, [[0]])
    with pytest.raises(ScaleTooFine):
        dset.covering_number_balls(a, 0.01)


def brute_max_separated(centers, sep):
    """Brute-force maximum separated subset (oracle, tiny inputs only)."""
    best = 0
    n_pts = len(centers)
    for size in range(n_pts, 0, -1):
        for idx in combinations(range(n_pts), size):
            pts = [centers[i] for i in idx]
            if all(
                np.linalg.norm(np.array(p) - np.array(q)) >= sep
                for p, q in combinations(pts, 2)
            ):
                return size
        if best:
            break
    return best


def test_covering_number_segment_against_bruteforce():
    a = segment(3, 8)
    got = dset.covering_number_balls(a, 1.0 / 8.0)
    oracle = brute_max_separated([c for c in a.centers()], 2.0 / 8.0)
    assert oracle == 4
    assert got == 4  # pinned by the lexicographic scan
    assert 2 <= got <= 8


def test_covering_number_grid_ratio():
    a = full_grid(2, 4)
    cov = dset.covering_number_balls(a, 0.25)
    ratio = a.cell_count / cov
    assert 1 <= ratio <= 64  # (delta'/delta)^n = 4^2 = 16 with slack


def test_covering_sandwich_invariant():
    sets = [full_grid(2, 3), disc_cells(8, 0.5), segment(5, 20)]
    for a in sets:
        c = dset.cover_constant(a.n)
        for mult in (1.0, 2.0, 4.0):
            dp = a.delta * mult
            g_fine = dset.covering_number_balls(a, dp)
            g_coarse = dset.covering_number_balls(a, 2 * dp)
            assert g_coarse <= g_fine <= c * g_coarse


def test_neighborhood_zero():
    a = segment(3, 8)
    assert dset.neighborhood(a, 0.0) == a


def test_neighborhood_single_cell():
    a = dset.DiscretizedSet(2, 3, [[0, 0]])
    assert dset.neighborhood(a, a.delta).cell_count == 9


def test_neighborhood_segment():
    a = segment(3, 8)
    assert dset.neighborhood(a, 2 * a.delta).cell_count == 12


def test_neighborhood_monotone_and_growth():
    a = disc_cells(6, 0.5)
    prev = a.cell_count
    for rho_mult in (1, 2, 4):
        rho = a.delta * rho_mult
        nb = dset.neighborhood(a, rho)
        assert nb.cell_count >= prev
        assert nb.contains_cells(a)
        assert nb.cell_count <= 4**a.n * (1 + rho / a.delta) ** a.n * a.cell_count
        prev = nb.cell_count


def test_restrict_ball_far_and_all():
    a = full_grid(2, 3)
    far = dset.restrict_ball(a, [50.0, 50.0], 1.0)
    assert far.cell_count == 0
    everything = dset.restrict_ball(a, [0.5, 0.5], 10.0)
    assert everything == a


def test_restrict_ball_enumeration_oracle():
    a = full_grid(2, 3)
    x = np.array([0.25, 0.25])
    rho = 0.25
    got = dset.restrict_ball(a, x, rho)
    r = rho + a.delta * math.sqrt(2) / 2
    oracle = sum(1 for c in a.centers() if np.linalg.norm(c - x) <= r)
    assert got.cell_count == oracle
    assert 4 <= got.cell_count <= 36


def test_project_set_grid_axis():
    a = full_grid(2, 3)
    v = gr.Subspace.coordinate(2, [0])
    p = dset.project_set(a, v)
    assert p.n == 1
    assert p.cell_count == 8


def test_project_set_single_cell():
    a = dset.DiscretizedSet(2, 4, [[3, 5]])
    v = gr.orthonormalize([[1.0, 1.0]])
    assert dset.project_set(a, v).cell_count == 1


def test_project_set_disc_all_directions():
    a = disc_cells(10, 0.5)
    rng = np.random.default_rng(5)
    for _ in range(8):
        v = gr.orthonormalize(rng.standard_normal((1, 2)))
        p = dset.project_set(a, v)
        assert 55 <= p.cell_count <= 80  # approx 2 * 2^5 = 64


def test_projection_cannot_increase():
    rng = np.random.default_rng(6)
    a = disc_cells(8, 0.5)
    for _ in range(5):
        v = gr.orthonormalize(rng.standard_normal((1, 2)))
        assert dset.project_set(a, v).cell_count <= 2**a.n * a.cell_count


def test_slice_grid_column():
    a = full_grid(2, 3)
    v = gr.Subspace.coordinate(2, [0])
    y = np.array([3.5 / 8.0])  # center of column 3
    s = dset.slice_set(a, v, y)
    assert s.cell_count == 8
    assert all(c[0] == 3 for c in s.cell_tuples())


def test_slice_outside_empty():
    a = full_grid(2, 3)
    v = gr.Subspace.coordinate(2, [0])
    assert dset.slice_set(a, v, [5.0]).cell_count == 0


def test_linear_image_identity():
    a = full_grid(2, 3)
    assert dset.linear_image(a, gr.LinearMap.identity(2)) == a


def test_linear_image_scaling_single_cell():
    a = dset.DiscretizedSet(2, 3, [[1, 1]])
    f = gr.LinearMap(2, [[2.0, 0.0], [0.0, 2.0]])
    img = dset.linear_image(a, f)
    assert 1 <= img.cell_count <= 4


def test_linear_image_rotation_oracle():
    a = segment(3, 8)
    # embed the 1-d segment into R^2 along the x-axis, then rotate 45 degrees
    cells2 = np.hstack([a.cells, np.zeros((8, 1), dtype=np.int64)])
    a2 = dset.DiscretizedSet(2, 3, cells2)
    th = math.radians(45)
    f = gr.LinearMap(2, [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    img = dset.linear_image(a2, f)
    oracle = {tuple(np.floor((f.entries @ c) / a2.delta).astype(int)) for c in a2.centers()}
    assert img.cell_count == len(oracle)
    assert 8 <= img.cell_count <= 16
    bound = 4**a2.n * f.op_norm**a2.n * a2.cell_count
    assert img.cell_count <= bound


def test_linear_image_lipschitz_bound():
    rng = np.random.default_rng(9)
    a = disc_cells(7, 0.5)
    for _ in range(5):
        f = gr.LinearMap(2, rng.standard_normal((2, 2)))
        img = dset.linear_image(a, f)
        k_lip = max(f.op_norm, 1.0)
        assert img.cell_count <= 4**a.n * k_lip**a.n * a.cell_count


def test_frostman_single_cell():
    a = dset.DiscretizedSet(2, 5, [[0, 0]])
    for kappa in (0.5, 1.0, 2.0):
        assert dset.frostman_stat(a, kappa) == pytest.approx(a.delta**-kappa)


def test_frostman_full_grid():
    a = full_grid(2, 4)
    assert dset.frostman_stat(a, 2.0) <= 4**2


def test_frostman_empty_raises():
    a = dset.from_points([], 3, n=1)
    with pytest.raises(EmptySet):
        dset.frostman_stat(a, 1.0)


def cantor_cells_1d(levels):
    cells = [0]
    for _ in range(levels):
        cells = [4 * c + d for c in cells for d in (0, 3)]
    return cells


def test_frostman_cantor():
    one_d = cantor_cells_1d(5)
    cells = np.array([(x, y) for x in one_d for y in one_d], dtype=np.int64)
    a = dset.DiscretizedSet(2, 10, cells)
    assert a.cell_count == 1024
    assert dset.frostman_stat(a, 0.5) <= 8
    assert dset.frostman_stat(a, 1.0) <= 8


def test_mass_levels_uniform():
    a = full_grid(2, 3)
    w = dset.WeightedCellSet.uniform(a)
    levels = dset.mass_levels(w, 0.5)
    nonempty = [i for i, lv in enumerate(levels) if lv.cell_count]
    assert len(nonempty) == 1
    l = nonempty[0]
    delta, eps, n_cells = a.delta, 0.5, a.cell_count
    assert delta ** ((l + 1) * eps) < 1.0 / n_cells <= delta ** (l * eps)
    assert levels[l].cell_count == n_cells


def test_mass_levels_point_mass():
    a = dset.DiscretizedSet(1, 4, [[2]])
    w = dset.WeightedCellSet(a, [1.0])
    levels = dset.mass_levels(w, 0.3)
    assert levels[0].cell_count == 1
    assert all(lv.cell_count == 0 for lv in levels[1:])


def test_mass_levels_two_tier():
    a = dset.DiscretizedSet(1, 8, np.arange(8).reshape(-1, 1))
    p, q = 0.24, 0.01  # 4 heavy cells, 4 light cells
    w = dset.WeightedCellSet(a, [p] * 4 + [q] * 4)
    levels = dset.mass_levels(w, 0.25)
    nonempty = [lv for lv in levels if lv.cell_count]
    assert len(nonempty) == 2
    assert sorted(lv.cell_count for lv in nonempty) == [4, 4]
    # every cell is in exactly one level (disjointness)
    seen = set()
    for lv in levels:
        for c in lv.cell_tuples():
            assert c not in seen
            seen.add(c)


def test_mass_levels_dropped_weight_bound():
    rng = np.random.default_rng(71)
    eps = 0.4
    for _ in range(20):
        k = int(rng.integers(3, 7))
        count = int(rng.integers(1, 40))
        cells = rng.integers(0, 2**k, size=(count, 2))
        a = dset.DiscretizedSet(2, k, cells)
        raw = rng.random(a.cell_count) ** 4 + 1e-15
        w = dset.WeightedCellSet(a, raw / raw.sum())
        levels = dset.mass_levels(w, eps)
        kept = set()
        for lv in levels:
            kept |= set(lv.cell_tuples())
        dropped = sum(
            wt for c, wt in zip(a.cell_tuples(), w.weights) if c not in kept
        )
        assert dropped <= a.delta**eps + 1e-12


def test_delta_cap_comparison():
    rng = np.random.default_rng(21)
    for _ in range(30):
        n = int(rng.integers(1, 3))
        k = 4
        a = dset.DiscretizedSet(n, k, rng.integers(0, 10, size=(8, n)))
        b = dset.DiscretizedSet(n, k, rng.integers(0, 10, size=(8, n)))
        lhs = dset.intersect_cells(dset.neighborhood(a, 2 * a.delta), b).cell_count
        rhs = dset.intersect_cells(
            dset.neighborhood(a, a.delta), dset.neighborhood(b, b.delta)
        ).cell_count
        assert lhs <= 8**n * rhs


def test_tilt_cart_product_bound():
    rng = np.random.default_rng(22)
    a = disc_cells(7, 0.5)
    for _ in range(20):
        v1 = gr.orthonormalize(rng.standard_normal((1, 2)))
        v2 = gr.orthonormalize(rng.standard_normal((1, 2)))
        d = gr.dang_gram(v1, v2)
        if d < 1e-3:
            continue
        prod = dset.project_set(a, v1).cell_count * dset.project_set(a, v2).cell_count
        assert a.cell_count <= 8**a.n * d**-a.n * prod


def test_scale_monotonicity():
    a = disc_cells(8, 0.5)
    for k_prime in (8, 7, 6, 5):
        coarse = dset.coarsen(a, k_prime)
        assert a.cell_count <= 4**a.n * 2 ** ((a.k - k_prime) * a.n) * coarse.cell_count


def test_coarsen_negative_cells():
    a = dset.DiscretizedSet(1, 3, [[-3], [-2], [5]])
    c = dset.coarsen(a, 2)
    assert set(c.cell_tuples()) == {(-2,), (-1,), (2,)}


def test_file_roundtrip(tmp_path):
    rng = np.random.default_rng(33)
    a = dset.DiscretizedSet(3, 6, rng.integers(-40, 40, size=(100, 3)))
    path = tmp_path / "x.set"
    dset.save_set(a, path)
    b = dset.load_set(path)
    assert a == b
    dset.save_set(b, tmp_path / "y.set")
    assert (tmp_path / "x.set").read_bytes() == (tmp_path / "y.set").read_bytes()
