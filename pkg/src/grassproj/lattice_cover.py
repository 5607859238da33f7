"""Discrete coordinate-projection model on Z^n.

Implements the uniform-cover product inequality, its energy refinement,
and the constructive trichotomy: for a finite Z subset of Z^n, either some
coordinate projection is large, or some bottom fiber is heavy, or a large
subset of Z has a small bottom projection.  All threshold comparisons are
exact: a >= K |Z|^(p/n) is decided by integer/rational n-th powers, so no
float tie can flip a verdict.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .additive import LatticeSet
from .errors import ArithmeticMismatch, BadIndex, EmptyInput, InvalidCover

__all__ = [
    "LatticeSet",
    "UniformCover",
    "TrichotomyOutcome",
    "project_coords",
    "index_family",
    "uct_check",
    "energy_proj_check",
    "trichotomy",
    "save_lattice",
    "load_lattice",
]


@dataclass(frozen=True)
class UniformCover:
    """A multiset of subsets of the ground index set, each index covered
    exactly k times.  Indices are 1-based."""

    members: tuple
    ground: frozenset
    k: int = field(init=False)

    def __post_init__(self):
        members = tuple(frozenset(int(i) for i in m) for m in self.members)
        ground = frozenset(int(i) for i in self.ground)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "ground", ground)
        if not members:
            raise InvalidCover("cover has no members")
        counts = Counter()
        for m in members:
            if not m <= ground:
                raise InvalidCover(f"member {sorted(m)} leaves the ground set")
            counts.update(m)
        ks = {counts[i] for i in ground}
        if len(ks) != 1 or 0 in ks:
            raise InvalidCover(f"cover is not uniform: multiplicities {dict(counts)}")
        object.__setattr__(self, "k", ks.pop())


def _check_indices(indices, n: int) -> tuple:
    idx = tuple(sorted(int(i) for i in indices))
    if not idx:
        raise BadIndex("index set must be nonempty")
    if idx[0] < 1 or idx[-1] > n:
        raise BadIndex(f"indices {idx} outside 1..{n}")
    return idx


def project_coords(z: LatticeSet, indices) -> LatticeSet:
    """Coordinate projection of Z onto the 1-based index subset."""
    idx = _check_indices(indices, z.dim)
    image = {tuple(e[i - 1] for i in idx) for e in z.elements}
    return LatticeSet(len(idx), frozenset(image))


def _fibers(z: LatticeSet, i0) -> Counter:
    """Fiber sizes of the projection onto I0 (I0 may be empty)."""
    i0 = tuple(sorted(i0))
    return Counter(tuple(e[i - 1] for i in i0) for e in z.elements)


def index_family(n: int, m: int, q: int, r: int):
    """The bottom index block I0 and the q complement blocks I_1..I_q.

    I0 = {n-r+1, ..., n}; I_j drops the j-th block of n-m coordinates.
    The family (I_j \\ I0) forms a (q-1)-uniform cover of {1..n} \\ I0,
    which is asserted.
    """
    if not (0 < m < n) or not (0 < r <= n - m) or n != q * (n - m) + r:
        raise ArithmeticMismatch(f"need n = q(n-m)+r with 0 < r <= n-m; got {(n, m, q, r)}")
    i0 = frozenset(range(n - r + 1, n + 1))
    blocks = []
    for j in range(1, q + 1):
        drop = set(range((j - 1) * (n - m) + 1, j * (n - m) + 1))
        blocks.append(frozenset(set(range(1, n + 1)) - drop))
    if q > 1:
        UniformCover(tuple(b - i0 for b in blocks), frozenset(range(1, n + 1)) - i0)
    return i0, blocks


def uct_check(z: LatticeSet, cover: UniformCover):
    """Both sides of |Z|^k <= prod |proj_I(Z)| as exact big integers."""
    if cover.ground != frozenset(range(1, z.dim + 1)):
        raise InvalidCover("cover ground set must be {1..n}")
    lhs = len(z) ** cover.k
    rhs = 1
    for member in cover.members:
        rhs *= len(project_coords(z, member)) if len(z) else 0
    assert lhs <= rhs, f"uniform cover inequality failed: {lhs} > {rhs}"
    return lhs, rhs


def energy_proj_check(z: LatticeSet, i0, cover: UniformCover, k: int):
    """Both sides of |Z|^(2q-k) <= En^(q-k) * prod |proj_(I0 u I)(Z)|.

    cover must be k-uniform over {1..n} \\ I0 with q members; I0 empty
    reduces to the plain uniform cover inequality.
    """
    i0 = frozenset(int(i) for i in i0)
    complement = frozenset(range(1, z.dim + 1)) - i0
    if cover.ground != complement or cover.k != k:
        raise InvalidCover("cover must be k-uniform over the complement of I0")
    q = len(cover.members)
    if k > q:
        raise InvalidCover(f"k = {k} exceeds member count q = {q}")
    energy = sum(c * c for c in _fibers(z, i0).values())
    lhs = len(z) ** (2 * q - k)
    rhs = energy ** (q - k)
    for member in cover.members:
        rhs *= len(project_coords(z, i0 | member)) if len(z) else 0
    assert lhs <= rhs, f"energy-projection inequality failed: {lhs} > {rhs}"
    return lhs, rhs


def _pow_ge(a: int, coeff: Fraction, base: int, p: int, n: int) -> bool:
    """Exact test of a >= coeff * base^(p/n) for nonnegative integers."""
    lhs = Fraction(a) ** n
    rhs = coeff**n * Fraction(base) ** p
    return lhs >= rhs


@dataclass(frozen=True)
class TrichotomyOutcome:
    """Tagged, re-checkable witness for the slice-energy trichotomy.

    tag is one of 'big_projection' (j, size), 'heavy_fiber' (y, size),
    'trimmed_subset' (subset).  Parameters are stored so the witness can
    be re-verified against the original set without re-running.
    """

    tag: str
    n: int
    m: int
    q: int
    r: int
    k_param: Fraction
    j: int | None = None
    y: tuple | None = None
    size: int | None = None
    subset: LatticeSet | None = None

    def verify(self, z: LatticeSet) -> bool:
        """Exact re-check of the witness inequality against Z."""
        n, m, q, r, kf = self.n, self.m, self.q, self.r, self.k_param
        size_z = len(z)
        if self.tag == "big_projection":
            i0, blocks = index_family(n, m, q, r)
            proj = len(project_coords(z, blocks[self.j - 1]))
            return proj == self.size and _pow_ge(proj, kf, size_z, m, n)
        if self.tag == "heavy_fiber":
            i0, _ = index_family(n, m, q, r)
            fib = _fibers(z, i0)[self.y]
            return fib == self.size and _pow_ge(fib, kf, size_z, n - r, n)
        if self.tag == "trimmed_subset":
            zp = self.subset
            if not zp.elements <= z.elements:
                return False
            i0, _ = index_family(n, m, q, r)
            big_enough = Fraction(len(zp)) >= Fraction(size_z) / (2 * kf ** (q + 1))
            image = len(project_coords(zp, i0))
            small_image = Fraction(image) ** n <= (2 * kf**q) ** n * Fraction(size_z) ** r
            return big_enough and small_image
        return False


def trichotomy(z: LatticeSet, n: int, m: int, q: int, r: int, k_param) -> TrichotomyOutcome:
    """Constructive slice-energy trichotomy with a verified witness.

    Checks the statements in a fixed order: big projection with smallest
    j, then heavy fiber with lexicographically smallest y, else trims
    small fibers of the bottom projection.  K is taken as an exact
    rational.
    """
    if len(z) == 0:
        raise EmptyInput("trichotomy needs a nonempty set")
    if z.dim != n:
        raise ArithmeticMismatch(f"set dimension {z.dim} != n = {n}")
    kf = Fraction(k_param)
    if kf < 1:
        raise ArithmeticMismatch("K must be >= 1")
    i0, blocks = index_family(n, m, q, r)
    size_z = len(z)

    for j, block in enumerate(blocks, start=1):
        proj = len(project_coords(z, block))
        if _pow_ge(proj, kf, size_z, m, n):
            out = TrichotomyOutcome("big_projection", n, m, q, r, kf, j=j, size=proj)
            assert out.verify(z)
            return out

    fibers = _fibers(z, i0)
    heavy = sorted(y for y, c in fibers.items() if _pow_ge(c, kf, size_z, n - r, n))
    if heavy:
        y = heavy[0]
        out = TrichotomyOutcome("heavy_fiber", n, m, q, r, kf, y=y, size=fibers[y])
        assert out.verify(z)
        return out

    # neither statement: trim fibers below M/(2K^(q+1)) with
    # M = K |Z|^((n-r)/n); kept iff (2 K^q fiber)^n >= |Z|^(n-r)
    keep = {
        y
        for y, c in fibers.items()
        if (2 * kf**q * c) ** n >= Fraction(size_z) ** (n - r)
    }
    i0_sorted = tuple(sorted(i0))
    subset = LatticeSet(
        n,
        frozenset(e for e in z.elements if tuple(e[i - 1] for i in i0_sorted) in keep),
    )
    out = TrichotomyOutcome("trimmed_subset", n, m, q, r, kf, subset=subset)
    assert out.verify(z), "trimmed-subset witness failed re-verification"
    return out


def save_lattice(z: LatticeSet, path) -> None:
    """Text format: first line n, then one element per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{z.dim}\n")
        for e in sorted(z.elements):
            fh.write(" ".join(str(x) for x in e) + "\n")


def load_lattice(path) -> LatticeSet:
    with open(path, "r", encoding="utf-8") as fh:
        n = int(fh.readline().strip())
        elems = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != n:
                raise ValueError(f"lattice file: expected {n} integers per line")
            elems.append(tuple(int(p) for p in parts))
    return LatticeSet(n, frozenset(elems))
