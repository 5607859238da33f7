"""Desk-scale machinery for discretized projection experiments.

Modules by role: grassmann (subspace geometry), dset (dyadic cell sets),
additive (exact additive combinatorics), lattice_cover (the discrete
coordinate-projection model), randgrass (random subspaces and empirical
Grassmannian measures), lab (generators, sweeps, certificates), verify
(invariant suites), cli (command-line front end).
"""

from .additive import (
    FiberMap,
    FiniteProbSpace,
    LatticeSet,
    additive_energy,
    check_intersection_lemma,
    check_union_cap_lemma,
    difference,
    energy_delta,
    energy_discrete,
    pluennecke_witness,
    ruzsa_triangle_defect,
    sumset,
    trim_small_fibers,
)
from .dset import (
    DiscretizedSet,
    WeightedCellSet,
    cell_count,
    covering_number_balls,
    frostman_profile,
    frostman_stat,
    from_points,
    linear_image,
    load_set,
    mass_levels,
    neighborhood,
    project_set,
    restrict_ball,
    save_set,
    slice_set,
)
from .grassmann import (
    LinearMap,
    Subspace,
    dang_gram,
    dang_proj,
    gl_act,
    intersect,
    orthonormalize,
    perp,
    principal_angles,
    project,
    same_subspace,
    schubert_member,
    sum_spaces,
)
from .lab import (
    SweepReport,
    gen_ball,
    gen_cantor_product,
    gen_slice_union,
    gl_normalize,
    heavy_fiber_certificate,
    projection_sweep,
)
from .lattice_cover import (
    TrichotomyOutcome,
    UniformCover,
    energy_proj_check,
    index_family,
    load_lattice,
    project_coords,
    save_lattice,
    trichotomy,
    uct_check,
)
from .randgrass import (
    GrassmannSample,
    HaarMeasure,
    Rng,
    haar_sample,
    load_sample,
    noncon_stat,
    random_intersection_experiment,
    random_sum_experiment,
    save_sample,
)

__version__ = "0.1.0"
