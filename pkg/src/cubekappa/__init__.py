"""Hyperplane combinatorics of finite CAT(0) cube complexes and sublinear
contraction of their geodesics."""
from .contraction import (
    ContractionProfile,
    DivergenceCurve,
    ExcursionResult,
    GeodesicPath,
    contraction_profile,
    excursion_constant,
    excursion_detect,
    hyperplanes_projecting_inside,
    lower_divergence,
    project_to_path,
    slimness_profile,
)
from .core import (
    CubeComplex,
    Hyperplane,
    build_complex,
    convex_hull,
    distance,
    gate,
    gate_pair_check,
    interval,
    is_convex,
    median,
    separating_set,
)
from .corpus import (
    FamilySpec,
    gen_ball_times_segment,
    gen_example42,
    gen_grid,
    gen_tree_ball,
    geodesic,
    load_complex,
    save_complex,
)
from .errors import *  # noqa: F401,F403
from .hyperspaces import (
    ContactGraph,
    WellSepMetric,
    contact_graph,
    contact_progress,
    contact_projection,
    hyperbolicity_delta,
    wellsep_distance,
    wellsep_progress,
)
from .kappa import KappaFunction, check_kappa, make_kappa, parse_kappa
from .separation import (
    SeparationReport,
    crossing_chain_bound,
    crosses,
    is_facing_triple,
    k_separation,
    max_no_facing_triple_family,
    separates_hyperplanes,
    strongly_separated,
    well_separation,
)

__version__ = "0.1.0"
