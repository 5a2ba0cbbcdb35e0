"""Hilbert geometry of properly convex projective domains."""
from .config import override, settings, tolerances
from .domain import (
    ConvexDomain,
    ConvexSubset,
    Ellipsoid,
    Face,
    Membership,
    Polytope,
    Simplex,
    SimplexCandidate,
    contains,
    detect_properly_embedded_simplex,
    face_of,
    ideal_boundary_sample,
    is_properly_embedded,
    line_boundary_intersection,
    same_face,
    segment_in_boundary,
)
from .groups import (
    GeneratorSet,
    attracting_fixed_point,
    axis_of,
    boost,
    check_convergence_dynamics,
    convex_core_approx,
    coxeter_generators,
    coxeter_relations_residual,
    enumerate_orbit,
    limit_set_approx,
    schottky_pso21,
    translation_distance,
    triangle_group_gram,
)
from .metric import (
    check_asymptotic_faces,
    check_hull_hausdorff_bound,
    check_segment_hausdorff_bound,
    distance_to_subset,
    face_distance,
    geodesic_point,
    hausdorff_distance,
    hilbert_distance,
    simplex_distance_closed_form,
)
from .peripheral import (
    PeripheralFamily,
    check_projection_observation,
    closest_point_projection,
    find_nearby_simplex,
    simplex_coarse_containment,
    strong_isolation_report,
    structure_constants_report,
)
from .projective import AffineChart, EndomorphismClass, HomogeneousPoint, ProjectiveMap, cross_ratio, limit_of_maps
from .quotient import boundary_sample, build_quotient, check_conditions, classify_point, equivalence_decide
from .report import run_command
from .scene import parse_scene
from .svg import emit_svg
