"""Flat tori in the 3-sphere from mu-admissible pairs of spherical curves."""

from .bitangent import (
    BitangentCertificate,
    BitangentCircleResult,
    MuCircle,
    circumscribed_bitangent_circle,
    classify_kind,
    inscribed_bitangent_circle,
    past_part_predicate,
    rolling_search,
    tangent_mu_circle,
)
from .curves import (
    AdmissibleCurve,
    SphericalCurve,
    TrigPolyPlaneSpec,
    admissible_from_spec,
    build_spherical,
    catalog,
    circle_curve,
    curve_from_spec,
    parallel_curve,
    reparametrize_admissible,
)
from .errors import (
    AdmissibilityError,
    AnalysisError,
    FlattoriError,
    LiftDivergedError,
    NonGenericCurveError,
    ParallelSingularError,
    SpecError,
)
from .lifting import LiftedCurve, invariant_I, lift_arc_endpoint, lift_curve
from .su2 import (
    FramedPoint,
    UnitQuaternion,
    adjoint,
    exp_su2,
    frame_to_quaternion,
    hopf_project,
    project_p2,
    qmul,
)
from .topology import Crossing, Shell, extract_shells, find_crossings, interior_domain_test
from .torus import (
    AdmissiblePair,
    FlatTorusImmersion,
    analytic_forms,
    build_torus,
    check_mu_admissible,
    evaluate_f,
    extrinsic_diameter,
    numeric_forms,
    parallel_deform_pair,
    reverse_deform_pair,
    swap_negate_pair,
)

__version__ = "0.1.0"
