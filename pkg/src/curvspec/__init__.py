"""Riemann curvature tensors, their pair-index and M-eigenproblems, and Jacobi fields.

Metrics are given as small symbolic expressions per component; first and
second derivatives come from forward-mode hyper-dual arithmetic, so every
curvature quantity is exact up to floating-point roundoff.
"""

__version__ = "0.1.0"

from .errors import (
    BadParams,
    CurvspecError,
    DegenerateMetric,
    DegeneratePencil,
    DegeneratePlane,
    DomainError,
    ExpressionSyntaxError,
    InputError,
    NumericalError,
    SingularPoint,
    UnknownCase,
    UnknownIdentifier,
    WrongDimension,
)
from .expr import Expression, Jet2, NonFiniteWarning, eval_grad, eval_jet2, evaluate, parse
from .geometry import (
    ChristoffelJet,
    CurvatureInvariants,
    MetricJet,
    MetricSpec,
    RiemannTensor,
    SymmetryReport,
    check_symmetries,
    christoffel,
    dump_metric,
    invariants,
    load_metric,
    metric_at,
    metric_from_dict,
    metric_to_dict,
    riemann,
    sectional,
)
from .spectra import (
    ClassicalEigenpair,
    PairBasis,
    Pencil,
    VacuumBlockReport,
    assemble_pencil,
    classical_eigen,
    decompose_bivector,
    orthonormal_frame,
    pair_basis,
    vacuum_block_check,
)
from .meig import (
    ElasticityTensor,
    KKTPoint,
    MEigenpair,
    SolveOptions,
    dedupe,
    distinct_thetas,
    elasticity_classical_eigen,
    elasticity_meig,
    kkt_points,
    meig_residual,
    solve_meig,
    theta_of,
)
from .cases import CatalogEntry, builtin, catalog_names, default_catalog, ricci_reconstruction, ricci_triples, run_checks
from .jacobi import (
    GeodesicTrajectory,
    JacobiTrajectory,
    decoupled_solution,
    geodesic_step,
    integrate_geodesic,
    integrate_jacobi,
)
