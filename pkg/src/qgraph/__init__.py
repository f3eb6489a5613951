"""Spectra of Laplacians on finite metric graphs with general vertex conditions."""

from .graph import (
    EdgeIndex,
    GraphError,
    MetricGraph,
    ValidationReport,
    compact_star,
    cube_graph,
    degree,
    interval,
    loop_graph,
    metric_graph,
    star_graph,
    validate,
)
from .bcspace import (
    AntiLinearSymmetry,
    BoundaryConditionError,
    BoundaryConditions,
    Classification,
    SectorialPair,
    adjoint,
    adjoint_subspace,
    cayley,
    check_antilinear_symmetry,
    classify,
    dim_M,
    dirichlet,
    equivalent,
    from_cayley,
    is_regular,
    is_self_adjoint,
    m_sectorial,
    neumann,
    projector_distance,
    projector_onto_M,
    regularize,
)
from .secular import SecularError, SecularSystem
from .spectrum import (
    Eigenfunction,
    IrregularBCError,
    Region,
    SolverOptions,
    SpectralPoint,
    SpectrumReport,
    WalkerError,
    WeylReport,
    boundary_winding,
    compute_spectrum,
    eigenfunction,
    essential_spectrum,
    find_eigenvalues,
    real_axis_scan,
    residual_spectrum,
    secular_zeros,
    weyl_count_check,
    zero_mode_point,
)
from .resolvent import (
    IdentityReport,
    NearPoleError,
    ResolventError,
    ResolventKernel,
    hs_distance,
    kernel_grid_csv,
    middle_factor,
    singularity_diagnostic,
    verify_resolvent_identity,
)
from .similarity import (
    BlockTransform,
    DecoupledSpectrum,
    IntervalProblem,
    SimilarityCertificate,
    SimilarityError,
    decouple_symmetric_graph,
    find_similarity_to_selfadjoint,
    metric_operator,
    verify_similarity,
)
from . import presets

__version__ = "0.1.0"
