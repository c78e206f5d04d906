"""Moment maps of matrix-valued spectral estimation: Jacobians, critical points, bifurcations."""

from .basis import (
    HermitianBasis,
    LambdaParam,
    block_toeplitz,
    build_basis,
    feasibility_check,
    lambda_from_factor,
    project,
    toeplitz_blocks,
)
from .bifurcation import (
    BifurcationReport,
    LSDecomposition,
    analyze_critical_point,
    augmented_jacobian,
    bifurcation_hessian,
    classify,
    ls_decompose,
    second_derivative_array,
)
from .continuation import ContinuationOptions, ContinuationTrace, continuation_solve, ode_solve
from .config import ScenarioConfig, load_config, bundled_config
from .critical import (
    CriticalPointRecord,
    DetScan,
    SegmentPath,
    bisect_critical,
    bisect_sign_change,
    det_scan,
    find_critical_points,
    numerical_rank,
)
from .errors import (
    ConfigError,
    DegenerateFactorError,
    InfeasibleLambdaError,
    MomentMapError,
    NoSignChangeError,
    NotSimpleCriticalPointError,
    SingularFactorError,
    UnstableFilterError,
)
from .filters import (
    FrequencyGrid,
    MatrixSamples,
    RationalFilter,
    eval_filter,
    gamma_adjoint,
    gamma_apply,
    integrate,
    make_grid,
    sample_filter,
    shift_filter,
)
from .maps import (
    JacobianMatrixRep,
    MomentProblem,
    PriorFactor,
    d2h_apply,
    dh_adjoint_apply,
    dh_apply,
    h_map,
    hessian_tensor,
    jacobian_matrix,
    lu_det,
    tau_jacobian_fd,
    tau_map,
)
from .polyroots import RootReport, determinantal_roots

__version__ = "0.1.0"
