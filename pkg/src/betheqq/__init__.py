"""betheqq: Wronskian qq-systems, Bethe Ansatz equations, and twisted Miura opers.

The package realizes the correspondence between polynomial solutions of the
qq-system attached to a simple Lie type, colored Bethe root configurations,
and the twisted Cartan connections they frame: it verifies, completes,
solves (Newton + continuation from the infinite system), transforms
(Backlund moves along reduced Weyl words), folds (B_n, G_2 to their
simply-laced shadows), and diagonalizes (type A) these objects over exact
rationals or arbitrary-precision complex arithmetic.
"""

from .backlund import (
    AdmissibleReport,
    ChainStep,
    ChainTrace,
    CombinatorialDatum,
    apply_simple,
    chain,
    check_admissible,
    degree_map,
    mu,
    mu_gauge_form,
)
from .bethe import (
    BetheReport,
    BetheRoots,
    InfinitePartition,
    SolveOptions,
    bethe_jacobian,
    bethe_residual,
    bethe_residual_log_form,
    infinite_solution,
    roots_to_solution,
    seed_and_continue,
    solve_newton,
    verify_bethe,
)
from .errors import (
    BadPartition,
    BetheqqError,
    ChainBroken,
    FactorizationFailed,
    InconsistentSystem,
    InvalidCartanType,
    NoConvergence,
    ParseError,
    PathCollision,
    PoleCollision,
    SingularJacobian,
    UnsupportedType,
    ZeroDenominator,
)
from .opermat import (
    Diagonalization,
    Gl2Oper,
    MiuraConnection,
    RatMatrix,
    bruhat_factor_w0,
    build_connection,
    connection_matrix,
    diagonalize_type_a,
    gauge_transform,
    gl2_oper,
    reduce_twist_type_a,
    regularity_residues,
    twist_matrix,
    verify_mp_twist,
)
from .polyalg import (
    Poly,
    RationalFn,
    chop,
    coprime_check,
    distinct_roots_check,
    gcd,
    log_deriv,
    poly_from_roots,
    rational_roots,
    roots,
    solve_linear_ode,
    wronskian,
)
from .qqcore import (
    NondegReport,
    QQInstance,
    QQSolution,
    build_lambdas,
    check_nondegenerate,
    complete_minus,
    expected_minus_degree,
    fold,
    qq_residual,
    qq_residual_scale,
    qq_rhs,
    residuals_vanish,
)
from .rootsys import (
    CartanMatrix,
    CartanType,
    Twist,
    WeylWord,
    cartan_matrix,
    is_reduced,
    pairing,
    pairings,
    positive_roots,
    reflect_twist,
    twist_from_pairings,
    w0_reduced_word,
)
from .scalars import ExactField, NumericField, make_field

__version__ = "0.1.0"
