"""Newton-polyhedron invariants and p-adic exponential sums.

Library layout:
  poly        sparse integer polynomials (parser, gradients, modular evaluation)
  newton      exact polyhedron, face lattice, sigma / kappa invariants
  sums        brute-force sum kernels and mod-p nondegeneracy scans
  faceformula certified cone sums and the face-decomposition verification
  bounds      inequality scans, decay-ratio tables, exponent fits
  cli         command-line front end
"""

from .errors import (
    BudgetExceeded,
    ConstantTermNonzero,
    DegenerateSampling,
    DimensionTooLarge,
    FacetCountTooLarge,
    HypothesisUnmet,
    InsufficientPrimes,
    PadicSumsError,
    PolyParseError,
    WorkBudgetExceeded,
    ZeroPolynomial,
)
from .poly import (
    ExponentVector,
    ModEvaluator,
    Polynomial,
    eval_mod,
    face_restriction,
    gradient,
    homogeneity,
    parse_polynomial,
    render,
)
from .newton import (
    Face,
    Facet,
    NewtonPolyhedron,
    SigmaData,
    build_polyhedron,
    enumerate_faces,
    enumerate_lattice_points,
    eval_k,
    f0_face,
    sigma_data,
)
from .sums import (
    KERNEL_EPS,
    NondegReport,
    SumValue,
    brute_force_S,
    check_nondegenerate_mod_p,
    torus_E,
)
from .faceformula import (
    ConeSumResult,
    FormulaReport,
    cone_sums,
    rhs_assembly,
    truncation_level,
    verify_formula,
)
from .bounds import (
    EDecayFit,
    NuCheckRecord,
    RatioTable,
    bound_ratio_table,
    check_nu_inequality,
    check_sigma_dim_bound,
    convexity_sampler,
    e_decay_fit,
)

__version__ = "0.1.0"
