"""Exact basis construction and machine verification for the derivation
module of the cone over the type-A Shi arrangement."""

from .arrangement import (
    ShiCone,
    build_shi_cone,
    defining_polynomial,
    elementary_symmetric,
    index_subsets,
    lemma_det_closed_form,
    lemma_matrix_N,
)
from .bernoulli import (
    UnivariatePoly,
    bernoulli_number,
    bernoulli_poly,
    bpq,
    bpq_homogenized,
    set_bernoulli_cache_cap,
    univariate_to_poly,
)
from .derivations import (
    Derivation,
    apply,
    basis,
    basis_names,
    decone,
    derivation_from_json_obj,
    derivation_to_json_obj,
    eta1,
    eta2,
    phi,
)
from .polyring import (
    ContextError,
    DegenerateDivisorError,
    ExactDivisionError,
    PolyRing,
    Polynomial,
    Rat,
    ShapeError,
    determinant,
    divisible_by_linear,
    linear_remainder,
    poly_from_json,
    poly_from_json_obj,
    poly_to_json,
    poly_to_json_obj,
    rational_from_str,
    rational_to_str,
)
from .verify import (
    BasisNotVerifiedError,
    CheckResult,
    DegreeGuardExceeded,
    MembershipResult,
    SaitoCheck,
    VerificationReport,
    chamber_count,
    charpoly_finite_field,
    check_factorization_P,
    check_lemma_N,
    check_membership,
    check_saito,
    count_complement_points,
    expected_charpoly,
    expected_exponents,
    poincare_polynomial,
    run_verification,
    saito_matrix,
)

__version__ = "0.1.0"
