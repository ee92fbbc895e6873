"""Images of multilinear graded *-polynomials on upper triangular matrices."""

from .catalog import SubspaceName, match_catalog, resolve, structure_family
from .classifier import (
    OracleDisagreement,
    UnsupportedStructure,
    classify,
    classify_symbolic,
    extract_coefficients,
    generic_eval,
    verify_corner_lemma,
    verify_identity,
    verify_row_lemma,
    verify_zproduct_lemma,
)
from .coeffs import GF, QQ, Field, MPoly, Scalar, coeff_of, eval_poly, field_ops, monomial
from .counterexamples import ut3_constraint_check, ut3_trivial_case, utn_zn_case
from .image import (
    BudgetExceeded,
    ImageReport,
    ImageSet,
    analyze,
    closure_verdict,
    enumerate_image,
    membership,
    sample_image,
    span_of,
)
from .starpoly import StarPoly, evaluate, homogeneity, parse_problem, parse_star_poly
from .triangular import (
    GradeSpec,
    Involution,
    StructureSpec,
    TriMatrix,
    apply_involution,
    check_structure,
    component_bases,
    unit,
)

__version__ = "0.1.0"
