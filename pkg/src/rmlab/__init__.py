"""Unitary solutions of the Yang-Baxter equation and their invariants.

Construction and verification of R-matrices, the braid group
representations and characters they generate, relative commutants and
fixed-point algebras of the associated endomorphisms, involutive
normal forms, index bounds, the complete d = 2 classification, and a
Riemannian search for new solutions.
"""

from .errors import (
    DegeneracyError,
    DomainError,
    InternalConsistencyError,
    LevelError,
    NormalFormError,
    NormalityError,
    ParseError,
    ResourceError,
    RmlabError,
    ShapeError,
    VerificationError,
)
from .tensor import (
    AlgebraElement,
    EigenCluster,
    as_complex_matrix,
    eig_normal,
    embed,
    expectation_to_level,
    frobenius_norm,
    hs_inner,
    identity_element,
    is_unitary,
    kron,
    normalized_trace,
    operator_norm_estimate,
    partial_trace_left,
    partial_trace_right,
    shift,
)
from .rmatrix import (
    NormalFormSpec,
    RMatrix,
    SimpleRSpec,
    adjoint,
    box_sum,
    cabling_power,
    flip_conjugate,
    flip_matrix,
    is_involutive,
    is_trivial,
    make_flip,
    make_normal_form,
    make_simple,
    make_trivial,
    quasifree_conjugate,
    scalar_multiple,
    tensor_product,
    verify,
)
from .braid import (
    BraidWord,
    CharacterComparison,
    CycleType,
    character,
    characters_equal,
    fundamental_braid,
    intertwiner_Y,
    represent,
    thoma_character,
    underlying_permutation,
)
from .commutant import (
    SubalgebraBasis,
    apply_endo,
    braid_image_commutant,
    fixed_subalgebra,
    nullspace,
    profile_string,
    relative_commutant_L,
    relative_commutant_M,
    relative_commutant_N,
    wedderburn_decompose,
)
from .analysis import (
    CONCENTRATION_THRESHOLD,
    AnalysisReport,
    ConcentrationData,
    Dim2Classification,
    ErgodicityResult,
    IndexBounds,
    PartialTraceData,
    ReductionLeaf,
    ReductionResult,
    ReductionSplit,
    analyze,
    classify_dim2,
    ergodicity_necessary_check,
    index_bounds,
    is_ergodic,
    is_irreducible,
    normal_form_of_involutive,
    partial_trace_invariant,
    phi_image,
    reduce_involutive,
    triviality_by_concentration,
)
from .search import (
    Fingerprint,
    SearchResult,
    SearchRun,
    directional_derivative_check,
    find_solution,
    fingerprint,
    fingerprints_close,
    haar_unitary,
    riemannian_gradient,
    search_unitary_solution,
    ybe_defect,
    ybe_euclidean_gradient,
    ybe_objective,
)
from .corpus import (
    all_builtins,
    builtin,
    builtin_names,
    family_r2,
    family_r3,
    family_r4,
    random_conjugate,
    random_diagonal,
    random_family2,
    random_family3,
    random_family4,
    random_normal_form_spec,
    random_phases,
    random_projection_partition,
    random_simple_spec,
    random_unimodular,
    uf_solution,
)
from .serialize import (
    dump_solution,
    load_solution,
    solution_from_dict,
    solution_to_dict,
)

__version__ = "0.1.0"
