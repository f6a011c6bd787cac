"""Exact computational kernel for blueprints.

A blueprint is a commutative monoid together with a pre-addition: an
equivalence relation on formal sums of monoid elements that is closed under
adding and multiplying relations.  The package builds these objects from
presentations or from finite semirings, computes their closures, congruences,
ideals and prime spectra, and checks the globalization map into the blueprint
of global sections of the structure sheaf.
"""

from .kernel import (
    BlueError,
    Budget,
    DEFAULT_BUDGET,
    Decision,
    FiniteSemiring,
    FormalSum,
    InvalidPresentation,
    Monomial,
    MonoidPresentation,
    ZERO_MONOMIAL,
    all_hold,
    check_semiring_axioms,
    monoid_equal,
    normalize,
    semiring_boolean,
    semiring_min_plus,
    semiring_nat_truncated,
    semiring_zmod,
    subset_generates,
)
from .blueprint import (
    Blueprint,
    BlueprintMorphism,
    ClassifyRecord,
    EmbeddedBlueprint,
    EqualizerBlueprint,
    PresentedBlueprint,
    ProductBlueprint,
    RingPresentation,
    SemiringPresentation,
    base_extend_N,
    base_extend_Z,
    cancellative_closure,
    classify,
    compose,
    cyclotomic,
    enumerate_morphisms,
    equalizer,
    extension_lattices_agree,
    find_isomorphism,
    free_extension,
    from_monoid,
    from_monoid_with_zero,
    from_semiring,
    holds,
    identity_morphism,
    initial_blueprint,
    inverse_closure,
    is_monoid_with_zero,
    lattice_profile,
    localize,
    multiplicative_closure,
    mutually_inverse,
    product,
    proper_closure,
    smith_invariants,
    tensor,
    terminal_blueprint,
    validate_morphism,
    z_rank,
    zero_closure,
)
from .congruence import (
    Congruence,
    Ideal,
    InvalidMorphism,
    absorbing_ideal,
    check_congruence,
    congruence_from_partition,
    congruence_generated,
    congruence_of_ideal,
    enumerate_prime_ideals,
    ideal_from_members,
    ideal_generated,
    ideals_equal,
    inverse_image_congruence,
    inverse_image_ideal,
    is_ideal,
    is_maximal_congruence,
    is_maximal_ideal,
    is_prime_congruence,
    is_prime_ideal,
    iz_ideal,
    iz_profiles_agree,
    kernel_of,
    quotient_by,
    radical,
)
from .scheme import (
    FibreProductRecord,
    GammaRecord,
    IncompleteEnumeration,
    InducedMorphism,
    LocalizationReport,
    NotAnIdeal,
    SectionWitness,
    SpecIsoReport,
    SpecPoint,
    SpecSpace,
    StalkNotFinite,
    UnionSpace,
    affine_fibre_product,
    closure_of,
    disjoint_union,
    gamma_record,
    globalization,
    induced_morphism,
    is_blue_field,
    is_global,
    localization_iso_check,
    reduce_cover,
    residue_field,
    sections,
    space_to_dot,
    space_to_json,
    spec,
    stalk,
    union_sections,
    v_closed,
    verify_spec_iso,
)

__all__ = [
    "BlueError",
    "Blueprint",
    "BlueprintMorphism",
    "Budget",
    "ClassifyRecord",
    "Congruence",
    "DEFAULT_BUDGET",
    "Decision",
    "EmbeddedBlueprint",
    "EqualizerBlueprint",
    "FibreProductRecord",
    "FiniteSemiring",
    "FormalSum",
    "GammaRecord",
    "Ideal",
    "IncompleteEnumeration",
    "InducedMorphism",
    "InvalidMorphism",
    "InvalidPresentation",
    "LocalizationReport",
    "MonoidPresentation",
    "Monomial",
    "NotAnIdeal",
    "PresentedBlueprint",
    "ProductBlueprint",
    "RingPresentation",
    "SectionWitness",
    "SemiringPresentation",
    "SpecIsoReport",
    "SpecPoint",
    "SpecSpace",
    "StalkNotFinite",
    "UnionSpace",
    "ZERO_MONOMIAL",
    "absorbing_ideal",
    "affine_fibre_product",
    "all_hold",
    "base_extend_N",
    "base_extend_Z",
    "cancellative_closure",
    "check_congruence",
    "check_semiring_axioms",
    "classify",
    "closure_of",
    "compose",
    "congruence_from_partition",
    "congruence_generated",
    "congruence_of_ideal",
    "cyclotomic",
    "disjoint_union",
    "enumerate_morphisms",
    "enumerate_prime_ideals",
    "equalizer",
    "extension_lattices_agree",
    "find_isomorphism",
    "free_extension",
    "from_monoid",
    "from_monoid_with_zero",
    "from_semiring",
    "gamma_record",
    "globalization",
    "holds",
    "ideal_from_members",
    "ideal_generated",
    "ideals_equal",
    "identity_morphism",
    "induced_morphism",
    "initial_blueprint",
    "inverse_closure",
    "inverse_image_congruence",
    "inverse_image_ideal",
    "is_blue_field",
    "is_global",
    "is_ideal",
    "is_maximal_congruence",
    "is_maximal_ideal",
    "is_monoid_with_zero",
    "is_prime_congruence",
    "is_prime_ideal",
    "iz_ideal",
    "iz_profiles_agree",
    "kernel_of",
    "lattice_profile",
    "localization_iso_check",
    "localize",
    "monoid_equal",
    "multiplicative_closure",
    "mutually_inverse",
    "normalize",
    "product",
    "proper_closure",
    "quotient_by",
    "radical",
    "reduce_cover",
    "residue_field",
    "sections",
    "semiring_boolean",
    "semiring_min_plus",
    "semiring_nat_truncated",
    "semiring_zmod",
    "smith_invariants",
    "space_to_dot",
    "space_to_json",
    "spec",
    "stalk",
    "subset_generates",
    "tensor",
    "terminal_blueprint",
    "union_sections",
    "v_closed",
    "validate_morphism",
    "z_rank",
    "zero_closure",
]

__version__ = "0.1.0"
