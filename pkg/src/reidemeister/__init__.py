"""Twisted conjugacy and Reidemeister numbers for polyfree groups of length at most 2."""

from .lattice import (
    INFINITE,
    AbelianGroupStructure,
    IntMatrix,
    LatticeQuotient,
    SmithDecomposition,
    SupportedVector,
    abelian_reidemeister,
    cokernel_structure,
    fixed_sublattice_trivial,
    smith_normal_form,
    supported_apply,
)
from .polyfree import (
    NOT_APPLICABLE,
    GroupError,
    PfElement,
    PfGroup,
    PfMorphism,
    PolyfreeSeries,
    ResourceCapExceeded,
    SubgroupDescriptor,
    VerificationError,
    abelianization_free_by_cyclic,
    ball_enumerate,
    build_group,
    center_conjugation_case,
    centralizer,
    centralizer_direct_product,
    centralizer_z_semidirect,
    descriptor_contains,
    direct_product,
    euler_data,
    klein_bottle_group,
    preserves_series,
    verify_endomorphism,
)
from .torus import (
    BmvCase,
    FamilyAutomorphism,
    MappingTorus,
    bmv_classify,
    eta_ab_image,
    family_automorphism,
    induced_quotient_matrix,
    kernel_membership,
    make_mapping_torus,
    rs_rewrite,
    verify_relators,
)
from .twisted import (
    Certificate,
    CertNode,
    Conclusion,
    OrbitReport,
    abelian_class_invariant,
    certify_r_infinite,
    finite_quotient_count,
    twisted_orbit_report,
)
from .words import (
    CentralizerDescriptor,
    FreeMorphism,
    Letter,
    Word,
    WordParseError,
    apply_morphism,
    centralizer_free,
    compose,
    cyclic_reduce,
    exponent_sum,
    find_inner_witness,
    format_word,
    invert,
    is_automorphism_rank2,
    multiply,
    parse_word,
    primitive_root,
    rank2_inverse,
    reduce,
)

__version__ = "0.1.0"
