"""Exact K_0-level computations: cyclotomic arithmetic, F_p[C_p] modules,
tilting fusion rings, order searches, ring presentations and prime-indexed
filter quotients."""

from .cyclotomic import CyclotomicElement, RealCyclotomicElement, reduce_mod_p, splitting_data
from .errors import VerificationError
from .filterprod import (
    ChoiceOracle,
    PrimeFamilyElement,
    char_zero_certificate,
    filter_equal,
    root_density,
    root_family,
)
from .finite_field import FieldElement, FiniteField, conway_style_field
from .modrep import (
    JordanModule,
    categorical_trace,
    is_stably_nilpotent,
    radical_filtration,
    sample_trace_zero,
    stable_k0,
    tensor,
    verify_mod_p_reduction,
)
from .numtheory import (
    FieldTarget,
    Inconclusive,
    containment_check,
    find_ell,
    gcd_lemma_check,
    valuation_escalation,
)
from .presentation import (
    HellerWitness,
    RingPresentation,
    dual_fixed_subring,
    equal,
    present,
    verify_versal_factorization,
)
from .tilting import (
    FusionRing,
    build_semisimple_fusion,
    dimension_field,
    even_subring,
    k0_isomorphism_certificate,
    mod_p_cross_check,
    quantum_dimension,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
