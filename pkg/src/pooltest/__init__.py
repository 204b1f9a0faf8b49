"""Sparse regular pooled testing: ensembles, exact averages, bounds, trials.

The package studies nonadaptive pooled testing of n objects, each
independently defective with probability p, using m = n*l/r pooled tests
wired through a random (l, r)-regular bipartite graph.  It provides the
graph ensemble and forward test maps, exact generating-function averages
over the ensemble, closed-form converse and achievability margins with
their critical-density roots, typical-set decoders, and seeded Monte
Carlo harnesses that check the exact formulas and decode at small n.
"""

from .bounds import (
    CURVE_IDS,
    ThresholdPair,
    achievable_margin,
    binary_entropy,
    collision_exponent,
    converse_margin,
    emit_curve,
    entropy,
    fixed_point_z,
    linspace,
    noisy_achievable_margin,
    noisy_collision_factor,
    noisy_converse_margin,
    threshold_lower,
    threshold_pair,
    threshold_upper,
)
from .ensemble import (
    PoolingGraph,
    SystemParams,
    TestFunction,
    TypeVector,
    compositions,
    count_function,
    enumerate_ensemble,
    enumeration_fraction_general,
    enumeration_fraction_noiseless,
    enumeration_fraction_noisy,
    forward_general,
    forward_or,
    graph_from_json,
    graph_to_json,
    or_function,
    parity_function,
    sample_graph,
    threshold_function,
    type_vector_representative,
    weight_vector,
)
from .errors import (
    ConfigurationError,
    EmptyTypicalSetError,
    GuardError,
    InputError,
    NoThresholdError,
    ReducedAlphabetError,
)
from .estimators import (
    DEFAULT_EPSILON,
    ENUMERATION_LIMIT,
    Estimate,
    TypicalSetSpec,
    brute_force_decision_set_noiseless,
    decision_set_noiseless,
    decision_set_noisy,
    estimate_noiseless,
    estimate_noisy,
    is_typical,
    typical_weight_set,
    typical_weights,
    weight_rate,
)
from .genfunc import (
    DirectExponent,
    GeneralMargin,
    Infimum,
    Margin,
    MultiPolynomial,
    Polynomial,
    binary_direct_margin,
    ensemble_event_probability,
    exponent_infimum,
    general_converse_bound,
    general_direct_margin,
    general_ensemble_event_probability,
    golden_section_min,
    multinomial,
    noiseless_direct_exponent,
    noisy_direct_exponent,
    noisy_ensemble_event_probability,
    or_pool_poly,
    type_enumerator,
    weight_enumerator,
)
from .montecarlo import (
    EventRateCheck,
    TrialReport,
    derive_seed,
    resolve_workers,
    run_noiseless_trials,
    run_noisy_trials,
    validate_event_probability,
    validate_noisy_event_probability,
)

__version__ = "0.1.0"

__all__ = [
    "CURVE_IDS",
    "DEFAULT_EPSILON",
    "ENUMERATION_LIMIT",
    "ConfigurationError",
    "DirectExponent",
    "EmptyTypicalSetError",
    "Estimate",
    "EventRateCheck",
    "GeneralMargin",
    "GuardError",
    "Infimum",
    "InputError",
    "Margin",
    "MultiPolynomial",
    "NoThresholdError",
    "Polynomial",
    "PoolingGraph",
    "ReducedAlphabetError",
    "SystemParams",
    "TestFunction",
    "ThresholdPair",
    "TrialReport",
    "TypeVector",
    "TypicalSetSpec",
    "achievable_margin",
    "binary_direct_margin",
    "binary_entropy",
    "brute_force_decision_set_noiseless",
    "collision_exponent",
    "compositions",
    "converse_margin",
    "count_function",
    "decision_set_noiseless",
    "decision_set_noisy",
    "derive_seed",
    "emit_curve",
    "ensemble_event_probability",
    "entropy",
    "enumerate_ensemble",
    "enumeration_fraction_general",
    "enumeration_fraction_noiseless",
    "enumeration_fraction_noisy",
    "estimate_noiseless",
    "estimate_noisy",
    "exponent_infimum",
    "fixed_point_z",
    "forward_general",
    "forward_or",
    "general_converse_bound",
    "general_direct_margin",
    "general_ensemble_event_probability",
    "golden_section_min",
    "graph_from_json",
    "graph_to_json",
    "is_typical",
    "linspace",
    "multinomial",
    "noiseless_direct_exponent",
    "noisy_achievable_margin",
    "noisy_collision_factor",
    "noisy_converse_margin",
    "noisy_direct_exponent",
    "noisy_ensemble_event_probability",
    "or_function",
    "or_pool_poly",
    "parity_function",
    "resolve_workers",
    "run_noiseless_trials",
    "run_noisy_trials",
    "sample_graph",
    "threshold_function",
    "threshold_lower",
    "threshold_pair",
    "threshold_upper",
    "type_enumerator",
    "type_vector_representative",
    "typical_weight_set",
    "typical_weights",
    "validate_event_probability",
    "validate_noisy_event_probability",
    "weight_enumerator",
    "weight_rate",
    "weight_vector",
]
