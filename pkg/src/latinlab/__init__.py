"""latinlab: a desk-scale laboratory for random Latin rectangles.

Exact census and enumeration for small sizes, a switch-walk Markov
chain sampler for larger ones, subsquare statistics, and the auxiliary
digraph with its expansion diagnostics.  Symbols, rows, and columns are
1-based everywhere; 0 marks an empty cell in partial rectangles.
"""

__version__ = "0.1.0"

from .core import (
    LatinRectangle,
    MatchingTuple,
    PartialLatinRectangle,
    SparsityProfile,
    contains,
    from_matchings,
    is_c_sparse,
    restrict_rows,
    sparsity_profile,
    to_matchings,
    validate_partial,
    validate_rectangle,
)
from .plr import format_plr, parse_plr, parse_plr_blocks
# The census op itself stays namespaced (latinlab.census.census, like
# pprint.pprint) so the submodule attribute is not shadowed.
from .census import (
    CensusResult,
    SwitchClassSizes,
    check_size_guard,
    complete_partial,
    count_extensions,
    count_rectangles,
    enumerate_rectangles,
    exact_conditional_probability,
    exact_containment_probability,
    switch_classes,
    switching_ratio,
)
from .sampler import (
    ExactSampler,
    SamplerConfig,
    SwitchChainSampler,
    UniformityReport,
    chain_start,
    default_burn_in,
    random_switch_step,
    sample_exact,
    sample_mcmc,
    sample_mcmc_batch,
    uniformity_test,
)
from .subsquares import (
    SubsquareCensus,
    count_subsquares,
    count_subsquares_limited,
    expectation_window,
    log_subsquare_bound,
    max_proper_subsquare_order,
    subsquare_bound,
    subsquare_bound_is_decreasing,
    subsquare_census,
)
from .expander import (
    Digraph,
    ExpanderParams,
    ExpanderVerdict,
    WalkReport,
    almost_regular_check,
    build_auxiliary_digraph,
    complete_digraph,
    count_cycles_through,
    count_paths,
    directed_cycle,
    is_robust_outexpander,
    robust_outneighborhood,
    walk_distribution,
)
from .lab import (
    EstimateReport,
    ExpectationReport,
    RestrictionIdentityReport,
    SweepTable,
    estimate_containment,
    smallest_covering_epsilon,
    subsquare_expectation_experiment,
    switching_ratio_sweep,
    verify_restriction_identity,
    wilson_interval,
)
from .errors import LatinLabError, SizeGuardExceeded, ValidationError

__all__ = [
    "__version__",
    "LatinRectangle",
    "PartialLatinRectangle",
    "MatchingTuple",
    "SparsityProfile",
    "validate_rectangle",
    "validate_partial",
    "sparsity_profile",
    "is_c_sparse",
    "to_matchings",
    "from_matchings",
    "contains",
    "restrict_rows",
    "parse_plr",
    "parse_plr_blocks",
    "format_plr",
    "CensusResult",
    "SwitchClassSizes",
    "check_size_guard",
    "complete_partial",
    "count_extensions",
    "count_rectangles",
    "enumerate_rectangles",
    "exact_conditional_probability",
    "exact_containment_probability",
    "switch_classes",
    "switching_ratio",
    "SamplerConfig",
    "ExactSampler",
    "SwitchChainSampler",
    "UniformityReport",
    "chain_start",
    "default_burn_in",
    "random_switch_step",
    "sample_exact",
    "sample_mcmc",
    "sample_mcmc_batch",
    "uniformity_test",
    "SubsquareCensus",
    "count_subsquares",
    "count_subsquares_limited",
    "subsquare_census",
    "expectation_window",
    "log_subsquare_bound",
    "subsquare_bound",
    "subsquare_bound_is_decreasing",
    "max_proper_subsquare_order",
    "Digraph",
    "ExpanderParams",
    "ExpanderVerdict",
    "WalkReport",
    "build_auxiliary_digraph",
    "complete_digraph",
    "directed_cycle",
    "robust_outneighborhood",
    "is_robust_outexpander",
    "almost_regular_check",
    "count_paths",
    "count_cycles_through",
    "walk_distribution",
    "EstimateReport",
    "ExpectationReport",
    "RestrictionIdentityReport",
    "SweepTable",
    "estimate_containment",
    "smallest_covering_epsilon",
    "subsquare_expectation_experiment",
    "switching_ratio_sweep",
    "verify_restriction_identity",
    "wilson_interval",
    "LatinLabError",
    "ValidationError",
    "SizeGuardExceeded",
]
