"""Exact maximin shares and share-meeting multi-allocations.

Fair division where every agent must get at least their maximin share
(goods) or at most their maximin cost (chores), paid for by duplicating
a bounded number of goods or leaving a bounded number of chores
unassigned.  Everything is computed exactly by enumeration at desk
scale, with a compiled kernel backend when available.
"""

from .core import (
    CHORES, GOODS, TOL,
    Additive, BlockContainmentCost, CharVector, DoubledMmsProfile,
    EntitlementVector, Instance, MmsProfile, MultiAllocation,
    OrderedComposed, PartitionThreshold, Table, XosPartition,
    allocation_from_dict, allocation_to_dict, canonical_bundle, char_vector,
    check_identically_ordered, check_monotone, instance_from_dict,
    instance_to_dict, parse_instance, serialize_instance, spec_value,
    verify_mms,
)
from .errors import (
    BudgetExceeded, InstanceFormatError, MmsError, NoDonorGood,
    PreconditionViolated, RatioAssertionFailed, RetriesExhausted,
    SearchFailed,
)
from .shares import (
    DEFAULT_BUDGET, compute_constrained_mms, compute_mms, compute_mms_hat,
    maximin_share,
)
from .goods import (
    DuplicationResult, SampleResult, SamplerConfig,
    dup_ordered, duplicate_additive, redistribute_goods,
    sample_entitled, sample_monotone_goods, sample_ordered_goods_base,
)
from .chores import (
    ChoresSampleResult, CoverageReport, SubInstance, TrimResult,
    brute_force_minmax_ratio, coverage_deficit, dedupe_keep_lowest,
    delta_star, ordered_chores_pipeline, preprocess_chores,
    redistribute_chores, sample_monotone_chores, trim_additive_chores,
)
from .adversarial import (
    Graph, HardnessReduction, SelectionFamily,
    disjoint_selection_exists, gen_chores_lb_instance, gen_goods_lb_instance,
    hardness_reduce, independent_set_exists, iter_disjoint_selections,
    min_l0_over_family, min_linf_over_family, parse_graph, serialize_graph,
)
from .harness import (
    Cell, ExperimentConfig, TrialRecord, gen_random_instance,
    run_experiment, trials_to_csv, write_trials_csv,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "GOODS", "CHORES", "TOL", "DEFAULT_BUDGET", "BACKEND", "__version__",
    "Additive", "OrderedComposed", "PartitionThreshold", "XosPartition",
    "BlockContainmentCost", "Table", "EntitlementVector", "Instance",
    "MultiAllocation", "CharVector", "MmsProfile", "DoubledMmsProfile",
    "MmsError", "InstanceFormatError", "BudgetExceeded", "RetriesExhausted",
    "NoDonorGood", "PreconditionViolated", "RatioAssertionFailed",
    "SearchFailed",
    "canonical_bundle", "char_vector", "spec_value", "check_monotone",
    "check_identically_ordered", "verify_mms",
    "parse_instance", "serialize_instance", "instance_from_dict",
    "instance_to_dict", "allocation_to_dict", "allocation_from_dict",
    "maximin_share", "compute_mms", "compute_mms_hat",
    "compute_constrained_mms",
    "SamplerConfig", "SampleResult", "DuplicationResult",
    "sample_monotone_goods", "sample_ordered_goods_base",
    "redistribute_goods", "dup_ordered", "duplicate_additive",
    "sample_entitled",
    "SubInstance", "CoverageReport", "ChoresSampleResult", "TrimResult",
    "sample_monotone_chores", "preprocess_chores", "coverage_deficit",
    "redistribute_chores", "ordered_chores_pipeline", "dedupe_keep_lowest",
    "brute_force_minmax_ratio", "trim_additive_chores", "delta_star",
    "SelectionFamily", "Graph", "HardnessReduction",
    "gen_goods_lb_instance", "gen_chores_lb_instance",
    "min_linf_over_family", "min_l0_over_family", "parse_graph",
    "serialize_graph", "hardness_reduce", "iter_disjoint_selections",
    "disjoint_selection_exists", "independent_set_exists",
    "Cell", "TrialRecord", "ExperimentConfig", "gen_random_instance",
    "run_experiment", "trials_to_csv", "write_trials_csv",
]
