"""Dynamic influence maximization with RR-set reuse via importance mixing."""

from .diffusion import (
    InfluenceEstimate,
    SeedSet,
    estimate_influence_mc,
    exact_influence_bruteforce,
    exact_rr_distribution,
    simulate_ic_once,
)
from .errors import CapacityError, DimpError, EdgeListParseError, StaleBatchError
from .graph import (
    Graph,
    UpdateBatch,
    WeightDelta,
    apply_update_batch,
    assign_wc_weights,
    changed_source_nodes,
    generate_random_updates,
    load_edge_list,
    read_update_batch_csv,
    write_update_batch_csv,
)
from .mixing import (
    MixStats,
    RatioContext,
    RRTrace,
    accept_probability,
    dead_ratio,
    exact_rr_trace_probability,
    mix_collection,
    remain_probability,
    resample_rr_set,
    rr_probability_ratio,
    sample_rr_set_traced,
)
from .rr import (
    RRCollection,
    RRSet,
    build_collection,
    build_inverted_index,
    coverage,
    estimate_influence_rr,
    load_collection,
    sample_rr_set,
    sample_rr_set_from_root,
    save_collection,
)
from .selection import (
    SampleSizePolicy,
    SelectionResult,
    decide_sample_size,
    greedy_select,
    select_seeds_end_to_end,
)
from .synth import generate_synthetic_graph

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DimpError",
    "EdgeListParseError",
    "Graph",
    "InfluenceEstimate",
    "MixStats",
    "RRCollection",
    "RRSet",
    "RRTrace",
    "RatioContext",
    "SampleSizePolicy",
    "SeedSet",
    "SelectionResult",
    "StaleBatchError",
    "UpdateBatch",
    "WeightDelta",
    "accept_probability",
    "apply_update_batch",
    "assign_wc_weights",
    "build_collection",
    "build_inverted_index",
    "changed_source_nodes",
    "coverage",
    "dead_ratio",
    "decide_sample_size",
    "estimate_influence_mc",
    "estimate_influence_rr",
    "exact_influence_bruteforce",
    "exact_rr_distribution",
    "exact_rr_trace_probability",
    "generate_random_updates",
    "generate_synthetic_graph",
    "greedy_select",
    "load_collection",
    "load_edge_list",
    "mix_collection",
    "read_update_batch_csv",
    "remain_probability",
    "resample_rr_set",
    "rr_probability_ratio",
    "sample_rr_set",
    "sample_rr_set_from_root",
    "sample_rr_set_traced",
    "save_collection",
    "select_seeds_end_to_end",
    "simulate_ic_once",
    "write_update_batch_csv",
]
