"""Task-oriented chart recommendation: ingest a table, pick analytic tasks,
get ranked Vega-Lite charts back."""

__version__ = "0.1.0"

from .data import (
    DataError,
    Dataset,
    Field,
    FieldType,
    FilterPredicate,
    IngestionError,
    apply_filters,
    load_dataset,
    override_field_type,
    set_geo_role,
)
from .enumerator import (
    CandidateSpec,
    Encoding,
    EnumerationLimits,
    EnumerationResult,
    canonicalize,
    enumerate_candidates,
    ground_spec,
    spec_fields,
)
from .combiner import CombinationResult, combine, recommend_combination
from .ranking import (
    ClusterParams,
    CostTable,
    RankingError,
    ScoredSpec,
    cluster,
    cost_score,
    load_cost_table,
    merge_dedup,
    rank_complexity,
    rank_interest,
    rank_reverse_complexity,
    rank_task_coverage,
    score_specs,
    spec_distance,
)
from .rules import ParseError, RuleSet, check, load_rules, parse_rules, violates
from .tasks import ALL_TASKS, ENUMERABLE_TASKS, MarkSpec, TaskError, descriptor, list_tasks
from .vegalite import to_vegalite

__all__ = [
    "ALL_TASKS",
    "ENUMERABLE_TASKS",
    "CandidateSpec",
    "ClusterParams",
    "CombinationResult",
    "CostTable",
    "DataError",
    "Dataset",
    "Encoding",
    "EnumerationLimits",
    "EnumerationResult",
    "Field",
    "FieldType",
    "FilterPredicate",
    "IngestionError",
    "MarkSpec",
    "ParseError",
    "RankingError",
    "RuleSet",
    "ScoredSpec",
    "TaskError",
    "apply_filters",
    "canonicalize",
    "check",
    "cluster",
    "combine",
    "cost_score",
    "descriptor",
    "enumerate_candidates",
    "ground_spec",
    "list_tasks",
    "load_cost_table",
    "load_dataset",
    "load_rules",
    "merge_dedup",
    "override_field_type",
    "parse_rules",
    "rank_complexity",
    "rank_interest",
    "rank_reverse_complexity",
    "rank_task_coverage",
    "recommend_combination",
    "score_specs",
    "set_geo_role",
    "spec_distance",
    "spec_fields",
    "to_vegalite",
    "violates",
]
