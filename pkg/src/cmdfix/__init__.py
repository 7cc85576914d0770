"""Learning command-repair rules from examples by lazy version-space synthesis."""

from .dsl import (
    ConcreteRule,
    ConstStr,
    Cpos,
    FStr,
    Ipos,
    SubLr,
    VarMatch,
    eval_pos,
    eval_rule,
    show_rule,
    tokenize,
)
from .oracle import OracleBounds, brute_substrings, nonlazy_synth
from .partition import LearnResult, enumerate_partitions, group_by_shape, learn_rules
from .store import RuleStore, StoreError, Suggestion
from .synthesis import (
    CandidateSet,
    Example,
    SymbolicRule,
    SynthConfig,
    apply_symbolic,
    canonical_rule,
    concretize,
    count_concrete,
    rank_select,
    show_symbolic,
    synth_rules,
    synth_substrings,
)

__all__ = [
    "CandidateSet",
    "ConcreteRule",
    "ConstStr",
    "Cpos",
    "Example",
    "FStr",
    "Ipos",
    "LearnResult",
    "OracleBounds",
    "RuleStore",
    "StoreError",
    "SubLr",
    "Suggestion",
    "SymbolicRule",
    "SynthConfig",
    "VarMatch",
    "apply_symbolic",
    "brute_substrings",
    "canonical_rule",
    "concretize",
    "count_concrete",
    "enumerate_partitions",
    "eval_pos",
    "eval_rule",
    "group_by_shape",
    "learn_rules",
    "nonlazy_synth",
    "rank_select",
    "show_rule",
    "show_symbolic",
    "synth_rules",
    "synth_substrings",
    "tokenize",
]
