"""Workbench for annotating, tracking, validating, and evaluating common
ground in two-party dialogues."""

from .agreement import (
    AgreementReport,
    EventSetPair,
    LabelTable,
    best_mapping,
    cohen_kappa,
    embert,
    fleiss_kappa,
    pairwise_report,
)
from .engine import Diagnostic, DialogueState, Severity
from .errors import (
    AgreementError,
    CGError,
    EmbeddingServiceError,
    EngineError,
    LabelError,
    ParseError,
)
from .evaluation import (
    DistributionReport,
    EvalReport,
    distribution,
    macro_average,
    score,
    speaker_avg,
)
from .heuristics import (
    DEFAULT_THRESHOLD,
    Decision,
    DialogMemory,
    MemoryEntry,
    RuleOutcome,
    apply_rules,
    predict_dialogue,
    resolve_ja_in,
    with_predictions,
)
from .model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    EventKind,
    Speaker,
    Utterance,
    certainty_rank,
    cg_degree,
)
from .similarity import (
    LexicalSimilarity,
    PrecomputedVectors,
    RemoteEmbeddings,
    cosine01,
    lexical_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementError",
    "AgreementReport",
    "BeliefLabel",
    "BeliefRecord",
    "CGError",
    "CGLabel",
    "CGRecord",
    "CGValue",
    "DEFAULT_THRESHOLD",
    "Decision",
    "Diagnostic",
    "DialogMemory",
    "DialogueState",
    "DistributionReport",
    "EmbeddingServiceError",
    "EngineError",
    "EvalReport",
    "Event",
    "EventKind",
    "EventSetPair",
    "LabelError",
    "LabelTable",
    "LexicalSimilarity",
    "MemoryEntry",
    "ParseError",
    "PrecomputedVectors",
    "RemoteEmbeddings",
    "RuleOutcome",
    "Severity",
    "Speaker",
    "Utterance",
    "apply_rules",
    "best_mapping",
    "certainty_rank",
    "cg_degree",
    "cohen_kappa",
    "cosine01",
    "distribution",
    "embert",
    "fleiss_kappa",
    "lexical_similarity",
    "macro_average",
    "pairwise_report",
    "predict_dialogue",
    "resolve_ja_in",
    "score",
    "speaker_avg",
    "with_predictions",
]
