"""Schema-guided faithfulness evaluation for task-oriented dialogue generation.

The package checks whether generated utterances faithfully realize their
dialogue actions: actions are expanded into entailment references via
schema-driven rules, an NLI backend judges entailment (with dialogue-context
premise augmentation as a fallback), and results aggregate into faithfulness
and slot-error metrics with seen/unseen domain splits. A fidelity reranker
selects the most faithful generation from an ensemble, and a robustness
harness scores the reference rules under rephrased schema variants.
"""

from .data import (
    DialogueAction,
    EvalInstance,
    GenerationCandidate,
    ServiceSchema,
    SlotSchema,
    build_value_pools,
    parse_generations,
    parse_instances,
    parse_schemas,
)
from .evaluator import (
    ActionAssessment,
    InstanceResult,
    MetricReport,
    MetricTriple,
    ValidationOutcome,
    augment_premise,
    compute_ser,
    compute_sgsacc,
    evaluate_instance,
    instance_slot_errors,
    run_evaluation,
    select_entailment_reference,
    validate_instance,
)
from .nli import (
    CachedNliBackend,
    MockNliBackend,
    NliBackend,
    NliPair,
    NliVerdict,
    RemoteNliBackend,
    create_backend,
)
from .references import (
    ActionReferences,
    CandidateReference,
    NegativeReference,
    build_candidates,
    build_instance_references,
    build_negatives,
    normalize_slot_name,
)
from .reranker import FidelityScore, fidelity_score, pick_best, rerank
from .robustness import RobustnessReport, run_robustness

__version__ = "0.1.0"

__all__ = [
    "ActionAssessment",
    "ActionReferences",
    "CachedNliBackend",
    "CandidateReference",
    "DialogueAction",
    "EvalInstance",
    "FidelityScore",
    "GenerationCandidate",
    "InstanceResult",
    "MetricReport",
    "MetricTriple",
    "MockNliBackend",
    "NegativeReference",
    "NliBackend",
    "NliPair",
    "NliVerdict",
    "RemoteNliBackend",
    "RobustnessReport",
    "ServiceSchema",
    "SlotSchema",
    "ValidationOutcome",
    "augment_premise",
    "build_candidates",
    "build_instance_references",
    "build_negatives",
    "build_value_pools",
    "compute_ser",
    "compute_sgsacc",
    "create_backend",
    "evaluate_instance",
    "fidelity_score",
    "instance_slot_errors",
    "normalize_slot_name",
    "parse_generations",
    "parse_instances",
    "parse_schemas",
    "pick_best",
    "rerank",
    "run_evaluation",
    "run_robustness",
    "select_entailment_reference",
    "validate_instance",
]
