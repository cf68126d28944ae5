"""Faithfulness evaluation: reference selection, validation, metric aggregation.

A generation is faithful to an instance when every dialogue action is
faithfully realized: for each action the best-entailed candidate reference is
selected against the ground truth, then the generation must entail that
reference. When a bare premise fails to reach the entailment label, the
premise is augmented with the previous dialogue turn and the slot description
and checked once more; this fallback applies to reference selection, to the
validation filter and to the final check.

Validation screens instances using only the ground truth (so its outcome is
identical for every system under evaluation): the ground truth must entail at
least one candidate per action and must not entail any negative reference.

Slot Error Rate covers the non-categorical slots only: an instance has a slot
error when some value expected verbatim is missing from the generation under
(case-insensitive by default) substring matching.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .data import (
    EvalInstance,
    GenerationCandidate,
    ServiceSchema,
    build_value_pools,
)
from .errors import PipelineError
from .nli import NliBackend, NliPair, NliVerdict
from .references import ActionReferences, CandidateReference, build_instance_references


@dataclass(frozen=True)
class ActionAssessment:
    """Faithfulness outcome for one action of one generation."""

    action_index: int
    entailment_reference: CandidateReference
    faithful: bool
    used_augmented_premise: bool
    verdict: NliVerdict


@dataclass(frozen=True)
class ValidationOutcome:
    """Whether an instance's ground truth supports reliable evaluation."""

    instance_id: str
    passed: bool
    failed_positive: bool
    failed_negative: bool


@dataclass(frozen=True)
class InstanceResult:
    instance_id: str
    system_id: str
    assessments: tuple[ActionAssessment, ...]
    instance_faithful: bool
    validated: bool


@dataclass(frozen=True)
class SlotErrorDetail:
    """One non-categorical value lookup inside a generation."""

    action_index: int
    slot: str
    value: str
    found: bool


@dataclass(frozen=True)
class MetricTriple:
    """A percentage reported overall and per seen/unseen domain split."""

    overall: float | None
    seen: float | None
    unseen: float | None

    def to_dict(self) -> dict:
        return {"overall": self.overall, "seen": self.seen, "unseen": self.unseen}


@dataclass(frozen=True)
class MetricReport:
    """Aggregated faithfulness and slot-error metrics for one system."""

    system_id: str
    sgsacc_all: MetricTriple
    sgsacc_validated: MetricTriple | None
    ser: MetricTriple
    counts: dict
    excluded_count: int

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "sgsacc_all": self.sgsacc_all.to_dict(),
            "sgsacc_validated": (
                self.sgsacc_validated.to_dict() if self.sgsacc_validated else None
            ),
            "ser": self.ser.to_dict(),
            "counts": self.counts,
            "excluded_count": self.excluded_count,
        }


def augment_premise(
    utterance: str,
    previous_turn: str | None = None,
    slot_description: str | None = None,
) -> str:
    """Prepend dialogue context: "{previous turn} {slot description}. {utterance}"."""
    if not utterance:
        raise ValueError("utterance must be non-empty")
    if not previous_turn and not slot_description:
        return utterance
    parts = []
    if previous_turn:
        parts.append(previous_turn.strip())
    if slot_description:
        description = slot_description.strip()
        if not description.endswith((".", "!", "?")):
            description += "."
        parts.append(description)
    parts.append(utterance.strip())
    return " ".join(parts)


def _context_for(instance: EvalInstance, refs: ActionReferences, augment: bool):
    if not augment:
        return None
    return (instance.previous_turn, refs.slot_description)


def check_entailment(
    premise: str,
    hypothesis: str,
    context,
    nli: NliBackend,
) -> tuple[bool, bool, NliVerdict]:
    """Entailment with augmented-premise fallback.

    Returns (entailed, used_augmented_premise, verdict). The augmented premise
    is consulted only when the bare premise fails to reach the entailment
    label and some context is available. An empty premise entails nothing.
    """
    if not premise:
        return False, False, NliVerdict(0.0, 1.0, 0.0)
    verdict = nli.classify(NliPair(premise, hypothesis))
    if verdict.is_entailment:
        return True, False, verdict
    previous_turn, slot_description = context if context else (None, None)
    if previous_turn or slot_description:
        augmented = augment_premise(premise, previous_turn, slot_description)
        retry = nli.classify(NliPair(augmented, hypothesis))
        return retry.is_entailment, True, retry
    return False, False, verdict


def any_entailed(premise: str, texts, context, nli: NliBackend) -> bool:
    """True when the premise entails at least one of the hypothesis texts.

    The augmented premise is consulted for the whole group only when no text
    is entailed by the bare premise. An empty premise entails nothing.
    """
    if not texts or not premise:
        return False
    verdicts = nli.classify_batch([NliPair(premise, text) for text in texts])
    if any(v.is_entailment for v in verdicts):
        return True
    previous_turn, slot_description = context if context else (None, None)
    if previous_turn or slot_description:
        augmented = augment_premise(premise, previous_turn, slot_description)
        verdicts = nli.classify_batch([NliPair(augmented, text) for text in texts])
        return any(v.is_entailment for v in verdicts)
    return False


def select_entailment_reference(
    candidates,
    ground_truth: str,
    context,
    nli: NliBackend,
) -> tuple[CandidateReference, float]:
    """Pick the candidate with the highest entailment score against the truth.

    Scoring uses the bare ground truth; when no candidate reaches the
    entailment label there, all candidates are rescored on the augmented
    premise. Ties keep the earliest candidate.
    """
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    verdicts = nli.classify_batch([NliPair(ground_truth, c.text) for c in candidates])
    if not any(v.is_entailment for v in verdicts):
        previous_turn, slot_description = context if context else (None, None)
        if previous_turn or slot_description:
            augmented = augment_premise(ground_truth, previous_turn, slot_description)
            verdicts = nli.classify_batch([NliPair(augmented, c.text) for c in candidates])
    best = max(range(len(candidates)), key=lambda i: verdicts[i].p_entailment)
    return candidates[best], verdicts[best].p_entailment


def validate_instance(
    instance: EvalInstance,
    refs: list[ActionReferences],
    nli: NliBackend,
    *,
    augment: bool = True,
) -> ValidationOutcome:
    """Check the ground truth against candidates and negatives.

    Fails positive when some action has no entailed candidate; fails negative
    when any negative reference is entailed. Depends only on the instance and
    its references, never on a generation.
    """
    if len(refs) != len(instance.actions):
        raise PipelineError(f"instance {instance.instance_id!r}: refs/actions mismatch")
    failed_positive = False
    failed_negative = False
    for bundle in refs:
        context = _context_for(instance, bundle, augment)
        candidate_texts = [c.text for c in bundle.candidates]
        if not any_entailed(instance.ground_truth, candidate_texts, context, nli):
            failed_positive = True
        negative_texts = [n.text for n in bundle.negatives]
        if negative_texts and any_entailed(instance.ground_truth, negative_texts, context, nli):
            failed_negative = True
    return ValidationOutcome(
        instance_id=instance.instance_id,
        passed=not failed_positive and not failed_negative,
        failed_positive=failed_positive,
        failed_negative=failed_negative,
    )


def evaluate_instance(
    generation: GenerationCandidate,
    instance: EvalInstance,
    refs: list[ActionReferences],
    nli: NliBackend,
    validation: ValidationOutcome | None = None,
    *,
    augment: bool = True,
) -> InstanceResult:
    """Assess one generation: every action must entail its selected reference."""
    if generation.instance_id != instance.instance_id:
        raise PipelineError(
            f"generation {generation.instance_id!r} does not match instance "
            f"{instance.instance_id!r}"
        )
    if len(refs) != len(instance.actions):
        raise PipelineError(f"instance {instance.instance_id!r}: refs/actions mismatch")
    assessments = []
    for bundle in refs:
        if not bundle.candidates:
            raise PipelineError(
                f"instance {instance.instance_id!r}: no candidates for action "
                f"{bundle.action_index}"
            )
        context = _context_for(instance, bundle, augment)
        reference, _ = select_entailment_reference(
            bundle.candidates, instance.ground_truth, context, nli
        )
        faithful, used_augmented, verdict = check_entailment(
            generation.text, reference.text, context, nli
        )
        assessments.append(
            ActionAssessment(
                action_index=bundle.action_index,
                entailment_reference=reference,
                faithful=faithful,
                used_augmented_premise=used_augmented,
                verdict=verdict,
            )
        )
    return InstanceResult(
        instance_id=instance.instance_id,
        system_id=generation.system_id,
        assessments=tuple(assessments),
        instance_faithful=all(a.faithful for a in assessments),
        validated=validation.passed if validation is not None else True,
    )


def instance_slot_errors(
    generation: GenerationCandidate,
    instance: EvalInstance,
    catalog: dict[str, ServiceSchema],
    *,
    exact_case: bool = False,
) -> tuple[bool | None, tuple[SlotErrorDetail, ...]]:
    """Slot-error flag for one generation.

    Returns (flag, details) where flag is None when the instance carries no
    non-categorical valued slot and is therefore excluded from the SER
    denominator.
    """
    service = catalog[instance.service]
    details = []
    evaluable = False
    has_error = False
    haystack = generation.text if exact_case else generation.text.lower()
    for index, action in enumerate(instance.actions):
        if action.slot is None or not action.values:
            continue
        slot_schema = service.find_slot(action.slot, instance_id=instance.instance_id)
        if slot_schema.is_categorical:
            continue
        evaluable = True
        for value in action.values:
            needle = value if exact_case else value.lower()
            found = needle in haystack
            details.append(SlotErrorDetail(index, action.slot, value, found))
            if not found:
                has_error = True
    return (has_error if evaluable else None), tuple(details)


def _percentage(flags: list[bool]) -> float | None:
    if not flags:
        return None
    return 100.0 * sum(1 for f in flags if f) / len(flags)


def _split(items, instances_by_id):
    seen = [x for x in items if not instances_by_id[x.instance_id].is_unseen_domain]
    unseen = [x for x in items if instances_by_id[x.instance_id].is_unseen_domain]
    return seen, unseen


def compute_sgsacc(
    results: list[InstanceResult],
    instances_by_id: dict[str, EvalInstance],
    *,
    validation_enabled: bool = True,
) -> tuple[MetricTriple, MetricTriple | None]:
    """Faithful-instance percentages over all and over validated instances."""

    def triple(subset: list[InstanceResult]) -> MetricTriple:
        seen, unseen = _split(subset, instances_by_id)
        return MetricTriple(
            overall=_percentage([r.instance_faithful for r in subset]),
            seen=_percentage([r.instance_faithful for r in seen]),
            unseen=_percentage([r.instance_faithful for r in unseen]),
        )

    sgsacc_all = triple(results)
    if not validation_enabled:
        return sgsacc_all, None
    return sgsacc_all, triple([r for r in results if r.validated])


@dataclass(frozen=True)
class _SerEntry:
    instance_id: str
    flag: bool


def compute_ser(
    flags_by_instance: dict[str, bool | None],
    instances_by_id: dict[str, EvalInstance],
) -> MetricTriple:
    """Percentage of SER-evaluable instances with a slot error."""
    entries = [
        _SerEntry(instance_id, flag)
        for instance_id, flag in flags_by_instance.items()
        if flag is not None
    ]
    seen, unseen = _split(entries, instances_by_id)
    return MetricTriple(
        overall=_percentage([e.flag for e in entries]),
        seen=_percentage([e.flag for e in seen]),
        unseen=_percentage([e.flag for e in unseen]),
    )


@dataclass(frozen=True)
class SystemEvaluation:
    """Everything computed for one system in an evaluation run."""

    system_id: str
    results: tuple[InstanceResult, ...]
    slot_error_flags: dict
    slot_error_details: dict
    report: MetricReport


@dataclass(frozen=True)
class EvaluationRun:
    """Shared validation outcomes plus one SystemEvaluation per system."""

    validation: dict[str, ValidationOutcome] | None
    systems: dict[str, SystemEvaluation]
    excluded_count: int


def _bucket_counts(instances: list[EvalInstance]) -> dict:
    unseen = sum(1 for i in instances if i.is_unseen_domain)
    return {"overall": len(instances), "seen": len(instances) - unseen, "unseen": unseen}


def run_evaluation(
    instances: list[EvalInstance],
    catalog: dict[str, ServiceSchema],
    generations_by_system: dict[str, dict[str, GenerationCandidate]],
    nli: NliBackend,
    *,
    validation: bool = True,
    augment: bool = True,
    max_negatives: int = 3,
    seed: int = 0,
    workers: int = 1,
    ser_exact_case: bool = False,
    value_pools: dict | None = None,
) -> EvaluationRun:
    """Run the full pipeline for every system over a shared instance set.

    References and validation outcomes are built once per instance and shared
    across systems, which keeps reference selection identical for every
    system. Instances are processed independently (optionally in parallel)
    and merged in instance-id order, so the result does not depend on input
    or completion order.
    """
    ordered = sorted(instances, key=lambda i: i.instance_id)
    instances_by_id = {i.instance_id: i for i in ordered}
    pools = value_pools if value_pools is not None else build_value_pools(ordered, catalog)
    system_ids = sorted(generations_by_system)

    def process(instance: EvalInstance):
        refs = build_instance_references(
            instance, catalog, pools, max_negatives=max_negatives, seed=seed
        )
        outcome = (
            validate_instance(instance, refs, nli, augment=augment) if validation else None
        )
        per_system = {}
        for system_id in system_ids:
            generation = generations_by_system[system_id].get(instance.instance_id)
            if generation is None:
                continue
            result = evaluate_instance(
                generation, instance, refs, nli, outcome, augment=augment
            )
            flag, details = instance_slot_errors(
                generation, instance, catalog, exact_case=ser_exact_case
            )
            per_system[system_id] = (result, flag, details)
        return instance.instance_id, outcome, per_system

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            processed = list(pool.map(process, ordered))
    else:
        processed = [process(instance) for instance in ordered]
    processed.sort(key=lambda item: item[0])

    outcomes = {iid: outcome for iid, outcome, _ in processed if outcome is not None}
    excluded = sum(1 for outcome in outcomes.values() if not outcome.passed)

    systems = {}
    for system_id in system_ids:
        results = []
        flags = {}
        details = {}
        for instance_id, _, per_system in processed:
            if system_id not in per_system:
                continue
            result, flag, detail = per_system[system_id]
            results.append(result)
            flags[instance_id] = flag
            details[instance_id] = detail
        covered = [instances_by_id[r.instance_id] for r in results]
        sgsacc_all, sgsacc_validated = compute_sgsacc(
            results, instances_by_id, validation_enabled=validation
        )
        ser = compute_ser(flags, instances_by_id)
        counts = {
            "instances": _bucket_counts(covered),
            "validated": (
                _bucket_counts([i for i, r in zip(covered, results) if r.validated])
                if validation
                else None
            ),
            "ser_evaluable": _bucket_counts(
                [instances_by_id[iid] for iid, flag in flags.items() if flag is not None]
            ),
        }
        report = MetricReport(
            system_id=system_id,
            sgsacc_all=sgsacc_all,
            sgsacc_validated=sgsacc_validated,
            ser=ser,
            counts=counts,
            excluded_count=excluded if validation else 0,
        )
        systems[system_id] = SystemEvaluation(
            system_id=system_id,
            results=tuple(results),
            slot_error_flags=flags,
            slot_error_details=details,
            report=report,
        )
    return EvaluationRun(
        validation=outcomes if validation else None,
        systems=systems,
        excluded_count=excluded if validation else 0,
    )
