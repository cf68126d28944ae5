"""Fidelity reranking for generation ensembles.

Each candidate generation earns one fidelity point per dialogue action it
faithfully realizes, where an action counts as realized when the generation
entails any of its candidate references. No ground truth is consulted, so the
reranker can run at decoding time. The candidate with the highest score wins;
ties go to the higher log-likelihood, then to the earliest input position.
"""

from __future__ import annotations

from dataclasses import dataclass

from .data import EvalInstance, GenerationCandidate
from .errors import PipelineError
from .evaluator import _context_for, any_entailed
from .nli import NliBackend
from .references import ActionReferences


@dataclass(frozen=True)
class FidelityScore:
    """Count of faithfully realized actions for one candidate generation."""

    instance_id: str
    system_id: str
    score: int
    log_likelihood: float | None = None


def fidelity_score(
    generation: GenerationCandidate,
    instance: EvalInstance,
    refs: list[ActionReferences],
    nli: NliBackend,
    *,
    augment: bool = True,
) -> FidelityScore:
    """Score one generation: +1 per action entailing any candidate reference."""
    if generation.instance_id != instance.instance_id:
        raise PipelineError(
            f"generation {generation.instance_id!r} does not match instance "
            f"{instance.instance_id!r}"
        )
    if len(refs) != len(instance.actions):
        raise PipelineError(f"instance {instance.instance_id!r}: refs/actions mismatch")
    score = 0
    for bundle in refs:
        context = _context_for(instance, bundle, augment)
        texts = [c.text for c in bundle.candidates]
        if any_entailed(generation.text, texts, context, nli):
            score += 1
    return FidelityScore(
        instance_id=generation.instance_id,
        system_id=generation.system_id,
        score=score,
        log_likelihood=generation.log_likelihood,
    )


def pick_best(
    candidates: list[GenerationCandidate],
    scores: list[FidelityScore],
) -> GenerationCandidate:
    """Argmax by (fidelity score, log-likelihood, stable input order).

    Candidates without a log-likelihood rank below any likelihood-bearing
    candidate at equal score.
    """
    if not candidates or len(candidates) != len(scores):
        raise ValueError("candidates and scores must be non-empty and aligned")

    def key(i: int):
        likelihood = scores[i].log_likelihood
        if likelihood is None:
            likelihood = float("-inf")
        return (scores[i].score, likelihood, -i)

    return candidates[max(range(len(candidates)), key=key)]


def rerank(
    candidates: list[GenerationCandidate],
    instance: EvalInstance,
    refs: list[ActionReferences],
    nli: NliBackend,
    *,
    augment: bool = True,
) -> GenerationCandidate:
    """Select the most faithful candidate generation for one instance."""
    if not candidates:
        raise ValueError("candidate list must be non-empty")
    for candidate in candidates:
        if candidate.instance_id != instance.instance_id:
            raise PipelineError(
                f"candidate from system {candidate.system_id!r} targets instance "
                f"{candidate.instance_id!r}, expected {instance.instance_id!r}"
            )
    scores = [
        fidelity_score(candidate, instance, refs, nli, augment=augment)
        for candidate in candidates
    ]
    return pick_best(candidates, scores)
