"""Robustness of the metric to schema writing styles.

Rebuilding references from a rephrased schema variant, the harness classifies
ground-truth/action pairs: a positive example (true action) should have some
candidate entailed by the ground truth, and each negative example (the action
with one substituted value) should have none of its references entailed.
Precision, recall and F1 over this classification quantify how robust the
reference rules are to the variant's phrasing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .data import EvalInstance, ServiceSchema
from .evaluator import _context_for, any_entailed
from .nli import NliBackend
from .references import build_instance_references


@dataclass(frozen=True)
class RobustnessReport:
    """Confusion counts and derived scores for one schema variant."""

    variant_id: str
    true_pos: int
    false_pos: int
    true_neg: int
    false_neg: int

    @property
    def precision(self) -> float | None:
        denominator = self.true_pos + self.false_pos
        return self.true_pos / denominator if denominator else None

    @property
    def recall(self) -> float | None:
        denominator = self.true_pos + self.false_neg
        return self.true_pos / denominator if denominator else None

    @property
    def f1(self) -> float | None:
        precision, recall = self.precision, self.recall
        if precision is None or recall is None or precision + recall == 0:
            return None
        return 2 * precision * recall / (precision + recall)

    def to_dict(self) -> dict:
        return {
            "variant_id": self.variant_id,
            "true_pos": self.true_pos,
            "false_pos": self.false_pos,
            "true_neg": self.true_neg,
            "false_neg": self.false_neg,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    def formatted_row(self) -> tuple[str, str, str, str]:
        """Variant row with precision/recall as one-decimal percentages and
        F1 to three decimals."""

        def pct(value):
            return "-" if value is None else f"{100.0 * value:.1f}"

        f1 = "-" if self.f1 is None else f"{self.f1:.3f}"
        return (self.variant_id, pct(self.precision), pct(self.recall), f1)


def run_robustness(
    instances: list[EvalInstance],
    variant_catalog: dict[str, ServiceSchema],
    nli: NliBackend,
    *,
    variant_id: str,
    value_pools: dict | None = None,
    max_negatives: int = 3,
    seed: int = 0,
    augment: bool = True,
) -> RobustnessReport:
    """Classify positive and negative examples under one schema variant.

    Positive examples are (ground truth, action) pairs; negative examples are
    one per substituted value, judged positive when any of that substitution's
    reference sentences is entailed. A missing slot in the variant raises a
    resolution error naming the slot.
    """
    true_pos = false_pos = true_neg = false_neg = 0
    for instance in sorted(instances, key=lambda i: i.instance_id):
        refs = build_instance_references(
            instance,
            variant_catalog,
            value_pools,
            max_negatives=max_negatives,
            seed=seed,
        )
        for bundle in refs:
            context = _context_for(instance, bundle, augment)
            candidate_texts = [c.text for c in bundle.candidates]
            if any_entailed(instance.ground_truth, candidate_texts, context, nli):
                true_pos += 1
            else:
                false_neg += 1
            by_value: dict[str, list[str]] = {}
            for negative in bundle.negatives:
                by_value.setdefault(negative.tampered_value, []).append(negative.text)
            for texts in by_value.values():
                if any_entailed(instance.ground_truth, texts, context, nli):
                    false_pos += 1
                else:
                    true_neg += 1
    return RobustnessReport(
        variant_id=variant_id,
        true_pos=true_pos,
        false_pos=false_pos,
        true_neg=true_neg,
        false_neg=false_neg,
    )
