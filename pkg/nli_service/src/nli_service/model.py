"""Model backends.

Every backend answers (premise, hypothesis) pairs with probability triples in
the protocol's field order, pinned once here as PROTOCOL_LABELS. Checkpoints
store their own class order; it is resolved against this table at load time
so a mismatch fails loudly instead of silently swapping probabilities.
"""

from __future__ import annotations

PROTOCOL_LABELS = ("entailment", "neutral", "contradiction")


def resolve_label_order(id2label: dict[int, str]) -> list[int]:
    """Class index emitting each protocol label, in protocol order."""
    by_label = {str(label).lower(): int(index) for index, label in id2label.items()}
    missing = [label for label in PROTOCOL_LABELS if label not in by_label]
    if missing:
        raise RuntimeError(
            f"checkpoint labels {sorted(by_label)} do not cover {missing}; "
            "cannot map classes onto the wire protocol"
        )
    return [by_label[label] for label in PROTOCOL_LABELS]


class NliModel:
    """Interface: batch prediction of (entailment, neutral, contradiction)."""

    checkpoint = "unknown"

    def predict(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        raise NotImplementedError


class TransformersNliModel(NliModel):
    """Sequence-classification checkpoint with three NLI classes.

    Inference runs in eval mode without gradients, so repeated identical
    requests produce identical probabilities.
    """

    def __init__(self, checkpoint: str, device: str = "cpu", max_length: int = 512):
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.checkpoint = checkpoint
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        self._model = AutoModelForSequenceClassification.from_pretrained(checkpoint)
        self._model.eval()
        self._device = torch.device(device)
        self._model.to(self._device)
        self._max_length = max_length
        self._order = resolve_label_order(dict(self._model.config.id2label))

    def predict(self, pairs):
        premises = [premise for premise, _ in pairs]
        hypotheses = [hypothesis for _, hypothesis in pairs]
        batch = self._tokenizer(
            premises,
            hypotheses,
            padding=True,
            truncation=True,
            max_length=self._max_length,
            return_tensors="pt",
        ).to(self._device)
        with self._torch.no_grad():
            logits = self._model(**batch).logits
        probabilities = self._torch.softmax(logits, dim=-1).cpu()
        return [tuple(float(row[i]) for i in self._order) for row in probabilities]
