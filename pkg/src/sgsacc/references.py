"""Turn dialogue actions into entailment references.

The production rules key on the action intent and the slot type:

* Inform-like intents (anything except REQUEST, GOODBYE and REQ_MORE) with a
  non-boolean slot use the copula templates ``{description} is {value}`` and
  ``{slot name} is {value}`` (``are`` plus a comma list for multiple values).
* Boolean slots become answered questions ``{description}? Yes.`` /
  ``{slot name}? Yes.`` (``No.`` for false) plus auxiliary-verb variants whose
  shape depends on whether the slot name already carries an ``is``, ``has`` or
  ``have`` token: existing auxiliaries are reused (negated for false values,
  e.g. ``is_nonstop`` -> "Is not nonstop."), otherwise ``has``/``have``/``is``
  prefixes are attached. Names without an auxiliary additionally get the
  "Has no ..." / "Does not ..." false variants; extra candidates are harmless
  because only the best-entailed one is ever selected.
* REQUEST uses ``Request {description}`` / ``Request {slot name}``; GOODBYE
  and REQ_MORE map to fixed sentence sets.

Description-based candidates come first, then name-based ones, then the
auxiliary variants. Every emitted sentence starts with a capital letter and
ends with sentence punctuation. Negative references realize the same action
with a substituted ("tampered") value through the same rules.

All functions here are pure; seeded sampling makes negative construction
deterministic for identical inputs.
"""

from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass, replace

from .data import DialogueAction, EvalInstance, ServiceSchema, SlotSchema
from .errors import PipelineError, ValueDomainError

logger = logging.getLogger(__name__)

SPECIAL_INTENTS = frozenset({"REQUEST", "GOODBYE", "REQ_MORE"})

GOODBYE_CANDIDATES = ("Have a good day.", "Bye bye.", "See you.")
REQ_MORE_CANDIDATES = (
    "What else do you need?",
    "What else can I help you with?",
    "Is there anything else?",
)

_AUXILIARY_HAS = frozenset({"has", "have"})


@dataclass(frozen=True)
class CandidateReference:
    """A hypothesis sentence built from an action, tagged with its rule."""

    text: str
    rule_id: str


@dataclass(frozen=True)
class NegativeReference:
    """A hypothesis sentence built from a value-tampered action."""

    text: str
    tampered_value: str


@dataclass(frozen=True)
class ActionReferences:
    """Candidates and negatives for one action of an instance."""

    action_index: int
    candidates: tuple[CandidateReference, ...]
    negatives: tuple[NegativeReference, ...] = ()
    slot_description: str | None = None


def normalize_slot_name(slot: str) -> str:
    """Surface form of a slot identifier: underscores become single spaces."""
    if not slot:
        raise ValueError("slot name must be non-empty")
    return " ".join(slot.replace("_", " ").split())


def _sentence(text: str) -> str:
    """Normalize to a capitalized sentence with terminal punctuation."""
    text = " ".join(text.split())
    if not text:
        raise ValueError("cannot build an empty sentence")
    text = text[0].upper() + text[1:]
    if not text.endswith((".", "!", "?")):
        text += "."
    return text


def _join_values(values: tuple[str, ...]) -> str:
    if len(values) == 1:
        return values[0]
    return ", ".join(values[:-1]) + " and " + values[-1]


def _boolean_value(action: DialogueAction, slot_schema: SlotSchema) -> bool:
    if len(action.values) != 1 or action.values[0] not in ("True", "False"):
        raise ValueDomainError(
            f"boolean slot {slot_schema.name!r} needs exactly one 'True'/'False' value, "
            f"got {list(action.values)!r}"
        )
    return action.values[0] == "True"


def _boolean_candidates(surface: str, description: str, truthy: bool) -> list[tuple[str, str]]:
    answer = "Yes" if truthy else "No"
    suffix = "yes" if truthy else "no"
    out = []
    if description:
        out.append((f"bool-desc-{suffix}", f"{description}? {answer}."))
    out.append((f"bool-name-{suffix}", f"{surface}? {answer}."))
    tokens = surface.split()
    has_auxiliary_has = bool(_AUXILIARY_HAS & set(tokens))
    has_auxiliary_is = "is" in tokens
    if truthy:
        if has_auxiliary_has:
            out.append(("bool-does", f"Does {surface}"))
        if has_auxiliary_is:
            out.append(("bool-name", surface))
        if not has_auxiliary_has and not has_auxiliary_is:
            out.append(("bool-has", f"has {surface}"))
            out.append(("bool-have", f"have {surface}"))
            out.append(("bool-is", f"is {surface}"))
    else:
        if has_auxiliary_has:
            out.append(("bool-does-not", f"Does not {surface}"))
        if has_auxiliary_is:
            negated = " ".join("is not" if token == "is" else token for token in tokens)
            out.append(("bool-is-negated", negated))
        if not has_auxiliary_has and not has_auxiliary_is:
            out.append(("bool-has-not", f"has not {surface}"))
            out.append(("bool-have-not", f"have not {surface}"))
            out.append(("bool-is-not", f"is not {surface}"))
            out.append(("bool-has-no", f"Has no {surface}"))
            out.append(("bool-does-not", f"Does not {surface}"))
    return out


def build_candidates(
    action: DialogueAction,
    slot_schema: SlotSchema | None = None,
) -> list[CandidateReference]:
    """Construct the candidate reference set for one dialogue action."""
    if action.intent == "GOODBYE":
        return [CandidateReference(t, f"goodbye-{i}") for i, t in enumerate(GOODBYE_CANDIDATES, 1)]
    if action.intent == "REQ_MORE":
        return [CandidateReference(t, f"reqmore-{i}") for i, t in enumerate(REQ_MORE_CANDIDATES, 1)]
    if slot_schema is None:
        raise ValueError(f"intent {action.intent!r} requires a slot schema")

    surface = normalize_slot_name(slot_schema.name)
    description = " ".join(slot_schema.description.split())

    if action.intent == "REQUEST":
        raw = []
        if description:
            raw.append(("request-desc", f"Request {description}"))
        raw.append(("request-name", f"Request {surface}"))
    elif slot_schema.is_boolean:
        raw = _boolean_candidates(surface, description, _boolean_value(action, slot_schema))
    else:
        if not action.values:
            raise ValueDomainError(
                f"intent {action.intent!r} on slot {slot_schema.name!r} carries no value to realize"
            )
        joined = _join_values(action.values)
        copula = "is" if len(action.values) == 1 else "are"
        kind = "single" if len(action.values) == 1 else "multi"
        raw = []
        if description:
            raw.append((f"{kind}-desc", f"{description} {copula} {joined}"))
        raw.append((f"{kind}-name", f"{surface} {copula} {joined}"))

    candidates = []
    emitted = set()
    for rule_id, text in raw:
        sentence = _sentence(text)
        if sentence not in emitted:
            emitted.add(sentence)
            candidates.append(CandidateReference(sentence, rule_id))
    return candidates


def _stable_seed(seed: int, *parts: str) -> int:
    key = "\x1f".join([str(seed), *parts]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def build_negatives(
    action: DialogueAction,
    slot_schema: SlotSchema,
    value_pool: tuple[str, ...] = (),
    *,
    max_negatives: int = 3,
    seed: int = 0,
) -> list[NegativeReference]:
    """Realize the action with substituted values to obtain negative references.

    Boolean slots flip the value, other categorical slots use every remaining
    possible value, and non-categorical slots draw up to ``max_negatives``
    values from the observed-value pool with seeded, deterministic sampling.
    When nothing can be substituted, an empty list is returned and a warning
    logged; values are never fabricated.
    """
    if not action.values:
        logger.warning("action on slot %r has no values; no negatives built", slot_schema.name)
        return []
    true_values = set(action.values)
    if slot_schema.is_boolean:
        _boolean_value(action, slot_schema)
        substitutes = ["False" if action.values[0] == "True" else "True"]
    elif slot_schema.is_categorical:
        substitutes = [v for v in slot_schema.possible_values if v not in true_values]
    else:
        eligible = sorted(set(value_pool) - true_values)
        if eligible:
            rng = random.Random(_stable_seed(seed, slot_schema.name, *action.values))
            substitutes = rng.sample(eligible, min(max_negatives, len(eligible)))
        else:
            substitutes = []
    if not substitutes:
        logger.warning(
            "no substitutable value for slot %r (values %r); no negatives built",
            slot_schema.name,
            sorted(true_values),
        )
        return []

    negatives = []
    emitted = set()
    for substitute in substitutes:
        tampered = replace(action, values=(substitute,))
        for candidate in build_candidates(tampered, slot_schema):
            if candidate.text not in emitted:
                emitted.add(candidate.text)
                negatives.append(NegativeReference(candidate.text, substitute))
    return negatives


def build_instance_references(
    instance: EvalInstance,
    catalog: dict[str, ServiceSchema],
    value_pools: dict[tuple[str, str], tuple[str, ...]] | None = None,
    *,
    max_negatives: int = 3,
    seed: int = 0,
) -> list[ActionReferences]:
    """Build candidates and negatives for every action of an instance."""
    if instance.service not in catalog:
        raise PipelineError(f"service {instance.service!r} missing from catalog")
    service = catalog[instance.service]
    references = []
    for index, action in enumerate(instance.actions):
        slot_schema = (
            service.find_slot(action.slot, instance_id=instance.instance_id)
            if action.slot is not None
            else None
        )
        candidates = tuple(build_candidates(action, slot_schema))
        negatives: tuple[NegativeReference, ...] = ()
        if slot_schema is not None and action.values and action.intent not in SPECIAL_INTENTS:
            pool = (value_pools or {}).get((instance.service, action.slot), ())
            negatives = tuple(
                build_negatives(
                    action,
                    slot_schema,
                    pool,
                    max_negatives=max_negatives,
                    seed=seed,
                )
            )
        references.append(
            ActionReferences(
                action_index=index,
                candidates=candidates,
                negatives=negatives,
                slot_description=slot_schema.description if slot_schema else None,
            )
        )
    return references
