"""Core domain types and file ingestion.

File formats (UTF-8 throughout):

* Schema catalog: JSON array of services, each
  ``{"service_name": ..., "slots": [{"name", "description", "is_categorical",
  "possible_values"}, ...]}``. This mirrors SGD ``schema.json`` files so the
  real dataset loads without transformation; unknown keys are ignored. A slot
  is treated as boolean when it is categorical and its possible values are a
  non-empty subset of {"True", "False"}; an explicit ``is_boolean`` key, when
  present, is honored.
* Instances: JSON array or JSON-lines, one record per system turn:
  ``{"instance_id", "service", "domain", "actions": [{"intent", "slot",
  "values"}, ...], "ground_truth", "previous_turn"}``.
* Generations: JSON array or JSON-lines of ``{"instance_id", "system_id",
  "text", "log_likelihood"}`` with ``log_likelihood`` optional.

Parsed catalogs and instance lists are immutable after loading and safe to
share across worker threads.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DataError,
    SchemaConflictError,
    SchemaError,
    SlotResolutionError,
)

logger = logging.getLogger(__name__)

# Intents allowed to appear without a slot (and without values).
SLOTLESS_INTENTS = frozenset({"GOODBYE", "REQ_MORE"})

_BOOLEAN_VALUES = frozenset({"True", "False"})


@dataclass(frozen=True)
class SlotSchema:
    """One slot of a service: name, description and value-domain flags."""

    name: str
    description: str
    is_categorical: bool
    is_boolean: bool
    possible_values: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise SchemaError("slot name must be non-empty")
        if self.is_boolean:
            if not self.is_categorical:
                raise SchemaError(f"slot {self.name!r}: boolean slots must be categorical")
            if not set(self.possible_values) <= _BOOLEAN_VALUES:
                raise SchemaError(
                    f"slot {self.name!r}: boolean slots allow only 'True'/'False' values"
                )


@dataclass(frozen=True)
class ServiceSchema:
    """A service with its slots, keyed by unique slot names."""

    service_name: str
    slots: tuple[SlotSchema, ...] = ()

    def __post_init__(self):
        names = [slot.name for slot in self.slots]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"service {self.service_name!r}: duplicate slot names {dupes}")

    def find_slot(self, name: str, instance_id: str | None = None) -> SlotSchema:
        for slot in self.slots:
            if slot.name == name:
                return slot
        raise SlotResolutionError(
            f"service {self.service_name!r} has no slot {name!r}",
            instance_id=instance_id,
            slot=name,
        )

    def has_slot(self, name: str) -> bool:
        return any(slot.name == name for slot in self.slots)


@dataclass(frozen=True)
class DialogueAction:
    """An (intent, slot, values) triplet a system turn must verbalize."""

    intent: str
    slot: str | None = None
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.intent:
            raise DataError("dialogue action intent must be non-empty")


@dataclass(frozen=True)
class EvalInstance:
    """One system turn: its actions, ground truth and dialogue context."""

    instance_id: str
    service: str
    domain: str
    actions: tuple[DialogueAction, ...]
    ground_truth: str
    previous_turn: str | None = None
    is_unseen_domain: bool = False

    def __post_init__(self):
        if not self.actions:
            raise DataError(f"instance {self.instance_id!r}: actions must be non-empty")
        if not self.ground_truth:
            raise DataError(f"instance {self.instance_id!r}: ground truth must be non-empty")


@dataclass(frozen=True)
class GenerationCandidate:
    """A model output for one instance, with its decoding likelihood if known."""

    instance_id: str
    system_id: str
    text: str
    log_likelihood: float | None = None


def _read_json_records(path: str | Path, what: str) -> list[dict]:
    """Read a JSON array or JSON-lines file into a list of dicts."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if not stripped:
        return []
    if stripped.startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{what} file {path}: invalid JSON: {exc}") from exc
        if not isinstance(records, list):
            raise DataError(f"{what} file {path}: expected a JSON array")
        return records
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DataError(f"{what} file {path}, line {lineno}: invalid JSON: {exc}") from exc
    return records


def _parse_slot(entry: dict, service_name: str) -> SlotSchema:
    try:
        name = entry["name"]
        description = entry.get("description", "")
        is_categorical = bool(entry.get("is_categorical", False))
        possible_values = tuple(str(v) for v in entry.get("possible_values", []))
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"service {service_name!r}: malformed slot entry {entry!r}") from exc
    if "is_boolean" in entry:
        is_boolean = bool(entry["is_boolean"])
    else:
        is_boolean = (
            is_categorical
            and bool(possible_values)
            and set(possible_values) <= _BOOLEAN_VALUES
        )
    return SlotSchema(
        name=name,
        description=description,
        is_categorical=is_categorical,
        is_boolean=is_boolean,
        possible_values=possible_values,
    )


def parse_schemas(path: str | Path) -> dict[str, ServiceSchema]:
    """Load a schema catalog file into a service-name -> schema mapping."""
    catalog: dict[str, ServiceSchema] = {}
    for entry in _read_json_records(path, "schema"):
        if not isinstance(entry, dict) or "service_name" not in entry:
            raise SchemaError(f"schema file {path}: entry without service_name: {entry!r}")
        service_name = entry["service_name"]
        if service_name in catalog:
            raise SchemaConflictError(f"schema file {path}: duplicate service {service_name!r}")
        slots = tuple(_parse_slot(slot, service_name) for slot in entry.get("slots", []))
        catalog[service_name] = ServiceSchema(service_name=service_name, slots=slots)
    return catalog


def _parse_action(record: dict, instance_id: str) -> DialogueAction:
    try:
        intent = str(record["intent"]).strip().upper()
    except (TypeError, KeyError) as exc:
        raise DataError(f"instance {instance_id!r}: action without intent: {record!r}") from exc
    slot = record.get("slot") or None
    raw_values = record.get("values") or []
    if not isinstance(raw_values, list):
        raise DataError(f"instance {instance_id!r}: action values must be a list")
    return DialogueAction(intent=intent, slot=slot, values=tuple(str(v) for v in raw_values))


def parse_instances(
    path: str | Path,
    catalog: dict[str, ServiceSchema],
    unseen_domains: list[str] | tuple[str, ...] = (),
) -> list[EvalInstance]:
    """Load evaluation instances, resolving every action against the catalog."""
    unseen = set(unseen_domains)
    instances = []
    seen_ids = set()
    for record in _read_json_records(path, "instance"):
        instance_id = record.get("instance_id")
        if not instance_id:
            raise DataError(f"instance file {path}: record without instance_id: {record!r}")
        if instance_id in seen_ids:
            raise DataError(f"instance file {path}: duplicate instance_id {instance_id!r}")
        seen_ids.add(instance_id)
        service_name = record.get("service")
        if service_name not in catalog:
            raise DataError(
                f"instance {instance_id!r} references unknown service {service_name!r}"
            )
        service = catalog[service_name]
        if not record.get("ground_truth"):
            raise DataError(f"instance {instance_id!r}: missing ground truth")
        actions = []
        for action_record in record.get("actions", []):
            action = _parse_action(action_record, instance_id)
            if action.intent in SLOTLESS_INTENTS and action.slot is None:
                actions.append(action)
                continue
            if action.slot is None:
                raise SlotResolutionError(
                    f"instance {instance_id!r}: intent {action.intent} requires a slot",
                    instance_id=instance_id,
                )
            service.find_slot(action.slot, instance_id=instance_id)
            actions.append(action)
        domain = record.get("domain", "")
        instances.append(
            EvalInstance(
                instance_id=instance_id,
                service=service_name,
                domain=domain,
                actions=tuple(actions),
                ground_truth=record["ground_truth"],
                previous_turn=record.get("previous_turn") or None,
                is_unseen_domain=domain in unseen,
            )
        )
    return instances


def parse_generations(
    path: str | Path,
    known_instance_ids: set[str] | None = None,
) -> list[GenerationCandidate]:
    """Load generation candidates.

    When ``known_instance_ids`` is given, candidates pointing at unknown
    instances are reported and skipped rather than failing the whole file.
    """
    candidates = []
    for record in _read_json_records(path, "generations"):
        try:
            instance_id = record["instance_id"]
            system_id = record["system_id"]
            text = record["text"]
        except (TypeError, KeyError) as exc:
            raise DataError(f"generations file {path}: malformed record {record!r}") from exc
        if known_instance_ids is not None and instance_id not in known_instance_ids:
            logger.warning(
                "generations file %s: candidate for unknown instance %r (system %r) skipped",
                path,
                instance_id,
                system_id,
            )
            continue
        log_likelihood = record.get("log_likelihood")
        candidates.append(
            GenerationCandidate(
                instance_id=instance_id,
                system_id=system_id,
                text=text,
                log_likelihood=None if log_likelihood is None else float(log_likelihood),
            )
        )
    return candidates


def index_generations(
    candidates: list[GenerationCandidate],
) -> dict[str, dict[str, GenerationCandidate]]:
    """Group candidates as system_id -> instance_id -> candidate.

    Raises DataError when one system contributes two candidates for the same
    instance; evaluation expects exactly one (ensembles go through rerank).
    """
    by_system: dict[str, dict[str, GenerationCandidate]] = {}
    for candidate in candidates:
        per_instance = by_system.setdefault(candidate.system_id, {})
        if candidate.instance_id in per_instance:
            raise DataError(
                f"system {candidate.system_id!r} has multiple candidates for "
                f"instance {candidate.instance_id!r}; rerank them first"
            )
        per_instance[candidate.instance_id] = candidate
    return by_system


def group_by_instance(
    candidates: list[GenerationCandidate],
) -> dict[str, list[GenerationCandidate]]:
    """Group candidates by instance, preserving input order within a group."""
    grouped: dict[str, list[GenerationCandidate]] = {}
    for candidate in candidates:
        grouped.setdefault(candidate.instance_id, []).append(candidate)
    return grouped


def build_value_pools(
    instances: list[EvalInstance],
    catalog: dict[str, ServiceSchema],
) -> dict[tuple[str, str], tuple[str, ...]]:
    """Collect every value observed for each non-categorical slot.

    Pools are keyed by (service, slot) and feed negative-reference sampling
    for slots without a closed value set.
    """
    observed: dict[tuple[str, str], set[str]] = {}
    for instance in instances:
        service = catalog[instance.service]
        for action in instance.actions:
            if action.slot is None or not action.values:
                continue
            if not service.has_slot(action.slot):
                continue
            if service.find_slot(action.slot).is_categorical:
                continue
            observed.setdefault((instance.service, action.slot), set()).update(action.values)
    return {key: tuple(sorted(values)) for key, values in sorted(observed.items())}


def action_to_record(action: DialogueAction) -> dict:
    return {"intent": action.intent, "slot": action.slot, "values": list(action.values)}


def instance_to_record(instance: EvalInstance) -> dict:
    return {
        "instance_id": instance.instance_id,
        "service": instance.service,
        "domain": instance.domain,
        "actions": [action_to_record(a) for a in instance.actions],
        "ground_truth": instance.ground_truth,
        "previous_turn": instance.previous_turn,
    }


def generation_to_record(candidate: GenerationCandidate, **extra) -> dict:
    record = {
        "instance_id": candidate.instance_id,
        "system_id": candidate.system_id,
        "text": candidate.text,
        "log_likelihood": candidate.log_likelihood,
    }
    record.update(extra)
    return record
