"""Run configuration: config file plus flag overrides, flags win."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import DataError


@dataclass
class RunConfig:
    schemas: str = ""
    instances: str = ""
    generations: tuple[str, ...] = ()
    nli: str = "mock"
    unseen_domains: tuple[str, ...] = ()
    validation: bool = True
    augmentation: bool = True
    negatives_per_slot: int = 3
    seed: int = 0
    output_dir: str = "sgsacc-out"
    workers: int = 1
    ser_exact_case: bool = False
    schema_variants: tuple[str, ...] = ()

    def __post_init__(self):
        self.generations = tuple(self.generations)
        self.unseen_domains = tuple(self.unseen_domains)
        self.schema_variants = tuple(self.schema_variants)
        if self.negatives_per_slot < 0:
            raise DataError("negatives_per_slot must be >= 0")
        if self.workers < 1:
            raise DataError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        """Hash of the result-affecting configuration.

        Where reports go (output_dir) and how many workers compute them do
        not change report content, so they stay out of the hash; that keeps
        reports byte-identical across reruns that only relocate output.
        """
        relevant = {
            k: v for k, v in self.to_dict().items() if k not in ("output_dir", "workers")
        }
        canonical = json.dumps(relevant, sort_keys=True, ensure_ascii=True, default=list)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def report_meta(self, backend_name: str) -> dict:
        """Provenance block embedded in every report."""
        return {
            "config_hash": self.config_hash(),
            "seed": self.seed,
            "backend": backend_name,
        }


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional JSON file and flag overrides."""
    values: dict = {}
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {path}: invalid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise DataError(f"config file {path}: expected a JSON object")
        unknown = set(loaded) - _FIELD_NAMES
        if unknown:
            raise DataError(f"config file {path}: unknown keys {sorted(unknown)}")
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig(**values)
