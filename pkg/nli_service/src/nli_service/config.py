"""Service configuration."""

from dataclasses import dataclass

DEFAULT_CHECKPOINT = "roberta-large-mnli"


@dataclass
class ServiceConfig:
    checkpoint: str = DEFAULT_CHECKPOINT
    host: str = "127.0.0.1"
    port: int = 8090
    max_batch_size: int = 64
    device: str = "cpu"

    def __post_init__(self):
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
