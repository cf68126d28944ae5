"""Inference sidecar: a pretrained NLI checkpoint behind /v1/classify."""

from .app import create_app
from .config import ServiceConfig
from .model import PROTOCOL_LABELS, NliModel, TransformersNliModel, resolve_label_order

__version__ = "0.1.0"

__all__ = [
    "PROTOCOL_LABELS",
    "NliModel",
    "ServiceConfig",
    "TransformersNliModel",
    "create_app",
    "resolve_label_order",
]
