"""HTTP sidecar exposing span prediction, embeddings, NER and entailment."""

from .app import create_app, create_stub_app
from .config import ServiceConfig, from_env, stub_config
from .registry import ModelRegistry

__version__ = "0.1.0"

__all__ = [
    "ModelRegistry",
    "ServiceConfig",
    "create_app",
    "create_stub_app",
    "from_env",
    "stub_config",
]
