"""Service configuration, read from environment variables.

Model identifiers and revisions are configuration, not code: deployments
pin exact revisions here. The default backend is the deterministic stub so
the service runs (and is testable) without any model weights on disk.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

ENV_PREFIX = "COQEX_SERVICE_"

CAPABILITIES = ("span", "embed", "ner", "nli")

_DEFAULT_MODELS = {
    "span": "mrm8488/spanbert-finetuned-squadv1",
    "embed": "sentence-transformers/all-MiniLM-L6-v2",
    "ner": "dslim/bert-base-NER",
    "nli": "roberta-large-mnli",
}


@dataclass(frozen=True)
class ModelPin:
    model_id: str
    revision: str


@dataclass(frozen=True)
class ServiceConfig:
    backend: str = "stub"  # "stub" | "transformers"
    device: str = "cpu"
    models: dict[str, ModelPin] = field(default_factory=dict)
    max_batch: int = 64
    max_text_length: int = 20_000
    host: str = "127.0.0.1"
    port: int = 8900

    def __post_init__(self):
        if self.backend not in ("stub", "transformers"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.max_batch < 1 or self.max_text_length < 1:
            raise ValueError("batch and text-length caps must be positive")


def _env(name: str, default: str) -> str:
    return os.environ.get(ENV_PREFIX + name, default)


def from_env() -> ServiceConfig:
    models = {}
    for cap in CAPABILITIES:
        models[cap] = ModelPin(
            model_id=_env(f"{cap.upper()}_MODEL", _DEFAULT_MODELS[cap]),
            revision=_env(f"{cap.upper()}_REVISION", "main"),
        )
    return ServiceConfig(
        backend=_env("BACKEND", "stub"),
        device=_env("DEVICE", "cpu"),
        models=models,
        max_batch=int(_env("MAX_BATCH", "64")),
        max_text_length=int(_env("MAX_TEXT_LEN", "20000")),
        host=_env("HOST", "127.0.0.1"),
        port=int(_env("PORT", "8900")),
    )


def stub_config() -> ServiceConfig:
    return ServiceConfig(
        backend="stub",
        models={cap: ModelPin(f"stub/{cap}-v1", "1") for cap in CAPABILITIES},
    )
