"""Model registry: which model backs each capability, and health reporting."""

from __future__ import annotations

from .backends import CapabilityUnavailable, make_backend
from .config import CAPABILITIES, ServiceConfig


class ModelRegistry:
    """One backend instance per process; models loaded once, shared read-only."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.backend = make_backend(config)

    def require(self, capability: str):
        """The backend, provided the capability's model is loadable."""
        if not self.backend.available(capability):
            raise CapabilityUnavailable(
                capability, self.backend.load_error(capability) or "not loaded"
            )
        return self.backend

    def health(self) -> dict:
        models = {}
        for cap in CAPABILITIES:
            pin = self.config.models.get(cap)
            loaded = self.backend.available(cap)
            entry = {
                "id": pin.model_id if pin else f"{self.backend.name}/{cap}",
                "revision": pin.revision if pin else "",
                "loaded": loaded,
            }
            error = self.backend.load_error(cap)
            if error:
                entry["error"] = error
            models[cap] = entry
        return {
            "status": "ok",
            "backend": self.backend.name,
            "device": self.config.device,
            "models": models,
            "limits": {
                "max_batch": self.config.max_batch,
                "max_text_length": self.config.max_text_length,
            },
        }
