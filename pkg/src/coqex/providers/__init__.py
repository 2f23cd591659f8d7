"""Pluggable providers for the learned pipeline capabilities."""

from .base import (
    AnswerSpan,
    Mention,
    PassageLike,
    Provider,
    ProviderConfig,
    ProviderError,
    ProviderMode,
    SpanMode,
    clamp,
)
from .offline import OfflineProvider
from .remote import RemoteProvider
from .wrappers import CachedProvider, DegradingProvider

__all__ = [
    "AnswerSpan",
    "CachedProvider",
    "DegradingProvider",
    "Mention",
    "OfflineProvider",
    "PassageLike",
    "Provider",
    "ProviderConfig",
    "ProviderError",
    "ProviderMode",
    "RemoteProvider",
    "SpanMode",
    "clamp",
]
