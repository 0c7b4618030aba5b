"""Paraphrase generation: remote chat-completion backend and offline mock."""

from typing import Sequence

from src.gateway.base import (
    API_KEY_ENV,
    GatewayConfig,
    GatewayKind,
    GenerationResult,
    Message,
    parse_enumerated,
)
from src.gateway.mock import MockGateway
from src.gateway.remote import RemoteGateway


def build_gateway(config: GatewayConfig, audit=None, max_in_flight: int = 4):
    """Instantiate the backend named by config.kind."""
    if config.kind == GatewayKind.REMOTE:
        return RemoteGateway(config, audit=audit, max_in_flight=max_in_flight)
    return MockGateway(config, audit=audit)


def generate(dialogue: Sequence[Message], n: int, config: GatewayConfig) -> GenerationResult:
    """One-shot generation with a fresh client."""
    return build_gateway(config).generate(dialogue, n)


__all__ = [
    'API_KEY_ENV',
    'GatewayConfig',
    'GatewayKind',
    'GenerationResult',
    'MockGateway',
    'RemoteGateway',
    'build_gateway',
    'generate',
    'parse_enumerated',
]
