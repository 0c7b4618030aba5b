"""Gateway configuration, results and reply parsing shared by both backends."""

import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from src.errors import InvalidConfig, ParseError

logger = logging.getLogger(__name__)

API_KEY_ENV = 'SATD_LLM_API_KEY'

Message = Dict[str, str]

ENUMERATED_LINE = re.compile(r'^\s*(\d+)\s*[.):-]\s*(.+?)\s*$')
BULLET_PREFIX = re.compile(r'^\s*[-*•]\s*')


class GatewayKind(str, Enum):
    REMOTE = 'REMOTE'
    MOCK = 'MOCK'


@dataclass(frozen=True)
class GatewayConfig:
    """Connection and retry settings for paraphrase generation."""

    kind: GatewayKind = GatewayKind.MOCK
    endpoint: Optional[str] = None
    model: Optional[str] = None
    api_key: Optional[str] = field(default=None, repr=False)
    max_retries: int = 3
    backoff_base_ms: int = 1000
    requests_per_minute: int = 60
    timeout_seconds: float = 30.0
    mock_seed: Optional[int] = None
    temperature: Optional[float] = None
    top_p: Optional[float] = None
    max_tokens: Optional[int] = None

    def __post_init__(self):
        if self.kind == GatewayKind.REMOTE:
            if not self.endpoint:
                raise InvalidConfig("REMOTE gateway requires an endpoint")
            if not self.api_key:
                raise InvalidConfig(f"REMOTE gateway requires {API_KEY_ENV} to be set")
        elif self.mock_seed is None:
            raise InvalidConfig("MOCK gateway requires a seed")
        if self.max_retries < 1:
            raise InvalidConfig("max_retries must be >= 1")
        if self.requests_per_minute < 1:
            raise InvalidConfig("requests_per_minute must be >= 1")

    @classmethod
    def from_config(cls, section: Dict[str, Any], mock_seed: Optional[int] = None) -> 'GatewayConfig':
        """Build from the `gateway` config section; the key only ever comes from the environment."""
        kind = GatewayKind(str(section.get('kind', 'MOCK')).upper())
        return cls(
            kind=kind,
            endpoint=section.get('endpoint'),
            model=section.get('model'),
            api_key=os.getenv(API_KEY_ENV) if kind == GatewayKind.REMOTE else None,
            max_retries=section.get('max_retries', 3),
            backoff_base_ms=section.get('backoff_base_ms', 1000),
            requests_per_minute=section.get('requests_per_minute', 60),
            timeout_seconds=section.get('timeout_seconds', 30.0),
            mock_seed=mock_seed,
            temperature=section.get('temperature'),
            top_p=section.get('top_p'),
            max_tokens=section.get('max_tokens'),
        )

    def sampling_params(self) -> Dict[str, Any]:
        """Sampling parameters that were explicitly set."""
        params = {'temperature': self.temperature, 'top_p': self.top_p, 'max_tokens': self.max_tokens}
        return {k: v for k, v in params.items() if v is not None}

    def to_manifest(self) -> Dict[str, Any]:
        """Snapshot for the run manifest (no credentials)."""
        return {
            'kind': self.kind.value,
            'endpoint': self.endpoint if self.kind == GatewayKind.REMOTE else None,
            'model': self.model if self.kind == GatewayKind.REMOTE else None,
            'max_retries': self.max_retries,
            'backoff_base_ms': self.backoff_base_ms,
            'requests_per_minute': self.requests_per_minute,
            'mock_seed': self.mock_seed,
            'sampling': self.sampling_params(),
        }


@dataclass(frozen=True)
class GenerationResult:
    """Paraphrases returned for one dialogue."""

    paraphrases: List[str]
    raw_response: str
    latency_ms: int
    attempts: int


def dialogue_fingerprint(dialogue: Sequence[Message]) -> str:
    """Stable hash of a dialogue."""
    payload = json.dumps(list(dialogue), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def original_text(dialogue: Sequence[Message]) -> str:
    """The instance text is the content of the last user turn."""
    for message in reversed(dialogue):
        if message.get('role') == 'user':
            return message.get('content', '')
    return ''


def parse_enumerated(reply: str, n: int) -> List[str]:
    """Parse an enumerated reply ("1. a\\n2. b") into at most n lines.

    Falls back to one paraphrase per non-empty line when no enumeration is
    present.

    Raises:
        ParseError: no usable line in the reply
    """
    lines = [line for line in (reply or '').splitlines() if line.strip()]
    enumerated = [m.group(2) for m in (ENUMERATED_LINE.match(line) for line in lines) if m]
    if enumerated:
        candidates = enumerated
    else:
        if lines:
            logger.debug("Reply has no enumeration, splitting on newlines")
        candidates = [BULLET_PREFIX.sub('', line) for line in lines]

    cleaned = [c.strip().strip('"').strip() for c in candidates]
    cleaned = [c for c in cleaned if c]
    if not cleaned:
        raise ParseError("Reply had no usable lines")
    return cleaned[:n]


def filter_paraphrases(paraphrases: Sequence[str], original: str) -> List[str]:
    """Drop blanks, verbatim copies of the original (case-insensitive) and repeats."""
    seen = {original.strip().lower()}
    kept = []
    for text in paraphrases:
        key = text.strip().lower()
        if not key or key in seen:
            continue
        seen.add(key)
        kept.append(text.strip())
    return kept
