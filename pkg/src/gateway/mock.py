"""Deterministic offline paraphrase generator."""

import hashlib
import logging
import random
import re
import threading
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from src.gateway.base import (
    GatewayConfig,
    GatewayKind,
    GenerationResult,
    Message,
    dialogue_fingerprint,
    original_text,
)

logger = logging.getLogger(__name__)

SYNONYMS_PATH = Path(__file__).parent / 'resources' / 'synonyms.txt'
WORD = re.compile(r"[A-Za-z][A-Za-z'-]*")
CLAUSE_SPLIT = re.compile(r'\s*[,;]\s*')

FRAMES = (
    '{text}',
    'In short, {text}',
    '{text} (as noted)',
    'Note: {text}',
    'Basically, {text}',
    '{text}, for now',
)


@lru_cache(maxsize=None)
def load_synonyms(path: str = str(SYNONYMS_PATH)) -> Dict[str, Tuple[str, ...]]:
    table = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if not line.strip() or line.startswith('#'):
                continue
            word, replacements = line.rstrip('\n').split('\t')
            table[word.strip().lower()] = tuple(r.strip() for r in replacements.split(','))
    return table


def _match_case(source: str, replacement: str) -> str:
    if source[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


class MockGateway:
    """Rule-based rewriting (synonym substitution + clause reordering).

    Output is a pure function of (dialogue, n, seed).
    """

    kind = GatewayKind.MOCK

    def __init__(self, config: GatewayConfig, audit=None):
        self.config = config
        self.audit = audit
        self.request_count = 0
        self._count_lock = threading.Lock()
        self.synonyms = load_synonyms()

    def _rng(self, dialogue: Sequence[Message], n: int) -> random.Random:
        key = f"{self.config.mock_seed}:{n}:{dialogue_fingerprint(dialogue)}"
        digest = hashlib.sha256(key.encode('utf-8')).digest()
        return random.Random(int.from_bytes(digest[:8], 'big'))

    def _substitute(self, text: str, rng: random.Random) -> str:
        def replace(match):
            word = match.group(0)
            options = self.synonyms.get(word.lower())
            if not options or rng.random() < 0.4:
                return word
            return _match_case(word, rng.choice(options))
        return WORD.sub(replace, text)

    def _reorder(self, text: str, rng: random.Random) -> str:
        clauses = [c for c in CLAUSE_SPLIT.split(text) if c]
        if len(clauses) < 2 or rng.random() < 0.5:
            return text
        shift = rng.randrange(1, len(clauses))
        return ', '.join(clauses[shift:] + clauses[:shift])

    def _rewrite(self, text: str, rng: random.Random) -> str:
        rewritten = self._reorder(self._substitute(text, rng), rng)
        return rng.choice(FRAMES).format(text=rewritten)

    def generate(self, dialogue: Sequence[Message], n: int) -> GenerationResult:
        """Produce exactly n distinct paraphrases, none equal to the original."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if not dialogue:
            raise ValueError("dialogue must not be empty")
        with self._count_lock:
            self.request_count += 1

        original = original_text(dialogue).strip()
        rng = self._rng(dialogue, n)
        seen = {original.lower()}
        paraphrases: List[str] = []

        for _ in range(n * 20):
            if len(paraphrases) == n:
                break
            candidate = self._rewrite(original, rng).strip()
            if candidate and candidate.lower() not in seen:
                seen.add(candidate.lower())
                paraphrases.append(candidate)

        # short texts with no synonyms run out of rewrites
        revision = 1
        while len(paraphrases) < n:
            candidate = f"{original} (rev {revision})"
            revision += 1
            if candidate.lower() not in seen:
                seen.add(candidate.lower())
                paraphrases.append(candidate)

        raw = '\n'.join(f"{i}. {p}" for i, p in enumerate(paraphrases, start=1))
        if self.audit is not None:
            self.audit.log_generation(
                gateway=self.kind.value,
                model='mock',
                prompt_fingerprint=dialogue_fingerprint(dialogue),
                attempt=1,
                status_code=200,
                latency_ms=0,
                request_text=original,
                response_text=raw,
            )
        return GenerationResult(paraphrases=paraphrases, raw_response=raw, latency_ms=0, attempts=1)
