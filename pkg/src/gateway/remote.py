"""Chat-completion paraphrase client."""

import logging
import threading
import time
from typing import Any, Dict, Optional, Sequence

import requests
from dotenv import load_dotenv

from src.errors import (
    AuthError,
    GatewayExhausted,
    GenerationTimeout,
    ParseError,
    RateLimited,
)
from src.gateway.base import (
    GatewayConfig,
    GatewayKind,
    GenerationResult,
    Message,
    dialogue_fingerprint,
    filter_paraphrases,
    original_text,
    parse_enumerated,
)
from src.gateway.limiter import RateLimiter

logger = logging.getLogger(__name__)

# SATD_LLM_API_KEY may live in .env
load_dotenv()


class RemoteGateway:
    """Sends multi-turn dialogues to an OpenAI-style chat-completion endpoint."""

    kind = GatewayKind.REMOTE

    def __init__(self, config: GatewayConfig, audit=None, max_in_flight: int = 4):
        """Initialize remote gateway.

        Args:
            config: Gateway settings (endpoint, model, key, retry policy)
            audit: Optional AuditStore receiving every request/response pair
            max_in_flight: Token bucket burst, matches the augmenter's worker count
        """
        self.config = config
        self.audit = audit
        self.limiter = RateLimiter(config.requests_per_minute, burst=max_in_flight)
        self.request_count = 0
        self._count_lock = threading.Lock()

        self.headers = {
            'Authorization': f"Bearer {config.api_key}",
            'Content-Type': 'application/json',
        }

    def _payload(self, dialogue: Sequence[Message]) -> Dict[str, Any]:
        payload = {'model': self.config.model, 'messages': list(dialogue)}
        payload.update(self.config.sampling_params())
        return payload

    def _sleep_backoff(self, attempt: int):
        if attempt >= self.config.max_retries - 1:
            return
        sleep_time = (self.config.backoff_base_ms / 1000.0) * (2 ** attempt)
        time.sleep(sleep_time)

    def _log(self, fingerprint: str, attempt: int, status: Optional[int], latency_ms: Optional[int],
             request_text: str, response_text: Optional[str], error: Optional[str] = None):
        if self.audit is None:
            return
        self.audit.log_generation(
            gateway=self.kind.value,
            model=self.config.model,
            prompt_fingerprint=fingerprint,
            attempt=attempt,
            status_code=status,
            latency_ms=latency_ms,
            request_text=request_text,
            response_text=response_text,
            error_message=error,
        )

    def generate(self, dialogue: Sequence[Message], n: int) -> GenerationResult:
        """Request n paraphrases for the dialogue's instance text.

        Args:
            dialogue: Role-tagged messages, last user turn holds the text
            n: Number of paraphrases requested

        Returns:
            GenerationResult with at most n paraphrases

        Raises:
            AuthError: credentials rejected (not retried)
            RateLimited, GenerationTimeout, ParseError, GatewayExhausted: retries spent
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        if not dialogue:
            raise ValueError("dialogue must not be empty")

        original = original_text(dialogue)
        fingerprint = dialogue_fingerprint(dialogue)
        payload = self._payload(dialogue)
        request_text = original
        last_error: Exception = GatewayExhausted("No attempt made")

        for attempt in range(self.config.max_retries):
            self.limiter.acquire()
            with self._count_lock:
                self.request_count += 1
            try:
                start_time = time.time()
                response = requests.post(
                    self.config.endpoint,
                    headers=self.headers,
                    json=payload,
                    timeout=self.config.timeout_seconds,
                )
                latency_ms = int((time.time() - start_time) * 1000)
            except requests.exceptions.Timeout as e:
                logger.warning(f"Generation request timed out (attempt {attempt + 1}/{self.config.max_retries})")
                self._log(fingerprint, attempt + 1, None, None, request_text, None, 'timeout')
                last_error = GenerationTimeout(str(e))
                self._sleep_backoff(attempt)
                continue
            except requests.exceptions.RequestException as e:
                logger.error(f"Error calling chat-completion endpoint: {e}")
                self._log(fingerprint, attempt + 1, None, None, request_text, None, str(e))
                last_error = GatewayExhausted(str(e))
                self._sleep_backoff(attempt)
                continue

            if response.status_code in (401, 403):
                self._log(fingerprint, attempt + 1, response.status_code, latency_ms, request_text, None, 'auth')
                raise AuthError(f"Endpoint rejected credentials (HTTP {response.status_code})")

            if response.status_code == 429:
                logger.warning(f"Rate limited by endpoint (429), backing off (attempt {attempt + 1})")
                self._log(fingerprint, attempt + 1, 429, latency_ms, request_text, None, 'rate limited')
                last_error = RateLimited("HTTP 429 after all retries")
                self._sleep_backoff(attempt)
                continue

            if response.status_code != 200:
                logger.warning(f"Chat-completion endpoint returned status {response.status_code}")
                self._log(fingerprint, attempt + 1, response.status_code, latency_ms, request_text, None,
                          f"HTTP {response.status_code}")
                last_error = GatewayExhausted(f"HTTP {response.status_code}")
                self._sleep_backoff(attempt)
                continue

            try:
                data = response.json()
                reply = data['choices'][0]['message']['content'] or ''
            except (ValueError, KeyError, IndexError, TypeError) as e:
                self._log(fingerprint, attempt + 1, 200, latency_ms, request_text, response.text, 'bad body')
                last_error = ParseError(f"Unexpected response body: {e}")
                continue

            self._log(fingerprint, attempt + 1, 200, latency_ms, request_text, reply)
            try:
                paraphrases = filter_paraphrases(parse_enumerated(reply, n), original)
            except ParseError as e:
                logger.warning(f"Unparseable reply (attempt {attempt + 1}): {e}")
                last_error = e
                continue
            if not paraphrases:
                logger.warning("Reply only repeated the original text, retrying")
                last_error = ParseError("Reply only repeated the original text")
                continue

            return GenerationResult(
                paraphrases=paraphrases,
                raw_response=reply,
                latency_ms=latency_ms,
                attempts=attempt + 1,
            )

        raise last_error
