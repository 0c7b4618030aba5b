"""Thread-safe token bucket shared by concurrent generation requests."""

import logging
import threading
import time

logger = logging.getLogger(__name__)


class RateLimiter:
    """Token bucket refilled at requests_per_minute / 60 tokens per second."""

    def __init__(self, requests_per_minute: int, burst: int = 1):
        """Initialize rate limiter.

        Args:
            requests_per_minute: Sustained request rate
            burst: Bucket capacity (1 = evenly spaced requests)
        """
        self.rate = requests_per_minute / 60.0
        self.capacity = max(1, burst)
        self.tokens = float(self.capacity)
        self.last_refill = time.monotonic()
        self._lock = threading.Lock()

    def _refill(self, now: float):
        elapsed = now - self.last_refill
        self.tokens = min(self.capacity, self.tokens + elapsed * self.rate)
        self.last_refill = now

    def acquire(self):
        """Block until a token is available, then take it."""
        while True:
            with self._lock:
                self._refill(time.monotonic())
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                sleep_time = (1.0 - self.tokens) / self.rate
            logger.debug(f"Rate limit reached, sleeping {sleep_time:.2f}s")
            time.sleep(sleep_time)
