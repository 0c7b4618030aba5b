#!/usr/bin/env python3
"""Quick check that the paraphrase backends still answer.

Sends one dialogue per artifact source to the mock and, when
SATD_LLM_API_KEY is set, to the configured chat-completion endpoint.
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import logging

from src.augment.prompt import build_prompt
from src.config import load_config
from src.corpus.schema import ArtifactSource, LabeledInstance, SatdLabel
from src.errors import GatewayError, InvalidConfig
from src.gateway import API_KEY_ENV, GatewayConfig, GatewayKind, build_gateway

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

SAMPLES = {
    ArtifactSource.CODE_COMMENT: "TODO: this is a hack, clean up the parser before release",
    ArtifactSource.ISSUE_SECTION: "We still need unit tests for the retry logic",
    ArtifactSource.PULL_SECTION: "Docs for the new config flag are missing",
    ArtifactSource.COMMIT_MESSAGE: "Temporary workaround until the upstream fix lands",
}


def print_section(title):
    """Print a formatted section header."""
    print("\n" + "=" * 70)
    print(f"  {title}")
    print("=" * 70)


def print_result(label, value, indent=2):
    """Print a formatted result line."""
    spaces = " " * indent
    print(f"{spaces}{label}: {value}")


def check_backend(gateway, n=3):
    """Request n paraphrases per sample; returns number of failed samples."""
    failures = 0
    for source, text in SAMPLES.items():
        instance = LabeledInstance(f"check-{source.code}", source, 'check', text, SatdLabel.CODE_DESIGN)
        print(f"\n  {source.code}: {text}")
        print("  " + "-" * 66)
        try:
            result = gateway.generate(build_prompt(instance, n), n)
        except GatewayError as e:
            print_result("✗ Status", f"FAILED ({type(e).__name__}: {e})")
            failures += 1
            continue
        print_result("✓ Status", "SUCCESS")
        print_result("  Attempts", result.attempts)
        print_result("  Latency", f"{result.latency_ms} ms")
        for i, paraphrase in enumerate(result.paraphrases, start=1):
            print_result(f"  {i}", paraphrase)
        if len(result.paraphrases) < n:
            print_result("  Shortfall", n - len(result.paraphrases))
    return failures


def main():
    config = load_config('config.yaml')
    failures = 0

    print_section("Mock gateway")
    failures += check_backend(build_gateway(GatewayConfig(kind=GatewayKind.MOCK, mock_seed=config['seed'])))

    print_section("Remote gateway")
    if not os.getenv(API_KEY_ENV):
        print_result("Skipped", f"{API_KEY_ENV} not set")
    else:
        section = dict(config['gateway'], kind='REMOTE')
        try:
            gateway = build_gateway(GatewayConfig.from_config(section), max_in_flight=1)
        except InvalidConfig as e:
            print_result("✗ Config", str(e))
            return 1
        print_result("Endpoint", section['endpoint'])
        print_result("Model", section['model'])
        print_result("Rate limit", f"{section['requests_per_minute']} requests/minute")
        failures += check_backend(gateway)

    print_section("Summary")
    print_result("Failed samples", failures)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
