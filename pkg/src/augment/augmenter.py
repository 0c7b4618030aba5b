"""Training-set augmentation through the paraphrase gateway."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from tqdm import tqdm

from src.augment.planner import DEBT_NAMES, AugmentationPlan, PlanScope
from src.augment.prompt import build_prompt
from src.corpus.io import write_jsonl
from src.corpus.schema import ArtifactSource, BinaryLabel, LabeledInstance, SplitBundle, parse_label
from src.errors import AuthError, EmptyParaphrase, GatewayError, GatewayExhausted, LeakageError, MalformedRow
from src.gateway.base import GatewayKind, dialogue_fingerprint, filter_paraphrases

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentedInstance(LabeledInstance):
    """A generated paraphrase with its provenance."""

    origin_id: str
    variant_index: int
    generator: GatewayKind
    prompt_fingerprint: str

    def to_record(self) -> Dict[str, object]:
        record = super().to_record()
        record.update({
            'origin_id': self.origin_id,
            'variant_index': self.variant_index,
            'generator': self.generator.value,
            'prompt_fingerprint': self.prompt_fingerprint,
        })
        return record


@dataclass
class AugmentationResult:
    """Augmented training set plus the shortfall report."""

    instances: List[LabeledInstance]
    augmented: List[AugmentedInstance]
    requested: Dict[str, int] = field(default_factory=dict)
    generated: Dict[str, int] = field(default_factory=dict)

    @property
    def shortfalls(self) -> Dict[str, int]:
        return {
            label: self.requested[label] - self.generated.get(label, 0)
            for label in self.requested
            if self.requested[label] > self.generated.get(label, 0)
        }


def plan_key(label, scope: PlanScope) -> str:
    """Map an instance label to the class name used by the plan."""
    if scope == PlanScope.BINARY and (label.value in DEBT_NAMES or label == BinaryLabel.SATD):
        return BinaryLabel.SATD.value
    return label.value


def _paraphrase_instance(inst: LabeledInstance, n: int, gateway, max_retries: int) -> Tuple[List[str], str]:
    """Collect up to n distinct paraphrases, asking again for the missing ones.

    Raises:
        AuthError: propagated, credentials will not start working on retry
        GatewayExhausted: no paraphrase at all after max_retries requests
    """
    collected: List[str] = []
    fingerprint = dialogue_fingerprint(build_prompt(inst, n))
    last_error: Optional[Exception] = None

    for attempt in range(max_retries):
        missing = n - len(collected)
        if missing <= 0:
            break
        dialogue = build_prompt(inst, missing)
        try:
            result = gateway.generate(dialogue, missing)
        except AuthError:
            raise
        except GatewayError as e:
            logger.warning(f"Generation for {inst.id} failed (attempt {attempt + 1}/{max_retries}): {e}")
            last_error = e
            continue

        fresh = filter_paraphrases(result.paraphrases, inst.text)
        fresh = [p for p in fresh if p.lower() not in {c.lower() for c in collected}]
        if not fresh:
            last_error = EmptyParaphrase(f"Blank or verbatim generation for {inst.id}")
            logger.warning(f"{last_error}, retrying")
            continue
        collected.extend(fresh[:missing])

    if not collected:
        raise GatewayExhausted(f"No paraphrase for {inst.id} after {max_retries} attempts: {last_error}")
    return collected, fingerprint


def augment_training_set(
    train: Sequence[LabeledInstance],
    plan: AugmentationPlan,
    gateway,
    max_in_flight: int = 4,
    max_retries: int = 3,
    forbidden_ids: Optional[Set[str]] = None,
) -> AugmentationResult:
    """Append n_i paraphrases for every training instance of a minority class.

    Args:
        train: Training split (never modified)
        plan: Multipliers computed from the training split's distribution
        gateway: MockGateway or RemoteGateway
        max_in_flight: Concurrent generation requests
        max_retries: Requests per instance before its shortfall is recorded
        forbidden_ids: Validation/test ids; any overlap with train aborts

    Returns:
        AugmentationResult with originals first, then paraphrases ordered by
        (origin_id, variant_index)

    Raises:
        LeakageError: train contains a forbidden id
        AuthError: gateway credentials rejected
    """
    if forbidden_ids:
        leaked = sorted({inst.id for inst in train} & set(forbidden_ids))
        if leaked:
            raise LeakageError(f"Augmentation input contains validation/test ids: {leaked[:5]}")

    tasks = []
    requested: Dict[str, int] = {}
    for inst in train:
        key = plan_key(inst.label, plan.scope)
        n = plan.multiplier(key)
        if n > 0:
            tasks.append((inst, n))
            requested[key] = requested.get(key, 0) + n

    if not tasks:
        logger.info("Plan requests no paraphrases, training set unchanged")
        return AugmentationResult(instances=list(train), augmented=[])

    generator = GatewayKind(gateway.kind)
    augmented: List[AugmentedInstance] = []
    generated: Dict[str, int] = {}

    def run(task):
        inst, n = task
        try:
            return inst, _paraphrase_instance(inst, n, gateway, max_retries)
        except GatewayExhausted as e:
            logger.warning(str(e))
            return inst, ([], '')

    logger.info(f"Requesting paraphrases for {len(tasks)} instances ({sum(requested.values())} total)")
    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        results = list(tqdm(pool.map(run, tasks), total=len(tasks), desc='augment', disable=None))

    for inst, (paraphrases, fingerprint) in results:
        key = plan_key(inst.label, plan.scope)
        generated[key] = generated.get(key, 0) + len(paraphrases)
        for variant_index, text in enumerate(paraphrases, start=1):
            augmented.append(AugmentedInstance(
                id=f"{inst.id}-aug{variant_index}",
                source=inst.source,
                project=inst.project,
                text=text,
                label=inst.label,
                origin_id=inst.id,
                variant_index=variant_index,
                generator=generator,
                prompt_fingerprint=fingerprint,
            ))

    augmented.sort(key=lambda a: (a.origin_id, a.variant_index))
    result = AugmentationResult(
        instances=[*train, *augmented],
        augmented=augmented,
        requested=requested,
        generated=generated,
    )
    if result.shortfalls:
        logger.warning(f"Paraphrase shortfall per class: {result.shortfalls}")
    return result


def check_leakage(augmented: Iterable[AugmentedInstance], bundle: SplitBundle) -> None:
    """Abort unless every paraphrase derives from a training instance.

    Raises:
        LeakageError
    """
    train_ids = bundle.ids('train')
    held_out_ids = bundle.ids('validation') | bundle.ids('test')
    held_out_texts = {inst.text.strip().lower() for inst in [*bundle.validation, *bundle.test]}
    for inst in augmented:
        if inst.origin_id in held_out_ids:
            raise LeakageError(f"Paraphrase {inst.id} derives from held-out instance {inst.origin_id}")
        if inst.origin_id not in train_ids:
            raise LeakageError(f"Paraphrase {inst.id} has origin {inst.origin_id} outside the training split")
        if inst.text.strip().lower() in held_out_texts:
            raise LeakageError(f"Paraphrase {inst.id} duplicates a held-out text")


def write_augmented(augmented: Sequence[AugmentedInstance], path: Union[str, Path]) -> Path:
    return write_jsonl([inst.to_record() for inst in augmented], path)


def load_augmented(path: Union[str, Path]) -> List[AugmentedInstance]:
    """Read augmented.jsonl back into instances."""
    augmented = []
    with open(path, 'r', encoding='utf-8') as f:
        for row_index, line in enumerate(f):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                augmented.append(AugmentedInstance(
                    id=record['id'],
                    source=ArtifactSource(record['source']),
                    project=record.get('project', ''),
                    text=record['text'],
                    label=parse_label(record['label']),
                    origin_id=record['origin_id'],
                    variant_index=int(record['variant_index']),
                    generator=GatewayKind(record['generator']),
                    prompt_fingerprint=record['prompt_fingerprint'],
                ))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise MalformedRow(row_index, str(e)) from e
    return augmented
