"""Command-line entry point: python -m src.cli.main <subcommand> [options]."""

import argparse
import copy
import logging
import sys
from typing import Dict, List, Optional

from src.cli.manifest import RunManifest
from src.cli.stages import Pipeline
from src.config import derive_seed, load_config
from src.corpus.schema import SOURCE_CODES, ArtifactSource
from src.db.client import AuditStore
from src.errors import ConfigError, SatdError
from src.logging_setup import setup_logging

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    'ingest',
    'split',
    'augment',
    'train-identify',
    'train-categorize',
    'evaluate',
    'keywords',
    'pipeline',
    'ablation',
    'tables',
)
SEED_STAGES = ('split', 'mock', 'identifier', 'categorizer', 'embeddings')
NEEDS_DATASET = ('ingest', 'pipeline', 'ablation')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default='config.yaml', help='Path to config file')
    common.add_argument('--seed', type=int, default=None, help='Master seed (default: from config)')
    common.add_argument('--client', choices=['mock', 'remote'], default=None,
                        help='Paraphrase backend (default: from config)')
    common.add_argument('--artifact', choices=sorted(SOURCE_CODES.values()), default=None,
                        help='Restrict to one artifact source')
    common.add_argument('--out', type=str, default='runs/default', help='Output directory')
    common.add_argument('--dataset', type=str, default=None,
                        help='Dataset file (ingest, pipeline, ablation; optional for tables)')

    parser = argparse.ArgumentParser(
        description='SATD identification and categorization with paraphrase augmentation'
    )
    subparsers = parser.add_subparsers(dest='command', metavar='{' + ','.join(SUBCOMMANDS) + '}')
    subparsers.required = True
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def effective_config(args: argparse.Namespace) -> Dict:
    """Config file merged over defaults, then CLI flags on top."""
    config = copy.deepcopy(load_config(args.config))
    if args.seed is not None:
        config['seed'] = args.seed
    if args.client is not None:
        config['gateway']['kind'] = args.client.upper()
    if args.artifact is not None:
        config['corpus']['artifact'] = args.artifact
    return config


def stage_seeds(master: int) -> Dict[str, int]:
    seeds = {'master': master}
    seeds.update({stage: derive_seed(master, stage) for stage in SEED_STAGES})
    return seeds


def run_subcommand(name: str, args: argparse.Namespace, config: Dict, encoder=None, tokenizer=None) -> int:
    """Execute one subcommand; returns the process exit status."""
    seeds = stage_seeds(int(config['seed']))
    audit = None
    if config['audit'].get('enabled'):
        audit = AuditStore(config['audit']['db_path'], redact_text=config['audit'].get('redact_text', True))

    try:
        manifest = RunManifest(args.out, config, seeds, audit=audit)
        manifest.register_run()
        artifact = ArtifactSource.from_code(args.artifact) if args.artifact else None
        pipeline = Pipeline(config, args.out, seeds, manifest, artifact=artifact, audit=audit)

        if name in NEEDS_DATASET and not args.dataset:
            raise ConfigError(f"{name} requires --dataset")

        if name == 'ingest':
            pipeline.ingest(args.dataset)
        elif name == 'split':
            pipeline.split()
        elif name == 'augment':
            pipeline.augment()
        elif name == 'train-identify':
            pipeline.train_identify()
        elif name == 'train-categorize':
            pipeline.train_categorize(encoder=encoder, tokenizer=tokenizer)
        elif name == 'evaluate':
            pipeline.evaluate()
        elif name == 'keywords':
            pipeline.keywords()
        elif name == 'ablation':
            pipeline.ablation(args.dataset, encoder=encoder, tokenizer=tokenizer)
        elif name == 'tables':
            print(pipeline.tables(args.dataset))
        else:
            pipeline.run_all(args.dataset, encoder=encoder, tokenizer=tokenizer)
    except SatdError as e:
        logger.error(f"{name} failed: {e}")
        return 1

    logger.info(f"{name} finished, outputs in {args.out}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = effective_config(args)
    except ConfigError as e:
        logging.basicConfig(level=logging.ERROR)
        logger.error(str(e))
        return 1

    setup_logging(config)
    return run_subcommand(args.command, args, config)


if __name__ == "__main__":
    sys.exit(main())
