"""Shared fixtures: synthetic corpora, an offline tiny encoder, run configs."""

import os
import random

import pytest
import torch
import yaml

from src.config import load_config
from src.corpus.schema import ArtifactSource, LabeledInstance, SatdLabel

# Filler vocabulary; none of these are stop words, lemma keys or shorter than 3 letters
FILLER = [
    'parser', 'widget', 'cache', 'socket', 'buffer', 'router', 'render', 'schema',
    'token', 'bucket', 'cursor', 'driver', 'engine', 'filter', 'gadget', 'kernel',
    'ledger', 'market', 'needle', 'portal', 'quartz', 'ribbon', 'signal', 'tensor',
    'vector', 'wallet', 'yellow', 'zipper', 'anchor', 'beacon', 'canvas', 'dagger',
    'falcon', 'garden', 'harbor', 'island', 'jacket', 'lantern', 'meadow', 'nectar',
]

TEMPLATES = {
    SatdLabel.CODE_DESIGN: 'TODO: refactor this {a} {b}, ugly hack',
    SatdLabel.DOCUMENTATION: 'FIXME update the javadoc for {a} {b}',
    SatdLabel.TEST: 'todo add unit test coverage for {a} {b}',
    SatdLabel.REQUIREMENT: 'TODO implement {a} support in {b}',
    SatdLabel.NOT_SATD: 'Returns the {a} value of the given {b}.',
}

NETWORK = os.getenv('SATD_RUN_NETWORK_TESTS') == '1'
requires_network = pytest.mark.skipif(not NETWORK, reason='set SATD_RUN_NETWORK_TESTS=1 to download models')


def make_instance(id, label, text='todo fix this', source=ArtifactSource.CODE_COMMENT, project='demo'):
    return LabeledInstance(id=id, source=source, project=project, text=text, label=label)


def synthetic_corpus(counts, source=ArtifactSource.CODE_COMMENT, prefix='cc'):
    """Distinct keyword-separable texts, `counts[label]` per class."""
    dataset = []
    for label, n in counts.items():
        for i in range(n):
            # (a, b) pairs stay unique for i < len(FILLER) ** 2 and no filler dominates a class
            a = FILLER[i % len(FILLER)]
            b = FILLER[(i // len(FILLER) + 7 * i) % len(FILLER)]
            text = TEMPLATES[label].format(a=a, b=b)
            dataset.append(make_instance(f"{prefix}-{label.value.lower()}-{i}", label, text, source))
    # interleave classes so file order is not grouped by label
    random.Random(0).shuffle(dataset)
    return dataset


@pytest.fixture
def small_corpus():
    return synthetic_corpus({
        SatdLabel.NOT_SATD: 40,
        SatdLabel.CODE_DESIGN: 20,
        SatdLabel.DOCUMENTATION: 10,
        SatdLabel.TEST: 10,
        SatdLabel.REQUIREMENT: 5,
    })


@pytest.fixture
def pipeline_corpus():
    return synthetic_corpus({
        SatdLabel.NOT_SATD: 300,
        SatdLabel.CODE_DESIGN: 120,
        SatdLabel.DOCUMENTATION: 30,
        SatdLabel.TEST: 30,
        SatdLabel.REQUIREMENT: 20,
    })


@pytest.fixture(scope='session')
def tiny_encoder_dir(tmp_path_factory):
    """A two-layer BERT with a whitespace-word vocabulary, saved locally."""
    from transformers import BertConfig, BertModel, BertTokenizer

    directory = tmp_path_factory.mktemp('tiny-bert')
    words = sorted({w.lower() for template in TEMPLATES.values() for w in template.replace(',', ' ').split()
                    if w.isalpha()} | set(FILLER) | {'todo', 'fixme', 'hack', 'refactor', 'unit', 'test',
                                                     'javadoc', 'implement', 'support', 'coverage', 'update',
                                                     'ugly', 'returns', 'value', 'given', 'add'})
    vocab_file = directory / 'vocab.txt'
    vocab_file.write_text('\n'.join(['[PAD]', '[UNK]', '[CLS]', '[SEP]', '[MASK]', *words]) + '\n')

    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=5 + len(words),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        hidden_dropout_prob=0.0,
        attention_probs_dropout_prob=0.0,
    )
    BertModel(config).save_pretrained(directory)
    BertTokenizer(vocab_file=str(vocab_file), do_lower_case=True).save_pretrained(directory)
    return str(directory)


@pytest.fixture
def run_config(tmp_path, tiny_encoder_dir):
    """Effective config for fast offline runs, written to tmp_path/config.yaml."""
    config = load_config(None)
    config['logging'] = {'level': 'WARNING', 'file': None, 'console': False}
    config['identifier'].update({
        'layer_widths': [16, 8, 16, 16],
        'embedding_dim': 16,
        'max_length': 16,
        'max_epochs': 3,
        'patience': 2,
    })
    config['categorizer'].update({
        'encoder': tiny_encoder_dir,
        'max_epochs': 2,
        'batch_size': 16,
        'max_length': 32,
    })
    config['keywords']['embedder'] = 'hashing'
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(config))
    return path
