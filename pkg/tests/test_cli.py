"""Tests for the command-line entry point, pipeline stages and the run manifest."""

import json

import pytest

from src.cli.main import build_parser, effective_config, main, stage_seeds
from src.cli.manifest import COMPLETE, INCOMPLETE, RunManifest, config_run_id
from src.config import load_config
from src.corpus.io import load_dataset, write_dataset
from src.gateway.base import API_KEY_ENV
from src.metrics.report import load_reports


def run(command, run_config, out, *extra):
    return main([command, '--config', str(run_config), '--out', str(out), *extra])


def manifest_entries(out):
    with open(out / 'manifest.json') as f:
        return json.load(f)['entries']


@pytest.fixture
def dataset_file(tmp_path, pipeline_corpus):
    return write_dataset(pipeline_corpus, tmp_path / 'data.csv')


class TestParser:
    """Test cases for argument parsing and config resolution."""

    def test_unknown_subcommand(self):
        """Test that an unknown subcommand exits nonzero."""
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(['frobnicate'])
        assert excinfo.value.code != 0

    def test_no_key_flag(self):
        """Test that credentials cannot be passed on the command line."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(['augment', '--api-key', 'secret'])

    def test_overrides(self, run_config):
        """Test that flags win over the config file."""
        args = build_parser().parse_args(['split', '--config', str(run_config), '--seed', '7',
                                          '--client', 'remote', '--artifact', 'CM'])
        config = effective_config(args)

        assert config['seed'] == 7
        assert config['gateway']['kind'] == 'REMOTE'
        assert config['corpus']['artifact'] == 'CM'

    def test_stage_seeds(self):
        """Test distinct, reproducible sub-seeds."""
        seeds = stage_seeds(42)
        assert seeds == stage_seeds(42)
        assert seeds['master'] == 42
        assert len({seeds[s] for s in ('split', 'mock', 'identifier', 'categorizer', 'embeddings')}) == 5
        assert stage_seeds(43)['split'] != seeds['split']


class TestTables:
    """Test cases for the tables subcommand."""

    def test_commit_messages(self, run_config, tmp_path, capsys):
        """Test the commit-message row printed from the built-in counts."""
        out = tmp_path / 'tables'
        assert run('tables', run_config, out, '--artifact', 'CM') == 0

        printed = capsys.readouterr().out
        assert '| DOC | 98 -> 490 (x4) |' in printed
        assert '| REQ | 27 -> 513 (x18) |' in printed
        assert '| CM | 0.587 |' in printed
        tables = json.loads((out / 'tables.json').read_text())
        assert [t['artifact'] for t in tables] == ['CM']
        assert tables[0]['multipliers'] == {'CODE_DESIGN': 0, 'DOCUMENTATION': 4, 'TEST': 8, 'REQUIREMENT': 18}

    def test_from_dataset(self, run_config, tmp_path, dataset_file, capsys):
        """Test counts taken from a dataset file."""
        assert run('tables', run_config, tmp_path / 'tables', '--dataset', str(dataset_file)) == 0
        assert '| DOC | 30 -> 120 (x3) |' in capsys.readouterr().out


class TestPipeline:
    """Test cases for end-to-end and per-stage runs."""

    def test_pipeline_reproducible(self, run_config, tmp_path, dataset_file):
        """Test that two seeded mock runs write byte-identical metrics."""
        first, second = tmp_path / 'a', tmp_path / 'b'
        assert run('pipeline', run_config, first, '--dataset', str(dataset_file), '--client', 'mock', '--seed', '42') == 0
        assert run('pipeline', run_config, second, '--dataset', str(dataset_file), '--client', 'mock', '--seed', '42') == 0

        assert (first / 'metrics.json').read_bytes() == (second / 'metrics.json').read_bytes()
        reports = load_reports(first / 'metrics.json')
        assert set(reports) == {'identification', 'categorization', 'two_step'}
        assert reports['two_step'].labels == ['CODE_DESIGN', 'DOCUMENTATION', 'TEST', 'REQUIREMENT', 'NOT_SATD']
        assert sum(reports['two_step'].support.values()) == 50

        stages = [e['stage'] for e in manifest_entries(first)]
        assert stages == ['ingest', 'split', 'augment', 'train-identify', 'train-categorize', 'evaluate']
        assert all(e['status'] == COMPLETE for e in manifest_entries(first))
        assert (first / 'report.md').exists()
        assert (first / 'checkpoints' / 'identifier' / 'weights.pt').exists()

    def test_ablation(self, run_config, tmp_path, dataset_file):
        """Test baseline and augmented models trained and scored on one split."""
        out = tmp_path / 'ablation'
        assert run('ablation', run_config, out, '--dataset', str(dataset_file), '--client', 'mock',
                   '--artifact', 'CC') == 0

        stages = [e['stage'] for e in manifest_entries(out)]
        assert stages == [
            'ingest', 'split', 'train-identify-baseline', 'train-categorize-baseline',
            'augment', 'train-identify', 'train-categorize', 'evaluate', 'compare',
        ]
        entries = {e['stage']: e for e in manifest_entries(out)}
        assert entries['train-identify-baseline']['inputs']['paraphrases'] == 0
        assert entries['train-identify']['inputs']['paraphrases'] > 0
        assert (out / 'checkpoints' / 'baseline' / 'identifier' / 'weights.pt').exists()

        payload = json.loads((out / 'comparison.json').read_text())
        assert payload['artifact'] == 'CC'
        baseline, augmented = payload['variants']['baseline'], payload['variants']['augmented']
        assert set(baseline) == set(augmented) == {'identification', 'categorization', 'two_step'}
        support = [sum(c['support'] for c in v['two_step']['per_class'].values()) for v in (baseline, augmented)]
        assert support == [50, 50]

        markdown = (out / 'comparison.md').read_text()
        assert '| BiLSTM (augmented, published) | 0.952 | 0.927 | 0.939 |' in markdown
        assert 'BERT (baseline)' in markdown

    def test_augmented_only_from_train(self, run_config, tmp_path, dataset_file):
        """Test that every paraphrase derives from a training instance."""
        out = tmp_path / 'run'
        for command in ('ingest', 'split', 'augment'):
            extra = ('--dataset', str(dataset_file)) if command == 'ingest' else ()
            assert run(command, run_config, out, *extra) == 0

        train_ids = {inst.id for inst in load_dataset(out / 'splits' / 'train.csv')}
        with open(out / 'augmented.jsonl') as f:
            origins = {json.loads(line)['origin_id'] for line in f if line.strip()}
        assert origins and origins <= train_ids

        plan = json.loads((out / 'plan.json').read_text())
        assert plan['plan']['multipliers'] == {'CODE_DESIGN': 0, 'DOCUMENTATION': 3, 'TEST': 3, 'REQUIREMENT': 5}
        assert plan['shortfalls'] == {}

    def test_poisoned_split_aborts(self, run_config, tmp_path, dataset_file):
        """Test that a test instance copied into train stops augmentation."""
        out = tmp_path / 'run'
        assert run('ingest', run_config, out, '--dataset', str(dataset_file)) == 0
        assert run('split', run_config, out) == 0
        train = load_dataset(out / 'splits' / 'train.csv')
        test = load_dataset(out / 'splits' / 'test.csv')
        write_dataset([*train, test[0]], out / 'splits' / 'train.csv')

        assert run('augment', run_config, out) == 1
        last = manifest_entries(out)[-1]
        assert last['stage'] == 'augment'
        assert last['status'] == INCOMPLETE
        assert last['error'].startswith('LeakageError')
        assert not (out / 'augmented.jsonl').exists()

    def test_missing_dataset(self, run_config, tmp_path):
        """Test that ingest without --dataset fails cleanly."""
        assert run('ingest', run_config, tmp_path / 'run') == 1

    def test_remote_without_key(self, run_config, tmp_path, dataset_file, monkeypatch):
        """Test that the remote backend refuses to start without credentials."""
        monkeypatch.delenv(API_KEY_ENV, raising=False)
        out = tmp_path / 'run'
        assert run('ingest', run_config, out, '--dataset', str(dataset_file)) == 0
        assert run('split', run_config, out) == 0

        assert run('augment', run_config, out, '--client', 'remote') == 1
        assert manifest_entries(out)[-1]['status'] == INCOMPLETE

    def test_artifact_filter(self, run_config, tmp_path, dataset_file):
        """Test that --artifact keeps only one source."""
        assert run('ingest', run_config, tmp_path / 'cc', '--dataset', str(dataset_file), '--artifact', 'CC') == 0
        assert len(load_dataset(tmp_path / 'cc' / 'dataset.csv')) == 500


class TestRunManifest:
    """Test cases for RunManifest."""

    def test_stage_entries(self, tmp_path):
        """Test complete and incomplete entries."""
        config = load_config(None)
        manifest = RunManifest(tmp_path, config, stage_seeds(42))
        manifest.register_run()
        manifest.register_run()

        with manifest.stage('split') as entry:
            entry['details'] = {'n': 3}
        with pytest.raises(RuntimeError):
            with manifest.stage('augment'):
                raise RuntimeError('boom')

        reopened = RunManifest(tmp_path, config, stage_seeds(42))
        assert len(reopened.data['runs']) == 1
        assert [e['status'] for e in reopened.entries] == [COMPLETE, INCOMPLETE]
        assert reopened.latest('split')['details'] == {'n': 3}
        assert reopened.latest('augment') is None
        assert reopened.latest('augment', INCOMPLETE)['error'] == 'RuntimeError: boom'

    def test_run_id(self):
        """Test that the run id follows the effective config only."""
        config = load_config(None)
        other = load_config(None)
        other['seed'] = 7
        assert config_run_id(config) == config_run_id(load_config(None))
        assert config_run_id(config) != config_run_id(other)
