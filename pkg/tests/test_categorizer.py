"""Tests for the transformer categorizer and two-step classification."""

from dataclasses import replace

import numpy as np
import pytest

from src.categorizer import two_step
from src.categorizer.model import LABEL_ORDER, CategorizerConfig, TypeClassifier, load_encoder
from src.categorizer.trainer import TrainedCategorizer, predict_type, train_categorizer
from src.categorizer.two_step import two_step_classify, two_step_predict
from src.corpus.schema import BinaryLabel, SatdLabel, SplitBundle
from src.errors import EmptyClass, InvalidConfig, UnknownLabel
from tests.conftest import make_instance, synthetic_corpus


def types_bundle(per_type=10):
    train = synthetic_corpus({label: per_type for label in
                              (SatdLabel.CODE_DESIGN, SatdLabel.DOCUMENTATION, SatdLabel.TEST, SatdLabel.REQUIREMENT)})
    return SplitBundle(train=train, validation=list(train), test=[], seed=0)


def tiny_config(encoder_dir, **overrides):
    settings = dict(encoder=encoder_dir, head_hidden=16, batch_size=8, max_length=16, max_epochs=2,
                    learning_rate=1e-3, seed=3)
    settings.update(overrides)
    return CategorizerConfig(**settings)


def fit(bundle, config):
    tokenizer, encoder = load_encoder(config.encoder)
    return train_categorizer(bundle, config, encoder=encoder, tokenizer=tokenizer)


class TestCategorizerConfig:
    """Test cases for CategorizerConfig."""

    def test_output_dimension(self):
        """Test that only four outputs are accepted."""
        with pytest.raises(InvalidConfig):
            CategorizerConfig(num_labels=5)

    def test_from_config(self):
        """Test unknown keys and the seed fallback."""
        config = CategorizerConfig.from_config({'head_hidden': 64, 'other': True}, seed=11)
        assert config.head_hidden == 64
        assert config.seed == 11
        assert config.epsilon == 1e-8

    def test_label_order(self):
        """Test the fixed output order."""
        assert LABEL_ORDER == ('CODE_DESIGN', 'DOCUMENTATION', 'TEST', 'REQUIREMENT')


class TestTypeClassifier:
    """Test cases for TypeClassifier."""

    def test_logit_shape(self, tiny_encoder_dir):
        """Test one logit per debt type."""
        tokenizer, encoder = load_encoder(tiny_encoder_dir)
        network = TypeClassifier(encoder, head_hidden=8)
        enc = tokenizer(['todo add unit test', 'fixme javadoc'], padding=True, return_tensors='pt')
        assert network(enc['input_ids'], enc['attention_mask']).shape == (2, 4)


class TestTrainCategorizer:
    """Test cases for train_categorizer and predict_type."""

    def test_overfits_separable_set(self, tiny_encoder_dir):
        """Test that 40 keyword-separable instances are learned."""
        bundle = types_bundle()
        model = fit(bundle, tiny_config(tiny_encoder_dir, max_epochs=15))
        predictions = predict_type(model, [inst.text for inst in bundle.train])

        correct = sum(1 for inst, (label, _) in zip(bundle.train, predictions) if label == inst.label)
        assert correct / len(bundle.train) >= 0.95
        assert max(h['val_macro_f1'] for h in model.history) == model.history[model.best_epoch - 1]['val_macro_f1']

    def test_probabilities(self, tiny_encoder_dir):
        """Test normalized rows and batch-size invariance."""
        bundle = types_bundle(4)
        model = fit(bundle, tiny_config(tiny_encoder_dir, max_epochs=1))
        texts = [inst.text for inst in bundle.train]

        whole = np.stack([row for _, row in predict_type(model, texts, batch_size=64)])
        single = np.stack([row for _, row in predict_type(model, texts, batch_size=1)])
        assert whole.shape == (16, 4)
        assert np.allclose(whole.sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(whole, single, atol=1e-5)
        assert predict_type(model, []) == []

    def test_missing_type(self, tiny_encoder_dir):
        """Test a training split without REQUIREMENT."""
        train = synthetic_corpus({SatdLabel.CODE_DESIGN: 3, SatdLabel.DOCUMENTATION: 3, SatdLabel.TEST: 3})
        with pytest.raises(EmptyClass):
            fit(SplitBundle(train=train, validation=train, test=[], seed=0), tiny_config(tiny_encoder_dir))

    def test_non_debt_label(self, tiny_encoder_dir):
        """Test that NOT_SATD instances are rejected."""
        bundle = types_bundle(2)
        train = [*bundle.train, make_instance('n1', SatdLabel.NOT_SATD)]
        with pytest.raises(UnknownLabel):
            fit(replace(bundle, train=train), tiny_config(tiny_encoder_dir))

    def test_empty_validation(self, tiny_encoder_dir):
        """Test selection on training macro-F1 without a validation split."""
        bundle = replace(types_bundle(2), validation=[])
        model = fit(bundle, tiny_config(tiny_encoder_dir, max_epochs=1))
        assert model.best_epoch == 1

    def test_save_load(self, tiny_encoder_dir, tmp_path):
        """Test that a reloaded checkpoint predicts identically."""
        bundle = types_bundle(2)
        model = fit(bundle, tiny_config(tiny_encoder_dir, max_epochs=1))
        model.save(tmp_path / 'categorizer')
        loaded = TrainedCategorizer.load(tmp_path / 'categorizer')
        texts = [inst.text for inst in bundle.train]

        assert loaded.labels == LABEL_ORDER
        assert loaded.history == model.history
        original = np.stack([row for _, row in predict_type(model, texts)])
        reloaded = np.stack([row for _, row in predict_type(loaded, texts)])
        assert np.allclose(original, reloaded, atol=1e-6)


class TestTwoStep:
    """Test cases for two_step_predict / two_step_classify."""

    def test_gate(self, monkeypatch):
        """Test that only accepted texts reach the categorizer."""
        seen = []

        def fake_binary(identifier, texts):
            return [(BinaryLabel.SATD if 'todo' in t else BinaryLabel.NOT_SATD, 0.9 if 'todo' in t else 0.1)
                    for t in texts]

        def fake_type(categorizer, texts):
            seen.extend(texts)
            return [(SatdLabel.TEST, np.array([0.1, 0.1, 0.7, 0.1])) for _ in texts]

        monkeypatch.setattr(two_step, 'predict_binary', fake_binary)
        monkeypatch.setattr(two_step, 'predict_type', fake_type)

        texts = ['todo add test', 'return value', 'todo cover parser']
        raw = ['TODO add test', 'Returns value', 'TODO: cover parser']
        predictions = two_step_predict(None, None, texts, raw)

        assert [p.label for p in predictions] == [SatdLabel.TEST, SatdLabel.NOT_SATD, SatdLabel.TEST]
        assert seen == ['TODO add test', 'TODO: cover parser']
        assert predictions[1].type_probabilities is None
        assert predictions[1].identifier_score == 0.1
        assert two_step_classify(None, None, texts) == [SatdLabel.TEST, SatdLabel.NOT_SATD, SatdLabel.TEST]

    def test_nothing_accepted(self, monkeypatch):
        """Test that the categorizer is skipped entirely."""
        monkeypatch.setattr(two_step, 'predict_binary', lambda i, texts: [(BinaryLabel.NOT_SATD, 0.2)] * len(texts))
        monkeypatch.setattr(two_step, 'predict_type', lambda c, texts: pytest.fail('categorizer called') if texts else [])

        assert two_step_classify(None, None, ['a', 'b']) == [SatdLabel.NOT_SATD, SatdLabel.NOT_SATD]

    def test_misaligned_texts(self):
        """Test categorizer texts of another length."""
        with pytest.raises(ValueError):
            two_step_predict(None, None, ['a', 'b'], ['a'])
