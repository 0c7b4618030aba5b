"""Tests for confusion matrices, F1 scores, report emission and the published result rows."""

import json
import logging
import random

import numpy as np
import pandas as pd
import pytest
from sklearn.metrics import precision_recall_fscore_support

from src.corpus.schema import BinaryLabel
from src.errors import EmptyInput, LengthMismatch, UnknownLabel
from src.metrics.published import (
    CATEGORIZATION_ROWS,
    IDENTIFICATION_ROWS,
    KNOWN_INCONSISTENT,
    PublishedRow,
    inconsistent_rows,
    published_row,
)
from src.metrics.report import (
    ReportFormat,
    comparison_table,
    comparison_to_json,
    emit_report,
    load_report,
    load_reports,
    render_comparison,
    render_markdown,
    reports_to_json,
)
from src.metrics.scores import confusion_matrix, f1_scores, macro_f1, round_half_even

TYPES = ('CODE_DESIGN', 'DOCUMENTATION', 'TEST', 'REQUIREMENT')


def random_labels(rng, labels, n):
    return [rng.choice(labels) for _ in range(n)]


class TestConfusionMatrix:
    """Test cases for confusion_matrix."""

    def test_counts(self):
        """Test gold rows and predicted columns."""
        cm = confusion_matrix(['A', 'A', 'A', 'B', 'B'], ['A', 'A', 'B', 'A', 'B'], ['A', 'B'])
        assert cm.to_list() == [[2, 1], [1, 1]]
        assert cm.true_positives().tolist() == [2, 1]
        assert cm.false_positives().tolist() == [1, 1]
        assert cm.false_negatives().tolist() == [1, 1]
        assert cm.total == 5

    def test_enum_labels(self):
        """Test that enum members and names are interchangeable."""
        cm = confusion_matrix([BinaryLabel.SATD], ['SATD'], ['NOT_SATD', 'SATD'])
        assert cm.to_list() == [[0, 0], [0, 1]]

    def test_errors(self):
        """Test length and label validation."""
        with pytest.raises(LengthMismatch):
            confusion_matrix(['A'], ['A', 'B'], ['A', 'B'])
        with pytest.raises(UnknownLabel):
            confusion_matrix(['A'], ['C'], ['A', 'B'])

    def test_empty(self):
        """Test an all-zero matrix for empty input."""
        assert confusion_matrix([], [], ['A', 'B']).to_list() == [[0, 0], [0, 0]]


class TestF1Scores:
    """Test cases for f1_scores and macro_f1."""

    def test_worked_example(self):
        """Test TP=2, FP=1, FN=1 for class A."""
        report = f1_scores(['A', 'A', 'A', 'B', 'B'], ['A', 'A', 'B', 'A', 'B'], ['A', 'B'])

        assert report.precision['A'] == pytest.approx(2 / 3)
        assert report.recall['A'] == pytest.approx(2 / 3)
        assert report.f1['A'] == pytest.approx(2 / 3)
        assert report.f1['B'] == pytest.approx(0.5)
        assert report.macro_f1 == pytest.approx(7 / 12)
        assert report.support == {'A': 3, 'B': 2}

    def test_perfect(self):
        """Test that identical labels give 1.0 everywhere."""
        gold = ['A', 'B', 'C', 'A']
        report = f1_scores(gold, gold, ['A', 'B', 'C'])
        assert set(report.f1.values()) == {1.0}
        assert report.macro_f1 == 1.0

    def test_zero_division(self, caplog):
        """Test that a never-predicted, never-gold class scores 0 with a warning."""
        with caplog.at_level(logging.WARNING):
            report = f1_scores(['A', 'A'], ['A', 'A'], ['A', 'B'])

        assert report.precision['B'] == 0.0
        assert report.recall['B'] == 0.0
        assert report.f1['B'] == 0.0
        assert report.macro_f1 == 0.5
        assert 'Zero division' in caplog.text

    def test_matches_sklearn(self):
        """Test 1000 random label sets against scikit-learn."""
        rng = random.Random(0)
        for _ in range(1000):
            n = rng.randint(1, 40)
            gold = random_labels(rng, TYPES, n)
            predicted = random_labels(rng, TYPES, n)
            report = f1_scores(gold, predicted, TYPES, warn_zero_division=False)
            p, r, f, s = precision_recall_fscore_support(gold, predicted, labels=list(TYPES), zero_division=0)

            assert np.allclose([report.precision[t] for t in TYPES], p)
            assert np.allclose([report.recall[t] for t in TYPES], r)
            assert np.allclose([report.f1[t] for t in TYPES], f)
            assert [report.support[t] for t in TYPES] == s.tolist()
            for i, t in enumerate(TYPES):
                tp = sum(1 for g, q in zip(gold, predicted) if g == q == t)
                assert report.confusion[i][i] == tp

    def test_permutation_invariance(self):
        """Test that reordering pairs leaves scores unchanged."""
        rng = random.Random(4)
        gold = random_labels(rng, TYPES, 60)
        predicted = random_labels(rng, TYPES, 60)
        pairs = list(zip(gold, predicted))
        rng.shuffle(pairs)

        first = f1_scores(gold, predicted, TYPES, warn_zero_division=False)
        second = f1_scores([g for g, _ in pairs], [p for _, p in pairs], TYPES, warn_zero_division=False)
        assert first == second

    def test_macro(self):
        """Test the unweighted mean."""
        assert macro_f1([0.885, 0.925, 0.925, 0.796]) == pytest.approx(0.88275)
        assert round_half_even(macro_f1([0.885, 0.925, 0.925, 0.796])) == 0.883
        with pytest.raises(EmptyInput):
            macro_f1([])

    def test_round_half_even(self):
        """Test ties at the third decimal."""
        assert round_half_even(0.8875) == 0.888
        assert round_half_even(0.8865) == 0.886
        assert round_half_even(np.float64(0.12345), 4) == 0.1234
        assert round_half_even(1.0) == 1.0


class TestPublishedRows:
    """Test cases for the published result rows."""

    def test_macro_follows_per_class(self):
        """Test that every printed macro is the mean of its row, one known exception aside."""
        rows = IDENTIFICATION_ROWS + CATEGORIZATION_ROWS
        flagged = {(row.experiment, row.artifact) for row in inconsistent_rows(rows)}
        assert flagged == KNOWN_INCONSISTENT

    def test_known_exception(self):
        """Test the pull-section categorization row with augmentation."""
        row = next(r for r in CATEGORIZATION_ROWS if (r.experiment, r.artifact) == ('BERT+AugGPT', 'PS'))
        assert row.recomputed_macro() == pytest.approx(0.8575)
        assert not row.consistent()

    def test_row_shapes(self):
        """Test per-class widths of both tables."""
        assert all(len(r.per_class) == 2 for r in IDENTIFICATION_ROWS)
        assert all(len(r.per_class) == 4 for r in CATEGORIZATION_ROWS)
        assert PublishedRow('x', 'CC', (0.5, 0.7), 0.6).consistent()


class TestReports:
    """Test cases for report emission."""

    def report(self):
        return f1_scores(['A', 'A', 'A', 'B', 'B'], ['A', 'A', 'B', 'A', 'B'], ['A', 'B'])

    def test_json_round_trip(self, tmp_path):
        """Test that a JSON report loads back equal."""
        report = self.report()
        report.entropy = {'train_original': 0.97}
        path = emit_report(report, ReportFormat.JSON, tmp_path / 'out' / 'report.json')
        assert load_report(path) == report

    def test_views(self, tmp_path):
        """Test the multi-view metrics document."""
        reports = {'identification': self.report(), 'categorization': self.report()}
        text = reports_to_json(reports)
        path = tmp_path / 'metrics.json'
        path.write_text(text)

        assert reports_to_json(reports) == text
        assert load_reports(path) == reports

    def test_markdown(self):
        """Test the table layout."""
        report = f1_scores(['CODE_DESIGN', 'TEST'], ['CODE_DESIGN', 'TEST'], TYPES, warn_zero_division=False)
        markdown = render_markdown(report, 'CC categorization')

        assert markdown.startswith('### CC categorization')
        assert '| Metric | C/D | DOC | TES | REQ | Macro-Avg. |' in markdown
        assert '| F1-score | 1.000 | 0.000 | 1.000 | 0.000 | 0.500 |' in markdown
        assert '| Support | 1 | 0 | 1 | 0 | |' in markdown

    def test_csv(self, tmp_path):
        """Test per-class rows plus the macro row."""
        path = emit_report(self.report(), 'csv', tmp_path / 'report.csv')
        frame = pd.read_csv(path)

        assert frame['label'].tolist() == ['A', 'B', 'MACRO']
        assert frame.loc[2, 'f1'] == pytest.approx(7 / 12, abs=1e-6)
        assert frame.loc[2, 'support'] == 5


class TestComparison:
    """Test cases for the baseline vs augmented comparison tables."""

    def variants(self):
        identification = f1_scores(['NOT_SATD', 'SATD'], ['NOT_SATD', 'SATD'], ('NOT_SATD', 'SATD'))
        categorization = f1_scores(['CODE_DESIGN', 'TEST'], ['CODE_DESIGN', 'CODE_DESIGN'], TYPES,
                                   warn_zero_division=False)
        return {
            'baseline': {'identification': identification, 'categorization': categorization},
            'augmented': {'identification': identification},
        }

    def test_published_row(self):
        """Test the published rows behind each ablation cell."""
        assert published_row('identification', 'augmented', 'CC').per_class == (0.952, 0.927)
        assert published_row('categorization', 'baseline', 'PS').macro == 0.549
        assert published_row('categorization', 'augmented', 'XX') is None

    def test_rows_per_view(self):
        """Test one row per variant with a report, then published rows for the artifact."""
        table = comparison_table(self.variants(), 'IS')

        assert [row['model'] for row in table['identification']] == [
            'BiLSTM (baseline)', 'BiLSTM (augmented)',
            'BiLSTM (baseline, published)', 'BiLSTM (augmented, published)',
        ]
        assert [row['model'] for row in table['categorization']] == [
            'BERT (baseline)', 'BERT (baseline, published)', 'BERT (augmented, published)',
        ]
        assert table['categorization'][0]['f1'] == pytest.approx([2 / 3, 0.0, 0.0, 0.0])
        assert table['categorization'][2]['macro_f1'] == 0.899

    def test_without_artifact(self):
        """Test that no published rows are added without an artifact."""
        table = comparison_table(self.variants())
        assert all(row['source'] == 'run' for rows in table.values() for row in rows)

    def test_markdown_and_json(self):
        """Test the rendered comparison."""
        variants = self.variants()
        table = comparison_table(variants, 'CC')
        markdown = render_comparison(table)

        assert '| Model | Not-SATD | SATD | Macro-Avg. |' in markdown
        assert '| BiLSTM (baseline) | 1.000 | 1.000 | 1.000 |' in markdown
        assert '| BiLSTM (augmented, published) | 0.952 | 0.927 | 0.939 |' in markdown
        assert '| BERT (augmented, published) | 0.885 | 0.925 | 0.925 | 0.796 | 0.882 |' in markdown

        payload = json.loads(comparison_to_json(variants, table, 'CC'))
        assert payload['artifact'] == 'CC'
        assert set(payload['variants']) == {'baseline', 'augmented'}
        assert payload['comparison']['identification'][0]['model'] == 'BiLSTM (baseline)'
