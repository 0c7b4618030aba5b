"""Tests for embedding-similarity keyword extraction."""

import numpy as np
import pandas as pd
import pytest

from src.augment.augmenter import AugmentedInstance
from src.corpus.schema import ArtifactSource, SatdLabel
from src.errors import AugmentedInputRejected, DimensionMismatch, EmptyGroup, InvalidConfig, ZeroVector
from src.gateway.base import GatewayKind
from src.keywords.embedders import HashingEmbedder, SentenceTransformerEmbedder, build_embedder
from src.keywords.extractor import (
    KeywordQuery,
    cosine_similarity,
    extract_keywords,
    keyword_tables,
    write_keywords,
)
from tests.conftest import make_instance, requires_network, synthetic_corpus

UNIGRAMS = KeywordQuery('toy', ngram_range=(1, 1))

# Code comments in the style of the labelled SATD corpora
CODE_COMMENTS = [
    (SatdLabel.CODE_DESIGN, 'TODO: this is a hack, refactor the whole thing later'),
    (SatdLabel.CODE_DESIGN, 'FIXME: ugly workaround, remove once the cache is rewritten'),
    (SatdLabel.CODE_DESIGN, 'TODO remove this duplicated code and clean up'),
    (SatdLabel.CODE_DESIGN, 'FIXME this method is far too long, split it'),
    (SatdLabel.CODE_DESIGN, 'TODO: temporary fix, redesign the locking'),
    (SatdLabel.CODE_DESIGN, 'FIXME: hardcoded path, make configurable'),
    (SatdLabel.DOCUMENTATION, 'TODO: document the return value'),
    (SatdLabel.DOCUMENTATION, 'FIXME javadoc is outdated for this method'),
    (SatdLabel.DOCUMENTATION, 'TODO add comments explaining the algorithm'),
    (SatdLabel.TEST, 'TODO: add unit tests for the error handling'),
    (SatdLabel.TEST, 'FIXME test is flaky, fix the timing'),
    (SatdLabel.TEST, 'TODO write a test case for empty input'),
    (SatdLabel.REQUIREMENT, 'TODO: implement support for unicode filenames'),
    (SatdLabel.REQUIREMENT, 'FIXME not implemented yet, needs retry logic'),
    (SatdLabel.REQUIREMENT, 'TODO handle the remaining protocol versions'),
    (SatdLabel.NOT_SATD, 'Returns the number of open connections.'),
    (SatdLabel.NOT_SATD, 'Closes the stream and releases resources.'),
]


class PlantedEmbedder:
    """Sum of fixed word vectors."""

    def __init__(self, vectors):
        self.vectors = {word: np.asarray(v, dtype=float) for word, v in vectors.items()}
        self.dim = len(next(iter(self.vectors.values())))

    def encode(self, texts):
        rows = []
        for text in texts:
            row = np.zeros(self.dim)
            for word in text.lower().split():
                row += self.vectors.get(word, 0.0)
            rows.append(row)
        return np.vstack(rows)


class TestCosineSimilarity:
    """Test cases for cosine_similarity."""

    def test_values(self):
        """Test a worked example, orthogonality and identity."""
        assert cosine_similarity([1, 2, 2], [2, 1, 2]) == pytest.approx(8 / 9)
        assert cosine_similarity([1, 0], [0, 3]) == 0.0
        assert cosine_similarity([0.3, 0.4], [3, 4]) == pytest.approx(1.0)
        assert cosine_similarity([1, 1], [-1, -1]) == pytest.approx(-1.0)

    def test_errors(self):
        """Test zero vectors and mismatched dimensions."""
        with pytest.raises(ZeroVector):
            cosine_similarity([0, 0], [1, 1])
        with pytest.raises(DimensionMismatch):
            cosine_similarity([1, 2], [1, 2, 3])


class TestKeywordQuery:
    """Test cases for KeywordQuery."""

    def test_invalid(self):
        """Test rejected parameters."""
        with pytest.raises(InvalidConfig):
            KeywordQuery('x', ngram_range=(2, 1))
        with pytest.raises(InvalidConfig):
            KeywordQuery('x', top_k=0)
        with pytest.raises(InvalidConfig):
            KeywordQuery('x', diversity=1.0)

    def test_from_config(self):
        """Test list-valued ranges and ignored keys."""
        query = KeywordQuery.from_config('CC', {'ngram_range': [1, 3], 'top_k': 5, 'embedder': 'hashing'})
        assert query.ngram_range == (1, 3)
        assert query.top_k == 5
        assert query.group == 'CC'


class TestExtractKeywords:
    """Test cases for extract_keywords."""

    def test_single_candidate(self):
        """Test a group whose only phrase is its whole text."""
        result = extract_keywords(['todo'], UNIGRAMS, HashingEmbedder())
        assert result.phrases() == ['todo']
        assert result.keywords[0][1] == pytest.approx(1.0)

    def test_planted_vectors(self):
        """Test ranking against known similarities."""
        embedder = PlantedEmbedder({'alpha': [1, 0], 'beta': [0, 1]})
        result = extract_keywords(['alpha beta', 'alpha'], UNIGRAMS, embedder)

        assert result.phrases() == ['alpha', 'beta']
        assert result.keywords[0][1] == pytest.approx(2 / np.sqrt(5))
        assert result.keywords[1][1] == pytest.approx(1 / np.sqrt(5))

    def test_ties_broken_by_phrase(self):
        """Test lexicographic order among equal scores."""
        embedder = PlantedEmbedder({'gamma': [1, 0], 'alpha': [0, 1]})
        assert extract_keywords(['gamma alpha'], UNIGRAMS, embedder).phrases() == ['alpha', 'gamma']

    def test_marker_words_rank_high(self, small_corpus):
        """Test that SATD markers surface for code-comment SATD."""
        satd = [inst for inst in small_corpus if inst.label != SatdLabel.NOT_SATD]
        documentation = [inst for inst in small_corpus if inst.label == SatdLabel.DOCUMENTATION]

        assert 'todo' in extract_keywords(satd, KeywordQuery('CC'), HashingEmbedder()).phrases()
        assert 'fixme' in extract_keywords(documentation, KeywordQuery('DOCUMENTATION'), HashingEmbedder()).phrases()

    def test_scores_sorted_and_bounded(self, small_corpus):
        """Test top_k, distinct phrases and non-increasing scores."""
        result = extract_keywords(small_corpus, KeywordQuery('all', top_k=7), HashingEmbedder())
        scores = [score for _, score in result.keywords]

        assert len(result.keywords) == 7
        assert len(set(result.phrases())) == 7
        assert scores == sorted(scores, reverse=True)
        assert all(-1.0 <= s <= 1.0 for s in scores)

    def test_diversity(self, small_corpus):
        """Test that maximal marginal relevance keeps the output sorted."""
        result = extract_keywords(small_corpus, KeywordQuery('all', top_k=6, diversity=0.6), HashingEmbedder())
        scores = [score for _, score in result.keywords]

        assert len(result.keywords) == 6
        assert scores == sorted(scores, reverse=True)

    def test_deterministic(self, small_corpus):
        """Test identical results for identical input."""
        first = extract_keywords(small_corpus, KeywordQuery('all'), HashingEmbedder())
        second = extract_keywords(small_corpus, KeywordQuery('all'), HashingEmbedder())
        assert first == second

    def test_augmented_rejected(self):
        """Test that paraphrases are refused."""
        paraphrase = AugmentedInstance(
            id='c1-aug1', source=ArtifactSource.CODE_COMMENT, project='demo', text='todo repair',
            label=SatdLabel.CODE_DESIGN, origin_id='c1', variant_index=1, generator=GatewayKind.MOCK,
            prompt_fingerprint='abc',
        )
        with pytest.raises(AugmentedInputRejected):
            extract_keywords([paraphrase], UNIGRAMS, HashingEmbedder())
        with pytest.raises(AugmentedInputRejected):
            extract_keywords([{'text': 'todo', 'origin_id': 'c1'}], UNIGRAMS, HashingEmbedder())

    def test_empty_group(self):
        """Test no documents and no candidates."""
        with pytest.raises(EmptyGroup):
            extract_keywords([], UNIGRAMS, HashingEmbedder())
        with pytest.raises(EmptyGroup):
            extract_keywords(['the of to'], UNIGRAMS, HashingEmbedder())

    def test_zero_group_vector(self):
        """Test an embedder that maps the group to zero."""
        with pytest.raises(ZeroVector):
            extract_keywords(['alpha'], UNIGRAMS, PlantedEmbedder({'beta': [1, 0]}))


class TestKeywordTables:
    """Test cases for keyword_tables and write_keywords."""

    def test_groups(self, small_corpus):
        """Test one group per present source and per debt type."""
        tables = keyword_tables(small_corpus, HashingEmbedder(), {'top_k': 5})

        assert list(tables) == ['CC', 'CODE_DESIGN', 'DOCUMENTATION', 'TEST', 'REQUIREMENT']
        assert all(len(result.keywords) <= 5 for result in tables.values())
        assert 'todo' in tables['CC'].phrases()
        assert 'fixme' in tables['DOCUMENTATION'].phrases()

    def test_source_without_satd(self, small_corpus):
        """Test a present source that has only Not-SATD texts."""
        dataset = [*small_corpus, make_instance('i1', SatdLabel.NOT_SATD, 'works fine', ArtifactSource.ISSUE_SECTION)]
        with pytest.raises(EmptyGroup):
            keyword_tables(dataset, HashingEmbedder())

    def test_missing_type(self):
        """Test a dataset without REQUIREMENT."""
        dataset = synthetic_corpus({SatdLabel.CODE_DESIGN: 3, SatdLabel.DOCUMENTATION: 3, SatdLabel.TEST: 3})
        with pytest.raises(EmptyGroup):
            keyword_tables(dataset, HashingEmbedder())

    def test_write(self, small_corpus, tmp_path):
        """Test the keywords.csv layout."""
        tables = keyword_tables(small_corpus, HashingEmbedder(), {'top_k': 3})
        frame = pd.read_csv(write_keywords(tables, tmp_path / 'keywords.csv'))

        assert list(frame.columns) == ['group', 'rank', 'phrase', 'score']
        assert len(frame) == 15
        assert frame[frame['group'] == 'CC']['rank'].tolist() == [1, 2, 3]

    @requires_network
    def test_sentence_embedder_marker_words(self):
        """Test that todo and fixme rank in the code-comment top 10 with the default embedder."""
        dataset = [
            make_instance(f"cc-{i}", label, text)
            for i, (label, text) in enumerate(CODE_COMMENTS)
        ]
        tables = keyword_tables(dataset, SentenceTransformerEmbedder())

        assert 'todo' in tables['CC'].phrases()
        assert 'fixme' in tables['CC'].phrases()

    def test_build_embedder(self):
        """Test embedder selection by name."""
        assert isinstance(build_embedder({'embedder': 'hashing'}), HashingEmbedder)
        with pytest.raises(ValueError):
            build_embedder({'embedder': 'word2vec'})
