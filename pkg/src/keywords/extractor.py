"""Embedding-similarity keyword extraction per artifact source and per debt type."""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.feature_extraction.text import CountVectorizer

from src.corpus.schema import DEBT_TYPES, ArtifactSource, LabeledInstance, is_debt
from src.errors import AugmentedInputRejected, DimensionMismatch, EmptyGroup, InvalidConfig, ZeroVector
from src.preprocess.text import PreprocessConfig, preprocess_text

logger = logging.getLogger(__name__)

Document = Union[str, LabeledInstance]


@dataclass(frozen=True)
class KeywordQuery:
    """Which group to describe and how many phrases to keep."""

    group: str
    ngram_range: Tuple[int, int] = (1, 2)
    top_k: int = 10
    diversity: float = 0.0
    chunk_words: int = 200

    def __post_init__(self):
        object.__setattr__(self, 'ngram_range', tuple(self.ngram_range))
        low, high = self.ngram_range
        if not 1 <= low <= high <= 3:
            raise InvalidConfig(f"ngram_range must satisfy 1 <= min <= max <= 3, got {self.ngram_range}")
        if self.top_k < 1:
            raise InvalidConfig(f"top_k must be >= 1, got {self.top_k}")
        if not 0 <= self.diversity < 1:
            raise InvalidConfig(f"diversity must be in [0, 1), got {self.diversity}")
        if self.chunk_words < 1:
            raise InvalidConfig(f"chunk_words must be >= 1, got {self.chunk_words}")

    @classmethod
    def from_config(cls, group: str, section: Mapping) -> 'KeywordQuery':
        known = {k: v for k, v in (section or {}).items() if k in cls.__dataclass_fields__ and k != 'group'}
        return cls(group=group, **known)


@dataclass
class KeywordResult:
    group: str
    keywords: List[Tuple[str, float]] = field(default_factory=list)
    corpus_fingerprint: str = ''

    def phrases(self) -> List[str]:
        return [phrase for phrase, _ in self.keywords]


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|), clipped to [-1, 1].

    Raises:
        DimensionMismatch
        ZeroVector
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"Vectors of dimension {a.size} and {b.size}")
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        raise ZeroVector("Cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


def _document_texts(documents: Sequence[Document]) -> List[str]:
    texts = []
    for doc in documents:
        if hasattr(doc, 'origin_id') or (isinstance(doc, Mapping) and 'origin_id' in doc):
            raise AugmentedInputRejected(
                f"Keyword extraction runs on original data only, got paraphrase {getattr(doc, 'id', doc)}"
            )
        if isinstance(doc, str):
            texts.append(doc)
        elif isinstance(doc, Mapping):
            texts.append(doc['text'])
        else:
            texts.append(doc.text)
    return texts


def _fingerprint(texts: Sequence[str]) -> str:
    digest = hashlib.sha256()
    for text in texts:
        digest.update(text.encode('utf-8'))
        digest.update(b'\n')
    return digest.hexdigest()


def candidate_phrases(texts: Sequence[str], ngram_range: Tuple[int, int], config: PreprocessConfig) -> List[str]:
    """Distinct n-grams of the preprocessed texts, in lexicographic order."""
    cleaned = [preprocess_text(text, config) for text in texts]
    vectorizer = CountVectorizer(ngram_range=tuple(ngram_range), token_pattern=r'(?u)\b\w+\b', lowercase=False)
    try:
        vectorizer.fit(cleaned)
    except ValueError:
        return []
    return list(vectorizer.get_feature_names_out())


def group_embedding(texts: Sequence[str], embedder, chunk_words: int) -> np.ndarray:
    """Mean of the embeddings of word chunks of the concatenated group document."""
    words = ' '.join(texts).split()
    chunks = [' '.join(words[i:i + chunk_words]) for i in range(0, len(words), chunk_words)]
    return np.asarray(embedder.encode(chunks), dtype=float).mean(axis=0)


def _similarities(candidates: np.ndarray, target: np.ndarray) -> np.ndarray:
    target_norm = np.linalg.norm(target)
    if target_norm == 0:
        raise ZeroVector("Group embedding is the zero vector")
    norms = np.linalg.norm(candidates, axis=1)
    sims = np.zeros(len(candidates))
    nonzero = norms > 0
    sims[nonzero] = candidates[nonzero] @ target / (norms[nonzero] * target_norm)
    return np.clip(sims, -1.0, 1.0)


def _pairwise(candidates: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(candidates, axis=1, keepdims=True)
    unit = np.divide(candidates, norms, out=np.zeros_like(candidates), where=norms > 0)
    return unit @ unit.T


def _mmr(doc_sims: np.ndarray, embeddings: np.ndarray, top_k: int, diversity: float) -> List[int]:
    """Maximal marginal relevance selection."""
    word_sims = _pairwise(embeddings)
    selected = [int(np.argmax(doc_sims))]
    remaining = [i for i in range(len(doc_sims)) if i != selected[0]]
    while remaining and len(selected) < top_k:
        redundancy = word_sims[np.ix_(remaining, selected)].max(axis=1)
        scores = (1 - diversity) * doc_sims[remaining] - diversity * redundancy
        pick = remaining[int(np.argmax(scores))]
        selected.append(pick)
        remaining.remove(pick)
    return selected


def extract_keywords(
    documents: Sequence[Document],
    query: KeywordQuery,
    embedder,
    preprocess_config: PreprocessConfig = PreprocessConfig(),
) -> KeywordResult:
    """Rank candidate phrases by cosine similarity to the group embedding.

    Args:
        documents: Original texts (or instances) of one group
        query: Group name and ranking parameters
        embedder: Object with encode(list of str) -> 2-D array

    Returns:
        KeywordResult with at most top_k phrases, scores non-increasing

    Raises:
        EmptyGroup: no documents or no candidate phrase
        AugmentedInputRejected: a document carries paraphrase provenance
    """
    texts = _document_texts(documents)
    if not texts:
        raise EmptyGroup(f"No documents for group {query.group}")
    candidates = candidate_phrases(texts, query.ngram_range, preprocess_config)
    if not candidates:
        raise EmptyGroup(f"No candidate phrases for group {query.group}")

    target = group_embedding(texts, embedder, query.chunk_words)
    embeddings = np.asarray(embedder.encode(candidates), dtype=float)
    if embeddings.shape[1] != target.shape[0]:
        raise DimensionMismatch(f"Candidate dimension {embeddings.shape[1]} vs group {target.shape[0]}")
    sims = _similarities(embeddings, target)

    if query.diversity > 0 and len(candidates) > 1:
        chosen = _mmr(sims, embeddings, query.top_k, query.diversity)
    else:
        chosen = list(range(len(candidates)))
    # phrase order breaks score ties
    ranked = sorted(chosen, key=lambda i: (-sims[i], candidates[i]))[:query.top_k]

    keywords = [(candidates[i], float(sims[i])) for i in ranked]
    logger.info(f"Keywords for {query.group}: {[p for p, _ in keywords]}")
    return KeywordResult(group=query.group, keywords=keywords, corpus_fingerprint=_fingerprint(texts))


def keyword_tables(
    dataset: Sequence[LabeledInstance],
    embedder,
    section: Mapping = None,
    preprocess_config: PreprocessConfig = PreprocessConfig(),
) -> Dict[str, KeywordResult]:
    """One result per artifact source present (SATD texts) and one per debt type.

    Raises:
        EmptyGroup: a present source has no SATD text, or a debt type has no text
    """
    _document_texts(dataset)
    results: Dict[str, KeywordResult] = {}

    for source in ArtifactSource:
        in_source = [inst for inst in dataset if inst.source == source]
        if not in_source:
            continue
        satd = [inst for inst in in_source if is_debt(inst.label)]
        if not satd:
            raise EmptyGroup(f"No SATD texts for source {source.code}")
        results[source.code] = extract_keywords(
            satd, KeywordQuery.from_config(source.code, section), embedder, preprocess_config
        )

    for debt_type in DEBT_TYPES:
        group = [inst for inst in dataset if inst.label == debt_type]
        if not group:
            raise EmptyGroup(f"No texts of type {debt_type.value}")
        results[debt_type.value] = extract_keywords(
            group, KeywordQuery.from_config(debt_type.value, section), embedder, preprocess_config
        )
    return results


def write_keywords(results: Mapping[str, KeywordResult], path: Union[str, Path]) -> Path:
    """keywords.csv with columns group, rank, phrase, score."""
    rows = [
        {'group': group, 'rank': rank, 'phrase': phrase, 'score': score}
        for group, result in results.items()
        for rank, (phrase, score) in enumerate(result.keywords, start=1)
    ]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=['group', 'rank', 'phrase', 'score']).to_csv(
        path, index=False, float_format='%.6f', lineterminator='\n'
    )
    return path
