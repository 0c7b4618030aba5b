"""Indicative SATD keywords per artifact source and per debt type."""

from src.keywords.embedders import HashingEmbedder, SentenceTransformerEmbedder, build_embedder
from src.keywords.extractor import (
    KeywordQuery,
    KeywordResult,
    cosine_similarity,
    extract_keywords,
    keyword_tables,
    write_keywords,
)

__all__ = [
    'HashingEmbedder',
    'KeywordQuery',
    'KeywordResult',
    'SentenceTransformerEmbedder',
    'build_embedder',
    'cosine_similarity',
    'extract_keywords',
    'keyword_tables',
    'write_keywords',
]
