"""
BM25 Okapi ranking over an in-memory inverted index.

    score(D, Q) = sum_i IDF(q_i) * f(q_i, D) * (k1 + 1)
                             / (f(q_i, D) + k1 * (1 - b + b * |D| / avgdl))

    IDF(q) = ln(1 + (N - n_q + 0.5) / (n_q + 0.5))

The sum runs over the query's token sequence, so a term repeated in the query
counts once per occurrence. The smoothed IDF never goes negative, which keeps
every score >= 0 even for terms found in most documents.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import Bm25Error

INDEX_FORMAT_VERSION = 1
_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """NFC, case-fold, then split on anything that is not a letter or digit."""
    if not text:
        return []
    text = unicodedata.normalize("NFC", unicodedata.normalize("NFC", text).casefold())
    return _TOKEN.findall(text)


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75

    def __post_init__(self):
        if not self.k1 >= 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float


class Bm25Index:
    """Inverted index: term -> postings of (doc position, term frequency).

    Built once, then read-only. ``doc_ids`` keeps insertion order; postings
    refer to documents by their position in that list.
    """

    def __init__(self, doc_ids: list[str], postings: dict[str, list[tuple[int, int]]],
                 doc_len: list[int]):
        self.doc_ids = doc_ids
        self.postings = postings
        self.doc_len = doc_len
        self.N = len(doc_ids)
        self.avgdl = sum(doc_len) / self.N if self.N else 0.0
        self._pos = {d: i for i, d in enumerate(doc_ids)}
        if len(self._pos) != self.N:
            raise Bm25Error("duplicate doc id in index")
        self._len_arr = np.asarray(doc_len, dtype=np.float64)
        self._arrays: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        # Ranking order for tie-breaks: ascending doc id.
        self._id_rank = np.empty(self.N, dtype=np.int64)
        self._id_rank[sorted(range(self.N), key=doc_ids.__getitem__)] = np.arange(self.N)

    def __len__(self) -> int:
        return self.N

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._pos

    def position(self, doc_id: str) -> int:
        try:
            return self._pos[doc_id]
        except KeyError:
            raise Bm25Error(f"unknown doc id {doc_id!r}") from None

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def tf(self, term: str, doc_id: str) -> int:
        pos = self.position(doc_id)
        for p, f in self.postings.get(term, ()):
            if p == pos:
                return f
        return 0

    def idf(self, term: str) -> float:
        n = self.df(term)
        return math.log(1.0 + (self.N - n + 0.5) / (n + 0.5))

    def _term_arrays(self, term: str) -> tuple[np.ndarray, np.ndarray]:
        arr = self._arrays.get(term)
        if arr is None:
            plist = self.postings[term]
            arr = (np.fromiter((p for p, _ in plist), dtype=np.int64, count=len(plist)),
                   np.fromiter((f for _, f in plist), dtype=np.float64, count=len(plist)))
            self._arrays[term] = arr
        return arr

    def to_dict(self) -> dict:
        return {
            "version": INDEX_FORMAT_VERSION,
            "doc_ids": self.doc_ids,
            "doc_len": self.doc_len,
            "postings": {t: [[p, f] for p, f in pl] for t, pl in sorted(self.postings.items())},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Bm25Index":
        if obj.get("version") != INDEX_FORMAT_VERSION:
            raise Bm25Error(f"unsupported index version {obj.get('version')!r}")
        postings = {t: [(int(p), int(f)) for p, f in pl] for t, pl in obj["postings"].items()}
        return cls(list(obj["doc_ids"]), postings, [int(x) for x in obj["doc_len"]])

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> "Bm25Index":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def build_index(docs: Iterable[tuple[str, str]]) -> Bm25Index:
    """Index ``(doc_id, text)`` pairs; empty texts are kept with length 0."""
    doc_ids: list[str] = []
    doc_len: list[int] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    seen: set[str] = set()
    for doc_id, text in docs:
        if doc_id in seen:
            raise Bm25Error(f"duplicate doc id {doc_id!r}")
        seen.add(doc_id)
        pos = len(doc_ids)
        tokens = tokenize(text)
        doc_ids.append(doc_id)
        doc_len.append(len(tokens))
        for term, f in Counter(tokens).items():
            postings.setdefault(term, []).append((pos, f))
    return Bm25Index(doc_ids, postings, doc_len)


def _length_norm(index: Bm25Index, dl, params: Bm25Params):
    if index.avgdl == 0:
        # Every document is empty; no term can match, the value is irrelevant.
        return 1.0 - params.b
    return 1.0 - params.b + params.b * dl / index.avgdl


def score(index: Bm25Index, query: Sequence[str], doc_id: str,
          params: Bm25Params = Bm25Params()) -> float:
    """BM25 score of one document for an already tokenized query."""
    pos = index.position(doc_id)
    norm = _length_norm(index, index.doc_len[pos], params)
    total = 0.0
    for term, qf in Counter(query).items():
        f = index.tf(term, doc_id) if term in index.postings else 0
        if f == 0:
            continue
        total += qf * index.idf(term) * (f * (params.k1 + 1)) / (f + params.k1 * norm)
    return total


def score_all(index: Bm25Index, query: Sequence[str],
              params: Bm25Params = Bm25Params()) -> np.ndarray:
    """Scores for every document, in ``index.doc_ids`` order."""
    scores = np.zeros(index.N, dtype=np.float64)
    if index.N == 0:
        return scores
    norm = _length_norm(index, index._len_arr, params)
    for term, qf in Counter(query).items():
        if term not in index.postings:
            continue
        pos, f = index._term_arrays(term)
        scores[pos] += qf * index.idf(term) * (f * (params.k1 + 1)) / (f + params.k1 * norm[pos])
    return scores


def top_k(index: Bm25Index, query: str | Sequence[str], k: int,
          params: Bm25Params = Bm25Params(),
          restrict_to: Iterable[str] | None = None) -> list[ScoredDoc]:
    """Best ``k`` documents with a positive score, ties by ascending doc id.

    ``restrict_to`` limits the ranking to a candidate subset while keeping the
    collection statistics (N, document frequencies, avgdl) of the full index.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0 or index.N == 0:
        return []
    tokens = tokenize(query) if isinstance(query, str) else list(query)
    scores = score_all(index, tokens, params)
    mask = scores > 0
    if restrict_to is not None:
        allowed = np.zeros(index.N, dtype=bool)
        allowed[[index.position(d) for d in restrict_to]] = True
        mask &= allowed
    cand = np.flatnonzero(mask)
    if cand.size == 0:
        return []
    order = np.lexsort((index._id_rank[cand], -scores[cand]))[:k]
    return [ScoredDoc(index.doc_ids[i], float(scores[i])) for i in cand[order]]
