"""Consensus captioning metric (CIDEr-D variant).

Per image, candidate and reference captions become TF-IDF n-gram
vectors for n = 1..4; the score averages, over references and n, the
Gaussian-length-penalized cosine similarity with candidate counts
clipped at the reference counts, scaled by 10. IDF comes from the
reference corpus only, with document frequency floored at 1 so
out-of-corpus n-grams are well-defined.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyCorpus, MissingReferences
from .textnorm import tokenize_words

MAX_N = 4
SIGMA = 6.0
SCALE = 10.0

Ngram = tuple[str, ...]


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of contiguous n-grams; max(0, len - n + 1) total."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}]")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass
class DocFreqIndex:
    """Document frequencies of reference n-grams, for IDF weighting."""

    doc_freq: dict[Ngram, int]
    corpus_size: int

    def idf(self, gram: Ngram) -> float:
        return math.log(self.corpus_size) - math.log(max(1, self.doc_freq.get(gram, 0)))


@dataclass
class CiderScore:
    per_image: dict[str, float]
    corpus_mean: float

    @property
    def display(self) -> float:
        """Leaderboard convention: mean scaled by 100."""
        return self.corpus_mean * 100.0


def build_tfidf_index(references: Mapping[str, Sequence[str]]) -> DocFreqIndex:
    """df(g) = number of images whose reference set contains g."""
    if not references:
        raise EmptyCorpus("reference corpus has no images")
    doc_freq: dict[Ngram, int] = {}
    for refs in references.values():
        grams: set[Ngram] = set()
        for ref in refs:
            tokens = tokenize_words(ref)
            for n in range(1, MAX_N + 1):
                grams.update(ngram_counts(tokens, n))
        for gram in grams:
            doc_freq[gram] = doc_freq.get(gram, 0) + 1
    return DocFreqIndex(doc_freq=doc_freq, corpus_size=len(references))


def _tfidf_vector(
    tokens: Sequence[str], index: DocFreqIndex
) -> tuple[list[dict[Ngram, float]], list[float], int]:
    """Per-n TF-IDF maps, their norms, and the token length."""
    vecs: list[dict[Ngram, float]] = []
    norms: list[float] = []
    for n in range(1, MAX_N + 1):
        vec = {
            gram: count * index.idf(gram)
            for gram, count in ngram_counts(tokens, n).items()
        }
        vecs.append(vec)
        norms.append(math.sqrt(sum(w * w for w in vec.values())))
    return vecs, norms, len(tokens)


def cider_d(
    candidates: Mapping[str, str],
    references: Mapping[str, Sequence[str]],
    index: DocFreqIndex | None = None,
) -> CiderScore:
    """Score one candidate caption per image against its references."""
    if index is None:
        index = build_tfidf_index(references)
    per_image: dict[str, float] = {}
    for image_id, candidate in candidates.items():
        refs = references.get(image_id)
        if not refs:
            raise MissingReferences(image_id)
        cand_vecs, cand_norms, cand_len = _tfidf_vector(tokenize_words(candidate), index)
        acc = [0.0] * MAX_N
        for ref in refs:
            ref_vecs, ref_norms, ref_len = _tfidf_vector(tokenize_words(ref), index)
            penalty = math.exp(-((cand_len - ref_len) ** 2) / (2.0 * SIGMA * SIGMA))
            for i in range(MAX_N):
                if cand_norms[i] == 0.0 or ref_norms[i] == 0.0:
                    continue
                ref_vec = ref_vecs[i]
                dot = 0.0
                for gram, weight in cand_vecs[i].items():
                    ref_weight = ref_vec.get(gram, 0.0)
                    if ref_weight:
                        dot += min(weight, ref_weight) * ref_weight
                acc[i] += penalty * dot / (cand_norms[i] * ref_norms[i])
        score = SCALE / MAX_N * sum(s / len(refs) for s in acc)
        per_image[image_id] = score
    mean = sum(per_image.values()) / len(per_image) if per_image else 0.0
    return CiderScore(per_image=per_image, corpus_mean=mean)
