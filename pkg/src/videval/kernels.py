"""Standalone math kernels used by the metric implementations.

Text kernels (BLEU and the edit-distance family) operate on plain strings;
array kernels (cosine similarity, inception score) operate on numpy arrays.
Each kernel is kept free of harness types so it can be checked against an
independent brute-force oracle.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

import numpy as np


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokenization shared by the word-level kernels."""
    return text.lower().split()


def normalize_chars(text: str) -> str:
    """Lowercase and collapse runs of whitespace for character-level kernels."""
    return " ".join(text.lower().split())


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def bleu(reference: str, hypothesis: str, max_order: int = 4) -> float:
    """Sentence BLEU of `hypothesis` against a single `reference`.

    Uniform weights over n-gram orders 1..max_order with the standard
    brevity penalty. Orders for which the hypothesis has no n-grams are
    dropped from the geometric mean (effective-order rule); any remaining
    order with zero clipped matches makes the score 0.
    """
    ref = tokenize(reference)
    hyp = tokenize(hypothesis)
    if not hyp or not ref:
        return 0.0
    log_precisions = []
    for order in range(1, max_order + 1):
        hyp_ngrams = _ngram_counts(hyp, order)
        total = sum(hyp_ngrams.values())
        if total == 0:
            continue
        ref_ngrams = _ngram_counts(ref, order)
        matched = sum(min(count, ref_ngrams[gram]) for gram, count in hyp_ngrams.items())
        if matched == 0:
            return 0.0
        log_precisions.append(math.log(matched / total))
    if not log_precisions:
        return 0.0
    geo_mean = math.exp(sum(log_precisions) / len(log_precisions))
    brevity = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return brevity * geo_mean


def edit_distance(reference: Sequence, hypothesis: Sequence) -> int:
    """Levenshtein distance with unit costs, two-row dynamic programming."""
    if len(reference) < len(hypothesis):
        reference, hypothesis = hypothesis, reference
    previous = list(range(len(hypothesis) + 1))
    for i, ref_item in enumerate(reference, start=1):
        current = [i] + [0] * len(hypothesis)
        for j, hyp_item in enumerate(hypothesis, start=1):
            substitution = previous[j - 1] + (ref_item != hyp_item)
            current[j] = min(previous[j] + 1, current[j - 1] + 1, substitution)
        previous = current
    return previous[-1]


def word_error_rate(reference: str, hypothesis: str) -> float:
    """Word-level edit distance over reference length, clamped to [0, 1]."""
    ref = tokenize(reference)
    if not ref:
        raise ValueError("word_error_rate requires a non-empty reference")
    distance = edit_distance(ref, tokenize(hypothesis))
    return min(1.0, distance / len(ref))


def char_error_rate(reference: str, hypothesis: str) -> float:
    """Character-level edit distance over reference length, clamped to [0, 1]."""
    ref = normalize_chars(reference)
    if not ref:
        raise ValueError("char_error_rate requires a non-empty reference")
    distance = edit_distance(ref, normalize_chars(hypothesis))
    return min(1.0, distance / len(ref))


def normalized_edit_distance(reference: str, hypothesis: str) -> float:
    """Character-level edit distance over the longer string; in [0, 1] by construction."""
    ref = normalize_chars(reference)
    hyp = normalize_chars(hypothesis)
    longest = max(len(ref), len(hyp))
    if longest == 0:
        return 0.0
    return edit_distance(ref, hyp) / longest


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors; zero-norm input is a hard error."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"vector shapes differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(a, b) / (norm_a * norm_b))


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) in nats; terms with p == 0 contribute nothing."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    support = p > 0
    if np.any(q[support] <= 0):
        raise ValueError("KL divergence undefined: q vanishes on the support of p")
    return float(np.sum(p[support] * np.log(p[support] / q[support])))


def inception_score(probabilities: np.ndarray, splits: int = 1, atol: float = 1e-6) -> float:
    """exp of the mean sample-vs-marginal KL divergence over class distributions.

    `probabilities` is an (n_samples, n_classes) matrix of per-sample class
    distributions. With splits > 1 the samples are chunked in order, the
    score is computed per chunk against the chunk marginal, and the chunk
    scores are averaged.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] == 0:
        raise ValueError("probabilities must be a non-empty (n_samples, n_classes) matrix")
    if np.any(probs < 0):
        raise ValueError("probabilities must be non-negative")
    sums = probs.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > atol):
        worst = int(np.argmax(np.abs(sums - 1.0)))
        raise ValueError(f"row {worst} sums to {sums[worst]!r}, expected 1 +/- {atol}")
    if splits < 1:
        raise ValueError("splits must be >= 1")
    scores = []
    for chunk in np.array_split(probs, min(splits, probs.shape[0])):
        marginal = chunk.mean(axis=0)
        divergences = [kl_divergence(row, marginal) for row in chunk]
        scores.append(math.exp(float(np.mean(divergences))))
    return float(np.mean(scores))
