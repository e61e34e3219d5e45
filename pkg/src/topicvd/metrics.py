"""Corpus-level 4-gram BLEU and the SSIM image-similarity primitive."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import MetricError


@dataclass(frozen=True)
class BleuReport:
    """Corpus BLEU in [0, 1] with its ingredients.

    ``precisions`` holds the modified n-gram precisions for n=1..4; orders
    with no n-grams in the whole hypothesis corpus are reported as 0 and
    excluded from the geometric mean.
    """

    bleu: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int

    @property
    def percent(self) -> float:
        return 100.0 * self.bleu


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(
    hypotheses: list[list[str]],
    references: list[list[str]],
    smooth_eps: float = 0.0,
) -> BleuReport:
    """Corpus-level BLEU with clipped n-gram counts, n=1..4, single reference.

    With smoothing off (the default) any counted order with zero matches
    makes the score 0; ``smooth_eps`` substitutes a small epsilon for zero
    match counts, for desk-scale corpora.
    """
    if len(hypotheses) != len(references):
        raise MetricError(
            f"hypothesis/reference length mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise MetricError("empty corpus")
    if smooth_eps < 0:
        raise MetricError("smooth_eps must be non-negative")

    matches = [0] * 4
    totals = [0] * 4
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, 5):
            hyp_counts = _ngram_counts(hyp, n)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            totals[n - 1] += sum(hyp_counts.values())
            matches[n - 1] += sum((hyp_counts & ref_counts).values())

    precisions = tuple(m / t if t else 0.0 for m, t in zip(matches, totals))

    if hyp_len == 0:
        return BleuReport(0.0, precisions, 0.0, hyp_len, ref_len)
    brevity_penalty = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)

    log_sum = 0.0
    counted = 0
    for m, t in zip(matches, totals):
        if t == 0:
            continue
        counted += 1
        if m == 0:
            if smooth_eps > 0:
                m = smooth_eps
            else:
                return BleuReport(0.0, precisions, brevity_penalty, hyp_len, ref_len)
        log_sum += math.log(m / t)
    bleu = brevity_penalty * math.exp(log_sum / counted) if counted else 0.0
    return BleuReport(bleu, precisions, brevity_penalty, hyp_len, ref_len)


def tokenize(line: str, lang: str = "en", lowercase: bool = False) -> list[str]:
    """Whitespace tokens for English, characters for Chinese."""
    if lowercase:
        line = line.lower()
    if lang == "zh":
        return [ch for ch in line if not ch.isspace()]
    return line.split()


def ssim(
    a: np.ndarray,
    b: np.ndarray,
    window: int = 8,
    k1: float = 0.01,
    k2: float = 0.03,
    data_range: float = 1.0,
) -> float:
    """Mean structural similarity over all ``window x window`` patches.

    Uniform sliding window, population moments, stabilizing constants
    ``C1=(k1*L)^2`` and ``C2=(k2*L)^2`` with dynamic range ``L``. The window
    shrinks to fit images smaller than ``window`` on either side.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape != b.shape:
        raise MetricError(f"ssim needs equal-shape 2-D images, got {a.shape} and {b.shape}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise MetricError("ssim input contains non-finite entries")
    w = min(window, *a.shape)
    if w < 1:
        raise MetricError("ssim window must cover at least one pixel")

    wa = sliding_window_view(a, (w, w))
    wb = sliding_window_view(b, (w, w))
    mu_a = wa.mean(axis=(-2, -1))
    mu_b = wb.mean(axis=(-2, -1))
    var_a = (wa * wa).mean(axis=(-2, -1)) - mu_a * mu_a
    var_b = (wb * wb).mean(axis=(-2, -1)) - mu_b * mu_b
    cov = (wa * wb).mean(axis=(-2, -1)) - mu_a * mu_b

    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))
