"""Cross-modal fusion kernels over text and video feature matrices.

Pure numpy reference implementations: selective attention pooling of video
features into the text sequence, raw alignment score grids, and symmetric
bi-directional attention enhancement. Each kernel has a closed-form
gradient of its output sum, checked against central differences by
``numeric_gradient_check``.

Feature matrices are float arrays with one row per time step and a shared
feature dimension d; score scaling uses 1/sqrt(d) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FusionError


def _check_features(name: str, matrix: np.ndarray) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise FusionError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FusionError(f"{name} contains non-finite values")
    return arr


def _check_pair(text: np.ndarray, video: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = _check_features("text", text)
    v = _check_features("video", video)
    if t.shape[1] != v.shape[1]:
        raise FusionError(
            f"feature dimensions differ: text d={t.shape[1]}, video d={v.shape[1]}"
        )
    return t, v


def softmax(scores: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax along one axis."""
    arr = np.asarray(scores, dtype=np.float64)
    shifted = arr - arr.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=axis, keepdims=True)


def selective_attention(text: np.ndarray, video: np.ndarray) -> np.ndarray:
    """Pool video features into each text step by scaled dot-product attention.

    Returns an (N, d) matrix: softmax(T V^T / sqrt(d)) V.
    """
    t, v = _check_pair(text, video)
    d = t.shape[1]
    weights = softmax(t @ v.T / math.sqrt(d), axis=1)
    return weights @ v


GATE_FUNCTIONS = {
    "identity": lambda raw, d: raw,
    "scaled": lambda raw, d: raw / math.sqrt(d),
}


def alignment_scores(hidden: np.ndarray, anchors: np.ndarray, g: str = "identity") -> np.ndarray:
    """Raw alignment grid S[n, l] = g(h_n . a_l) between two feature sets."""
    h, a = _check_pair(hidden, anchors)
    if g not in GATE_FUNCTIONS:
        raise FusionError(f"unknown score transform {g!r}, expected one of {sorted(GATE_FUNCTIONS)}")
    return GATE_FUNCTIONS[g](h @ a.T, h.shape[1])


@dataclass(frozen=True)
class FusionOutput:
    text_enhanced: np.ndarray
    video_enhanced: np.ndarray
    weights_t2v: np.ndarray  # (N, L), rows sum to 1
    weights_v2t: np.ndarray  # (N, L), columns sum to 1


def bi_attention(text: np.ndarray, video: np.ndarray, g: str = "identity") -> FusionOutput:
    """Enhance both modalities with attention over a shared alignment grid.

    The grid S[n, l] = g(h_n . a_l) feeds two softmaxes: row-wise weights
    send video features to text (text + W_t2v V), column-wise weights send
    text features to video (video + W_v2t^T T).
    """
    t, v = _check_pair(text, video)
    scores = alignment_scores(t, v, g=g)
    weights_t2v = softmax(scores, axis=1)
    weights_v2t = softmax(scores, axis=0)
    return FusionOutput(
        text_enhanced=t + weights_t2v @ v,
        video_enhanced=v + weights_v2t.T @ t,
        weights_t2v=weights_t2v,
        weights_v2t=weights_v2t,
    )


def _selective_grads(t: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Gradient of sum(selective_attention(T, V)) via the softmax Jacobian:
    # dF/dS[n,k] = W[n,k] (sv[k] - (W sv)[n]) with sv the row sums of V.
    d = t.shape[1]
    scale = 1.0 / math.sqrt(d)
    weights = softmax(t @ v.T * scale, axis=1)
    sv = v.sum(axis=1)
    g_scores = weights * (sv[None, :] - (weights @ sv)[:, None])
    grad_t = g_scores @ v * scale
    grad_v = g_scores.T @ t * scale + weights.sum(axis=0)[:, None]
    return grad_t, grad_v


def _alignment_grads(h: np.ndarray, a: np.ndarray, g: str) -> tuple[np.ndarray, np.ndarray]:
    scale = 1.0 if g == "identity" else 1.0 / math.sqrt(h.shape[1])
    grad_h = np.tile(a.sum(axis=0) * scale, (h.shape[0], 1))
    grad_a = np.tile(h.sum(axis=0) * scale, (a.shape[0], 1))
    return grad_h, grad_a


def _bi_attention_grads(t: np.ndarray, v: np.ndarray, g: str) -> tuple[np.ndarray, np.ndarray]:
    # F = sum(text_enhanced) + sum(video_enhanced). The two softmaxes share
    # the score matrix, so their Jacobian terms add before backing through S.
    scale = 1.0 if g == "identity" else 1.0 / math.sqrt(t.shape[1])
    scores = t @ v.T * scale
    wt = softmax(scores, axis=1)
    wv = softmax(scores, axis=0)
    sv = v.sum(axis=1)
    st = t.sum(axis=1)
    g_scores = wt * (sv[None, :] - (wt @ sv)[:, None])
    g_scores += wv * (st[:, None] - (st @ wv)[None, :])
    grad_t = np.ones_like(t) + wv.sum(axis=1)[:, None] + g_scores @ v * scale
    grad_v = np.ones_like(v) + wt.sum(axis=0)[:, None] + g_scores.T @ t * scale
    return grad_t, grad_v


def _bi_objective(t: np.ndarray, v: np.ndarray, g: str) -> float:
    out = bi_attention(t, v, g=g)
    return float(out.text_enhanced.sum() + out.video_enhanced.sum())


_KERNELS = {
    "selective_attention": (
        lambda t, v, g: float(selective_attention(t, v).sum()),
        lambda t, v, g: _selective_grads(t, v),
    ),
    "alignment_scores": (
        lambda t, v, g: float(alignment_scores(t, v, g=g).sum()),
        lambda t, v, g: _alignment_grads(t, v, g),
    ),
    "bi_attention": (
        _bi_objective,
        _bi_attention_grads,
    ),
}


@dataclass(frozen=True)
class GradientCheck:
    kernel: str
    max_rel_error_text: float
    max_rel_error_video: float

    @property
    def max_rel_error(self) -> float:
        return max(self.max_rel_error_text, self.max_rel_error_video)


def numeric_gradient_check(
    kernel: str,
    text: np.ndarray,
    video: np.ndarray,
    eps: float = 1e-5,
    g: str = "identity",
) -> GradientCheck:
    """Compare a kernel's closed-form gradients against central differences.

    The scalar under test is the sum of the kernel's outputs. Relative error
    per entry uses denominator max(|analytic|, |numeric|, 1) so zero-gradient
    entries compare absolutely.
    """
    if kernel not in _KERNELS:
        raise FusionError(f"unknown kernel {kernel!r}, expected one of {sorted(_KERNELS)}")
    if not (math.isfinite(eps) and 0 < eps <= 1e-2):
        raise FusionError(f"eps must lie in (0, 1e-2], got {eps!r}")
    t, v = _check_pair(text, video)
    objective, grads = _KERNELS[kernel]
    grad_t, grad_v = grads(t, v, g)

    errors = []
    for arr, grad in ((t, grad_t), (v, grad_v)):
        numeric = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            saved = arr[idx]
            arr[idx] = saved + eps
            upper = objective(t, v, g)
            arr[idx] = saved - eps
            lower = objective(t, v, g)
            arr[idx] = saved
            numeric[idx] = (upper - lower) / (2.0 * eps)
        if not (np.all(np.isfinite(numeric)) and np.all(np.isfinite(grad))):
            raise FusionError(f"non-finite gradient encountered in {kernel}")
        denom = np.maximum(np.maximum(np.abs(grad), np.abs(numeric)), 1.0)
        errors.append(float(np.max(np.abs(grad - numeric) / denom)))
    return GradientCheck(kernel=kernel, max_rel_error_text=errors[0], max_rel_error_video=errors[1])


def write_matrix(matrix: np.ndarray, path: str | Path):
    """Plain-text matrix: 'rows cols' header then one whitespace row per line."""
    arr = _check_features("matrix", matrix)
    lines = [f"{arr.shape[0]} {arr.shape[1]}"]
    lines.extend(" ".join(f"{x:.9g}" for x in row) for row in arr)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path: str | Path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise FusionError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise FusionError(f"{path}: header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise FusionError(f"{path}: header must be 'rows cols', got {lines[0]!r}") from None
    if rows < 1 or cols < 1 or len(lines) - 1 != rows:
        raise FusionError(f"{path}: expected {rows} rows of {cols} values")
    try:
        arr = np.array([[float(x) for x in line.split()] for line in lines[1:]], dtype=np.float64)
    except ValueError as exc:
        raise FusionError(f"{path}: bad matrix value: {exc}") from None
    if arr.shape != (rows, cols):
        raise FusionError(f"{path}: expected shape ({rows}, {cols}), got {arr.shape}")
    return _check_features(str(path), arr)
