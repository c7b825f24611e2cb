"""Set-to-vector embeddings and classical classifiers for comparison runs.

All three embeddings canonicalize point order first (lexicographic sort of
the rows), so their outputs are bitwise identical under any reordering of
the stored points, not just equal up to float roundoff.

GeM is usually stated for non-negative features; point coordinates are
signed, so the power mean here is applied sign-preservingly in both
directions: m_d = sgn(u) |u|^(1/p) with u = mean_i sgn(x_id) |x_id|^p.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, EmptyClass, TooFewPoints
from .numerics import project_residual
from .pointset import PointSet
from .subspace import fit_basis


def _canonical_points(p: PointSet) -> np.ndarray:
    order = np.lexsort(p.points.T[::-1])  # sort rows by first coordinate, then second, ...
    return p.points[order]


@dataclass(frozen=True)
class SetEmbedding:
    kind: str
    vector: np.ndarray


def gem_embed(p: PointSet, power: float) -> SetEmbedding:
    """Sign-preserving generalized mean per coordinate; power 1 is the centroid."""
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    pts = _canonical_points(p)
    signed_pow = np.sign(pts) * np.abs(pts) ** power
    u = signed_pow.mean(axis=0)
    vec = np.sign(u) * np.abs(u) ** (1.0 / power)
    return SetEmbedding(f"gem{power:g}", vec)


def cov_embed(p: PointSet) -> SetEmbedding:
    """Coordinate mean plus the upper triangle of the sample covariance."""
    if p.n < 2:
        raise TooFewPoints("covariance needs at least 2 points")
    pts = _canonical_points(p)
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / (p.n - 1)
    iu = np.triu_indices(p.dim)
    return SetEmbedding("covpool", np.concatenate([mean, cov[iu]]))


def fsort_embed(p: PointSet, bins: int) -> SetEmbedding:
    """Per coordinate: sort descending and sample ``bins`` equispaced quantiles."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    pts = _canonical_points(p)
    sorted_desc = -np.sort(-pts, axis=0)
    positions = np.linspace(0.0, 1.0, bins) * (p.n - 1)
    lo = np.floor(positions).astype(int)
    hi = np.minimum(lo + 1, p.n - 1)
    frac = positions - lo
    blocks = sorted_desc[lo] * (1.0 - frac)[:, None] + sorted_desc[hi] * frac[:, None]
    return SetEmbedding(f"fsort{bins}", blocks.T.reshape(-1))


def multinomial_loss_grad(weights: np.ndarray, x: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy of softmax(W [x; 1]) plus an L2 penalty on non-bias weights.

    Returns (loss, gradient); the gradient is checked against central finite
    differences in the test suite.
    """
    m = x.shape[0]
    xb = np.hstack([x, np.ones((m, 1))])
    logits = xb @ weights.T
    logits -= logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    prob = exp / exp.sum(axis=1, keepdims=True)
    loss = -np.log(prob[np.arange(m), y] + 1e-300).mean()
    loss += 0.5 * l2 * float((weights[:, :-1] ** 2).sum())
    delta = prob
    delta[np.arange(m), y] -= 1.0
    grad = delta.T @ xb / m
    grad[:, :-1] += l2 * weights[:, :-1]
    return loss, grad


@dataclass(frozen=True)
class LinearClassifier:
    """Multinomial logistic regression; weights act on raw features with a bias column."""

    weights: np.ndarray  # (K, D+1)
    learning_rate: float
    l2: float
    max_iter: int


def fit_linear(
    embeddings: np.ndarray,
    labels,
    *,
    learning_rate: float = 1.0,
    l2: float = 1e-3,
    max_iter: int = 300,
) -> LinearClassifier:
    """Gradient descent with backtracking, so the loss never increases.

    Features are standardized internally (zero-variance features are left
    unscaled rather than rejected); the standardization is folded back into
    the stored weights, which therefore apply to raw features.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DegenerateInput(f"expected a non-empty (M, D) embedding matrix, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInput("embeddings contain NaN or Inf")
    if x.shape[0] != y.shape[0]:
        raise DegenerateInput("embedding and label counts differ")
    k = int(y.max()) + 1

    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    xs = (x - mu) / sd

    w = np.zeros((k, x.shape[1] + 1))
    loss, grad = multinomial_loss_grad(w, xs, y, l2)
    step = learning_rate
    for _ in range(max_iter):
        for _ in range(40):
            cand = w - step * grad
            cand_loss, cand_grad = multinomial_loss_grad(cand, xs, y, l2)
            if cand_loss <= loss:
                break
            step *= 0.5
        else:
            break
        w, loss, grad = cand, cand_loss, cand_grad
        if float(np.abs(grad).max()) < 1e-8:
            break

    # fold standardization into the weights: w_raw = w_std / sd, bias absorbs the shift
    raw = np.empty_like(w)
    raw[:, :-1] = w[:, :-1] / sd
    raw[:, -1] = w[:, -1] - (w[:, :-1] * (mu / sd)).sum(axis=1)
    return LinearClassifier(raw, learning_rate, l2, max_iter)


def predict_linear(clf: LinearClassifier, embeddings: np.ndarray) -> np.ndarray:
    x = np.asarray(embeddings, dtype=np.float64)
    xb = np.hstack([x, np.ones((x.shape[0], 1))])
    return np.argmax(xb @ clf.weights.T, axis=1).astype(np.int64)


def ns_on_embeddings(embeddings: np.ndarray, labels, variance_fraction: float) -> list:
    """One uncentered basis per class over that class's embedding columns."""
    x = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    bases = []
    for label in range(int(y.max()) + 1):
        cols = x[y == label].T
        if cols.shape[1] == 0:
            raise EmptyClass(f"no samples with label {label}")
        basis, _ = fit_basis(cols, variance_fraction)
        bases.append(basis)
    return bases


def predict_ns(bases: list, embeddings: np.ndarray) -> np.ndarray:
    x = np.asarray(embeddings, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.int64)
    for i, row in enumerate(x):
        residuals = [project_residual(row, b) for b in bases]
        out[i] = int(np.argmin(residuals))
    return out
