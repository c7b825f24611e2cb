"""Nearest-subspace classifier in the transport embedding space.

Training, per class: embed every training sample against a per-class
reference, collect the flattened embeddings as columns, optionally append
invariance spanning vectors, and keep the leading left singular vectors
as an orthonormal basis. No mean-centering anywhere: scalar multiples of
an embedding must stay inside its subspace (isotropic scaling needs no
spanning vectors), so subspaces pass through the origin.

Spanning vector families, in the point-major flat layout:

* translation: L vectors, vector d puts a 1 in coordinate-d of every point;
  shifts of an embedding move it along these directions.
* aniso_scale: per embedding, L vectors, vector d keeps only column d;
  positive-diagonal scalings of the embedding live in their span.
* shear: per embedding, L(L-1) vectors, vector (i, j) places column j in
  column i; together with the embedding itself they absorb shear factors.

Prediction embeds the test sample once per class (against that class's
reference) and returns the class with the smallest squared projection
residual.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CardinalityMismatch, DimensionMismatch, EmptyClass, ZeroMatrix
from .numerics import numerical_rank, project_residual, svd
from .pointset import LabeledDataset, PointSet, flatten
from .seeding import substream
from .transport import LotEmbedding, _check_embedding_pair, lot_transform
from .deform import make_reference

TRANSLATION = "translation"
ANISO_SCALE = "aniso_scale"
SHEAR = "shear"
ALL_FLAGS = (TRANSLATION, ANISO_SCALE, SHEAR)


def canonical_flags(flags) -> tuple:
    flags = set(flags)
    unknown = flags - set(ALL_FLAGS)
    if unknown:
        raise ValueError(f"unknown invariance flags: {sorted(unknown)}")
    return tuple(f for f in ALL_FLAGS if f in flags)


@dataclass(frozen=True)
class SpanningSet:
    kind: str
    vectors: np.ndarray  # one flat vector per row


def translation_vectors(n: int, dim: int) -> np.ndarray:
    vecs = np.zeros((dim, n * dim))
    for d in range(dim):
        vecs[d, d::dim] = 1.0
    return vecs


def scale_vectors(matrix: np.ndarray) -> np.ndarray:
    n, dim = matrix.shape
    vecs = np.zeros((dim, n * dim))
    for d in range(dim):
        masked = np.zeros((n, dim))
        masked[:, d] = matrix[:, d]
        vecs[d] = masked.reshape(-1)
    return vecs


def shear_vectors(matrix: np.ndarray) -> np.ndarray:
    n, dim = matrix.shape
    vecs = np.zeros((dim * (dim - 1), n * dim))
    row = 0
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            placed = np.zeros((n, dim))
            placed[:, i] = matrix[:, j]
            vecs[row] = placed.reshape(-1)
            row += 1
    return vecs


def build_invariance_vectors(e: LotEmbedding, flags) -> list[SpanningSet]:
    """The enabled spanning sets for one embedding, in canonical order."""
    flags = canonical_flags(flags)
    out = []
    if TRANSLATION in flags:
        out.append(SpanningSet(TRANSLATION, translation_vectors(e.n, e.dim)))
    if ANISO_SCALE in flags:
        out.append(SpanningSet(ANISO_SCALE, scale_vectors(e.matrix)))
    if SHEAR in flags:
        out.append(SpanningSet(SHEAR, shear_vectors(e.matrix)))
    return out


def assemble_class_matrix(embeddings, flags) -> np.ndarray:
    """Stack training columns: embeddings, then translation vectors once,
    then per-embedding scale vectors, then per-embedding shear vectors."""
    if not embeddings:
        raise EmptyClass("no embeddings to assemble")
    first = embeddings[0]
    for e in embeddings[1:]:
        _check_embedding_pair(first, e)
    flags = canonical_flags(flags)
    cols = [flatten(e.matrix) for e in embeddings]
    if TRANSLATION in flags:
        cols.extend(translation_vectors(first.n, first.dim))
    if ANISO_SCALE in flags:
        for e in embeddings:
            cols.extend(scale_vectors(e.matrix))
    if SHEAR in flags:
        for e in embeddings:
            cols.extend(shear_vectors(e.matrix))
    return np.column_stack(cols)


def fit_basis(a: np.ndarray, variance_fraction: float) -> tuple[np.ndarray, float]:
    """Leading left singular vectors covering the requested share of total
    squared singular value mass; returns (basis, achieved fraction)."""
    a = np.asarray(a, dtype=np.float64)
    if not 0 < variance_fraction <= 1:
        raise ValueError(f"variance_fraction must be in (0, 1], got {variance_fraction}")
    result = svd(a)
    s2 = result.singular_values**2
    total = float(s2.sum())
    if total == 0.0:
        raise ZeroMatrix("cannot fit a basis to an all-zero matrix")
    rank = numerical_rank(result.singular_values, *a.shape)
    cum = np.cumsum(s2) / total
    m = int(np.searchsorted(cum, variance_fraction - 1e-15) + 1)
    m = min(m, rank)
    return result.left_vectors[:, :m].copy(), float(cum[m - 1])


@dataclass(frozen=True)
class ClassSubspace:
    class_label: int
    reference: PointSet
    basis: np.ndarray  # (n*dim, m), column-orthonormal
    explained_variance_fraction: float


@dataclass(frozen=True)
class LotNsModel:
    subspaces: tuple
    flags: tuple
    variance_fraction: float

    @property
    def k(self) -> int:
        return len(self.subspaces)

    @property
    def n(self) -> int:
        return self.subspaces[0].reference.n

    @property
    def dim(self) -> int:
        return self.subspaces[0].reference.dim


def train(
    dataset: LabeledDataset,
    *,
    flags=ALL_FLAGS,
    variance_fraction: float = 0.99,
    ref_jitter: float = 0.1,
    seed: int = 0,
) -> LotNsModel:
    """Fit one enriched subspace per class.

    Deterministic given ``seed``: each class's reference comes from its own
    named substream, so classes can be fit in any order (or in parallel)
    with identical results.
    """
    flags = canonical_flags(flags)
    if not dataset.samples:
        raise EmptyClass("empty training dataset")
    counts = {s.n for s in dataset.samples}
    if len(counts) > 1:
        raise CardinalityMismatch(
            f"training samples mix point counts {sorted(counts)}; resample on load"
        )
    subspaces = []
    for label in range(dataset.k):
        rng = substream(seed, "reference", label)
        reference = make_reference(dataset, label, ref_jitter, rng)
        embeddings = [
            lot_transform(dataset.samples[i], reference)
            for i in dataset.class_indices(label)
        ]
        matrix = assemble_class_matrix(embeddings, flags)
        basis, achieved = fit_basis(matrix, variance_fraction)
        subspaces.append(ClassSubspace(label, reference, basis, achieved))
    return LotNsModel(tuple(subspaces), flags, variance_fraction)


def predict(p: PointSet, model: LotNsModel) -> tuple[int, np.ndarray]:
    """Class with the smallest squared residual, plus all K residuals."""
    if p.n != model.n:
        raise CardinalityMismatch(f"model expects {model.n} points, got {p.n}")
    if p.dim != model.dim:
        raise DimensionMismatch(f"model expects dimension {model.dim}, got {p.dim}")
    scores = np.empty(model.k)
    for i, sub in enumerate(model.subspaces):
        embedding = lot_transform(p, sub.reference)
        scores[i] = project_residual(flatten(embedding.matrix), sub.basis)
    return int(np.argmin(scores)), scores


def predict_many(samples, model: LotNsModel, workers: int | None = None) -> np.ndarray:
    """Predict a batch; samples are independent, so they run on a thread pool
    (the assignment kernel releases the GIL). Output order follows input order
    and is identical to sequential prediction."""
    samples = list(samples)
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    if workers <= 1 or len(samples) < 4:
        return np.array([predict(p, model)[0] for p in samples], dtype=np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        labels = list(pool.map(lambda p: predict(p, model)[0], samples))
    return np.array(labels, dtype=np.int64)
