"""Point sets, labeled datasets, and the flattening convention.

A point set is an ordered list of N points in R^L with uniform mass 1/N.
Storage order is significant only for serialization; every transport
derived quantity is invariant to it. Flattening is point-major: entry
``i * dim + d`` of a flat vector holds coordinate ``d`` of point ``i``,
which makes the subspace algebra's column masks simple strides.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionZero,
    EmptyClass,
    EmptyPointSet,
    InvalidPermutation,
    LabelGap,
    NonFiniteCoordinate,
    ShapeMismatch,
)

# Coordinates this large would overflow squared-distance costs; reject early.
MAX_COORDINATE = 1e100


def _checked_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ShapeMismatch(f"expected an (N, L) array, got shape {pts.shape}")
    if pts.shape[0] == 0:
        raise EmptyPointSet("point set has no points")
    if pts.shape[1] == 0:
        raise DimensionZero("points have dimension zero")
    if not np.all(np.isfinite(pts)):
        raise NonFiniteCoordinate("point set contains NaN or Inf")
    if np.abs(pts).max() > MAX_COORDINATE:
        raise NonFiniteCoordinate(
            f"coordinate magnitude exceeds {MAX_COORDINATE:g}; "
            "squared-distance costs would overflow"
        )
    return pts


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable ordered set of N points in R^L."""

    points: np.ndarray

    def __post_init__(self):
        pts = _checked_points(self.points).copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def validate(p: PointSet) -> None:
    """Re-check the PointSet invariants; raises on violation."""
    _checked_points(p.points)


def flatten(m: np.ndarray) -> np.ndarray:
    """Flatten an (N, L) matrix to length N*L, point-major."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected an (N, L) matrix, got shape {m.shape}")
    return m.reshape(-1).copy()


def unflatten(v: np.ndarray, n: int, dim: int) -> np.ndarray:
    """Inverse of :func:`flatten`."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size != n * dim:
        raise ShapeMismatch(f"expected a flat vector of length {n * dim}, got shape {v.shape}")
    return v.reshape(n, dim).copy()


def permute_points(p: PointSet, perm) -> PointSet:
    """Reorder the stored points; the multiset of points is unchanged."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (p.n,) or not np.array_equal(np.sort(perm), np.arange(p.n)):
        raise InvalidPermutation(f"not a bijection on 0..{p.n - 1}")
    return PointSet(p.points[perm])


@dataclass
class LabeledDataset:
    """Point sets with integer class labels 0..K-1."""

    samples: list[PointSet]
    labels: list[int] = field(default_factory=list)

    def __post_init__(self):
        if len(self.samples) != len(self.labels):
            raise ShapeMismatch("samples and labels differ in length")
        dims = {s.dim for s in self.samples}
        if len(dims) > 1:
            raise ShapeMismatch(f"samples mix dimensions {sorted(dims)}")
        self.labels = [int(x) for x in self.labels]
        if any(x < 0 for x in self.labels):
            raise LabelGap("negative class label")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def k(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    @property
    def dim(self) -> int:
        return self.samples[0].dim

    def class_indices(self, label: int) -> list[int]:
        idx = [i for i, y in enumerate(self.labels) if y == label]
        if not idx:
            raise EmptyClass(f"no samples with label {label}")
        return idx

    def subset(self, indices) -> "LabeledDataset":
        indices = [int(i) for i in indices]
        return LabeledDataset(
            [self.samples[i] for i in indices], [self.labels[i] for i in indices]
        )
