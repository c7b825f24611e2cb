"""Affine deformations, synthetic class generation, and reference construction.

A class is modeled as one template point set observed under random affine
maps: per-axis log-uniform scaling, uniform shear factors, and a uniform
translation, optionally followed by per-point Gaussian jitter. The linear
part composes as Shear @ Scale (fixed order). Magnitudes are meant to be
read relative to unit-normalized templates.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, EmptyClass, SingularDraw, SingularMap
from .pointset import LabeledDataset, PointSet
from .seeding import substream

MIN_DETERMINANT = 1e-12


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + shift, with invertible linear part."""

    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=np.float64)
        sh = np.asarray(self.shift, dtype=np.float64)
        if lin.ndim != 2 or lin.shape[0] != lin.shape[1] or sh.shape != (lin.shape[0],):
            raise DimensionMismatch(
                f"incompatible affine shapes: linear {lin.shape}, shift {sh.shape}"
            )
        if not (np.all(np.isfinite(lin)) and np.all(np.isfinite(sh))):
            raise SingularMap("affine map contains NaN or Inf")
        if abs(np.linalg.det(lin)) <= MIN_DETERMINANT:
            raise SingularMap("linear part is singular; map must be one-to-one")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "shift", sh)

    @property
    def dim(self) -> int:
        return self.shift.shape[0]


def compose(outer: AffineMap, inner: AffineMap) -> AffineMap:
    """The map x -> outer(inner(x))."""
    return AffineMap(outer.linear @ inner.linear, outer.linear @ inner.shift + outer.shift)


def identity_map(dim: int) -> AffineMap:
    return AffineMap(np.eye(dim), np.zeros(dim))


@dataclass(frozen=True)
class DeformationConfig:
    """Magnitude bounds for one deformation family draw.

    translate_max: per-axis uniform bound on the shift.
    scale_max: per-axis scale factors are log-uniform in [1/scale_max, scale_max].
    shear_max: per-entry uniform bound on off-diagonal shear factors.
    jitter_std: isotropic Gaussian noise added per point after the map.
    """

    translate_max: float = 1.0
    scale_max: float = 2.0
    shear_max: float = 0.25
    jitter_std: float = 0.0

    def __post_init__(self):
        if self.translate_max < 0 or self.shear_max < 0 or self.jitter_std < 0:
            raise SingularMap("deformation magnitudes must be non-negative")
        if self.scale_max < 1:
            raise SingularMap("scale_max must be >= 1")

    def scaled(self, factor: float) -> "DeformationConfig":
        """Scale all magnitudes by ``factor`` (scale bound scales in log domain)."""
        return DeformationConfig(
            translate_max=self.translate_max * factor,
            scale_max=self.scale_max ** factor,
            shear_max=self.shear_max * factor,
            jitter_std=self.jitter_std * factor,
        )


def sample_affine(rng: np.random.Generator, cfg: DeformationConfig, dim: int) -> AffineMap:
    """Draw one random affine map; resamples a singular linear part."""
    log_bound = math.log(cfg.scale_max)
    for _ in range(100):
        scale = np.exp(rng.uniform(-log_bound, log_bound, dim))
        shear = np.eye(dim)
        off = ~np.eye(dim, dtype=bool)
        shear[off] = rng.uniform(-cfg.shear_max, cfg.shear_max, dim * (dim - 1))
        linear = shear @ np.diag(scale)
        if abs(np.linalg.det(linear)) > MIN_DETERMINANT:
            shift = rng.uniform(-cfg.translate_max, cfg.translate_max, dim)
            return AffineMap(linear, shift)
    raise SingularDraw("100 consecutive singular linear parts")


def apply_affine(g: AffineMap, p: PointSet) -> PointSet:
    """Push every point through the map."""
    if g.dim != p.dim:
        raise DimensionMismatch(f"map is {g.dim}-D but points are {p.dim}-D")
    return PointSet(p.points @ g.linear.T + g.shift)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic train/test pair: one template per class."""

    templates: tuple
    n_train: int
    n_test: int
    config_train: DeformationConfig
    config_test: DeformationConfig
    seed: int

    def __post_init__(self):
        if not self.templates:
            raise EmptyClass("no templates")
        dims = {t.dim for t in self.templates}
        if len(dims) > 1:
            raise DimensionMismatch(f"templates mix dimensions {sorted(dims)}")
        if self.n_train < 1 or self.n_test < 1:
            raise SingularMap("n_train and n_test must be >= 1")
        object.__setattr__(self, "templates", tuple(self.templates))

    def with_test_config(self, cfg: DeformationConfig) -> "SynthSpec":
        return replace(self, config_test=cfg)


def _generate_split(spec: SynthSpec, tag: str, count: int, cfg: DeformationConfig):
    samples, labels = [], []
    for k, template in enumerate(spec.templates):
        rng = substream(spec.seed, tag, k)
        for _ in range(count):
            g = sample_affine(rng, cfg, template.dim)
            pts = apply_affine(g, template).points
            if cfg.jitter_std > 0:
                pts = pts + rng.normal(0.0, cfg.jitter_std, pts.shape)
            samples.append(PointSet(pts))
            labels.append(k)
    return LabeledDataset(samples, labels)


def synth_dataset(spec: SynthSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Generate (train, test); per-class and per-split streams are independent."""
    train = _generate_split(spec, "train", spec.n_train, spec.config_train)
    test = _generate_split(spec, "test", spec.n_test, spec.config_test)
    return train, test


def mean_nn_distance(p: PointSet) -> float:
    """Mean over points of the Euclidean distance to the nearest other point."""
    if p.n < 2:
        return 0.0
    diff = p.points[:, None, :] - p.points[None, :, :]
    d2 = np.einsum("ijd,ijd->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min(axis=1)).mean())


def make_reference(
    train: LabeledDataset, label: int, jitter_scale: float, rng: np.random.Generator
) -> PointSet:
    """Pick a random class sample and perturb it.

    The perturbation std is jitter_scale times the sample's mean
    nearest-neighbor distance; it breaks assignment ties and duplicate
    points without moving the reference off the class geometry.
    """
    idx = train.class_indices(label)
    base = train.samples[idx[int(rng.integers(len(idx)))]]
    std = jitter_scale * mean_nn_distance(base)
    return PointSet(base.points + rng.normal(0.0, std, base.points.shape))


TEMPLATE_POSITION_NORM = 0.5


def sample_template(rng: np.random.Generator, n: int, dim: int) -> PointSet:
    """Draw a random cluster-mixture template shape at unit scale.

    Scale is normalized to unit root-mean-square radius about the centroid
    so deformation magnitudes are comparable across templates. The centroid
    is placed at a random direction of fixed modest norm: template position
    is part of the shape (first-moment features stay informative) without
    dominating the embedding energy.
    """
    n_clusters = int(rng.integers(2, 6))
    centers = rng.normal(0.0, 1.0, (n_clusters, dim))
    spreads = np.exp(rng.normal(math.log(0.25), 0.4, n_clusters))
    assign = rng.integers(0, n_clusters, n)
    pts = centers[assign] + rng.normal(0.0, 1.0, (n, dim)) * spreads[assign][:, None]
    mean = pts.mean(axis=0)
    centered = pts - mean
    rms = math.sqrt(float((centered * centered).sum() / n))
    if rms > 0:
        centered = centered / rms
    norm = float(np.linalg.norm(mean))
    position = mean / norm * TEMPLATE_POSITION_NORM if norm > 0 else np.zeros(dim)
    return PointSet(position + centered)


def default_templates(classes: int, n: int, dim: int, seed: int) -> tuple:
    """One template per class, each from its own substream of ``seed``."""
    return tuple(
        sample_template(substream(seed, "template", k), n, dim) for k in range(classes)
    )
