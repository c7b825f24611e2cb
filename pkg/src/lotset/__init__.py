"""Point set classification with linear optimal transport subspaces.

Embeds equal-size point sets by solving exact assignment problems against
per-class references, enriches each class's span with explicit
translation / anisotropic-scaling / shear invariance vectors, and
classifies by nearest subspace. Ships a synthetic affine-deformation
generator, set-embedding baselines, and a reproducible experiment
harness behind the ``lotset`` CLI.
"""

from .deform import (
    AffineMap,
    DeformationConfig,
    SynthSpec,
    apply_affine,
    compose,
    default_templates,
    make_reference,
    sample_affine,
    sample_template,
    synth_dataset,
)
from .errors import LotsetError
from .numerics import SvdResult, project_residual, svd
from .pointset import (
    LabeledDataset,
    PointSet,
    flatten,
    permute_points,
    unflatten,
    validate,
)
from .subspace import (
    ALL_FLAGS,
    ANISO_SCALE,
    SHEAR,
    TRANSLATION,
    ClassSubspace,
    LotNsModel,
    assemble_class_matrix,
    build_invariance_vectors,
    fit_basis,
    predict,
    predict_many,
    train,
)
from .transport import (
    Assignment,
    LotEmbedding,
    cost_matrix,
    lot_distance,
    lot_transform,
    solve_lap,
    wasserstein2,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "ALL_FLAGS",
    "ANISO_SCALE",
    "Assignment",
    "ClassSubspace",
    "DeformationConfig",
    "LabeledDataset",
    "LotEmbedding",
    "LotNsModel",
    "LotsetError",
    "PointSet",
    "SHEAR",
    "SvdResult",
    "SynthSpec",
    "TRANSLATION",
    "apply_affine",
    "assemble_class_matrix",
    "build_invariance_vectors",
    "compose",
    "cost_matrix",
    "default_templates",
    "fit_basis",
    "flatten",
    "lot_distance",
    "lot_transform",
    "make_reference",
    "permute_points",
    "predict",
    "predict_many",
    "project_residual",
    "sample_affine",
    "sample_template",
    "solve_lap",
    "svd",
    "synth_dataset",
    "train",
    "unflatten",
    "validate",
    "wasserstein2",
]
