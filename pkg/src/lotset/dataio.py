"""Text file formats: point-set CSV, dataset manifests, and model files.

Everything is plain text with reals printed to 17 significant digits,
which round-trips IEEE doubles exactly; a saved model therefore predicts
bitwise identically after reload. Writes go through a temp file and a
rename so readers never observe partial files.

Point-set CSV: one row of L comma-separated reals per point; one optional
leading header line starting with '#'.

Manifest: UTF-8 lines "label,relative-path" (relative to the manifest's
directory); lines starting with '#' are comments.

Model file: versioned header, global shape and training settings, then
per-class reference points and basis matrices, then a final sha256
integrity line covering everything above it.
"""

import hashlib
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import (
    ChecksumMismatch,
    EmptyFile,
    EmptyPointSet,
    IoError,
    LabelGap,
    MissingFile,
    ParseError,
    RaggedRows,
    VersionMismatch,
)
from .pointset import LabeledDataset, PointSet
from .seeding import substream
from .subspace import ClassSubspace, LotNsModel, canonical_flags

MODEL_FORMAT = "lotset-model 1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_pointset_csv(path) -> PointSet:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    start = 1
    if lines and lines[0].lstrip().startswith("#"):
        lines = lines[1:]
        start = 2
    rows = []
    width = None
    for offset, line in enumerate(lines):
        if not line.strip():
            continue
        lineno = start + offset
        tokens = line.split(",")
        try:
            values = [float(t) for t in tokens]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RaggedRows(f"{path}:{lineno}: expected {width} values, got {len(values)}")
        rows.append(values)
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return PointSet(np.array(rows, dtype=np.float64))


def write_pointset_csv(p: PointSet, path) -> None:
    if p.n == 0:  # PointSet forbids this, but guard the raw-array path
        raise EmptyPointSet("refusing to write an empty point set")
    lines = [",".join(_fmt(x) for x in row) for row in p.points]
    _atomic_write_text(path, "\n".join(lines) + "\n")


def sniff_input(path) -> str:
    """Distinguish a point-set CSV from a manifest by the first data line."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    for line in path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            [float(t) for t in stripped.split(",")]
            return "pointset"
        except ValueError:
            return "manifest"
    raise EmptyFile(f"{path}: no data rows")


def read_manifest(path) -> list[tuple[int, Path]]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        label_str, _, rel = line.partition(",")
        if not rel:
            raise ParseError(f"{path}:{lineno}: expected 'label,relative-path'")
        try:
            label = int(label_str.strip())
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad label {label_str!r}") from exc
        if label < 0:
            raise ParseError(f"{path}:{lineno}: negative label")
        entries.append((label, path.parent / rel.strip()))
    if not entries:
        raise EmptyFile(f"{path}: no entries")
    return entries


def write_manifest(entries, path) -> None:
    """entries: iterable of (label, path relative to the manifest)."""
    lines = [f"{int(label)},{rel}" for label, rel in entries]
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _resample(p: PointSet, target_n: int, rng) -> PointSet:
    if p.n == target_n:
        return p
    if p.n > target_n:
        keep = rng.choice(p.n, size=target_n, replace=False)
        return PointSet(p.points[np.sort(keep)])
    extra = rng.choice(p.n, size=target_n - p.n, replace=True)
    span = p.points.max(axis=0) - p.points.min(axis=0)
    diag = float(np.sqrt((span * span).sum()))
    jitter = rng.normal(0.0, 1e-6 * diag, (extra.size, p.dim))
    return PointSet(np.vstack([p.points, p.points[extra] + jitter]))


def load_dataset(manifest_path, target_n: int | None = None, seed: int = 0) -> LabeledDataset:
    """Load every entry; optionally normalize all sets to ``target_n`` points.

    Oversized sets are subsampled without replacement; undersized sets keep
    their points and add resampled copies with tiny jitter. Deterministic
    given ``seed``.
    """
    entries = read_manifest(manifest_path)
    samples, labels = [], []
    for index, (label, file_path) in enumerate(entries):
        p = read_pointset_csv(file_path)
        if target_n is not None:
            p = _resample(p, target_n, substream(seed, "resample", index))
        samples.append(p)
        labels.append(label)
    present = sorted(set(labels))
    if present != list(range(len(present))):
        raise LabelGap(f"labels {present} are not exactly 0..K-1")
    return LabeledDataset(samples, labels)


def _matrix_lines(m: np.ndarray) -> list[str]:
    return [" ".join(_fmt(x) for x in row) for row in m]


def save_model(model: LotNsModel, path) -> None:
    lines = [MODEL_FORMAT]
    lines.append(f"n {model.n}")
    lines.append(f"l {model.dim}")
    lines.append(f"k {model.k}")
    lines.append("flags " + (",".join(model.flags) if model.flags else "none"))
    lines.append("variance " + _fmt(model.variance_fraction))
    for sub in model.subspaces:
        lines.append(f"class {sub.class_label}")
        lines.append("explained " + _fmt(sub.explained_variance_fraction))
        ref = sub.reference.points
        lines.append(f"reference {ref.shape[0]} {ref.shape[1]}")
        lines.extend(_matrix_lines(ref))
        lines.append(f"basis {sub.basis.shape[0]} {sub.basis.shape[1]}")
        lines.extend(_matrix_lines(sub.basis))
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    _atomic_write_text(path, body + f"checksum {digest}\n")


class _LineReader:
    def __init__(self, lines, path):
        self.lines = lines
        self.path = path
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise ParseError(f"{self.path}: unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        out = np.empty((rows, cols))
        for i in range(rows):
            tokens = self.next().split()
            if len(tokens) != cols:
                raise ParseError(f"{self.path}:{self.pos}: expected {cols} values")
            out[i] = [float(t) for t in tokens]
        return out


def load_model(path) -> LotNsModel:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or not lines[-1].startswith("checksum "):
        raise ChecksumMismatch(f"{path}: missing checksum line")
    body = "\n".join(lines[:-1]) + "\n"
    expected = lines[-1].split(" ", 1)[1].strip()
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if actual != expected:
        raise ChecksumMismatch(f"{path}: checksum mismatch")
    if lines[0] != MODEL_FORMAT:
        raise VersionMismatch(f"{path}: expected '{MODEL_FORMAT}', got {lines[0]!r}")

    reader = _LineReader(lines[1:-1], path)

    def field(name: str) -> str:
        line = reader.next()
        key, _, value = line.partition(" ")
        if key != name:
            raise ParseError(f"{path}: expected '{name} ...', got {line!r}")
        return value

    try:
        n = int(field("n"))
        dim = int(field("l"))
        k = int(field("k"))
        flags_str = field("flags")
        flags = () if flags_str == "none" else canonical_flags(flags_str.split(","))
        variance = float(field("variance"))
        subspaces = []
        for _ in range(k):
            label = int(field("class"))
            explained = float(field("explained"))
            ref_rows, ref_cols = (int(t) for t in field("reference").split())
            if (ref_rows, ref_cols) != (n, dim):
                raise ParseError(f"{path}: reference shape {ref_rows}x{ref_cols} != {n}x{dim}")
            reference = PointSet(reader.matrix(ref_rows, ref_cols))
            b_rows, b_cols = (int(t) for t in field("basis").split())
            if b_rows != n * dim:
                raise ParseError(f"{path}: basis rows {b_rows} != {n * dim}")
            basis = reader.matrix(b_rows, b_cols)
            subspaces.append(ClassSubspace(label, reference, basis, explained))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return LotNsModel(tuple(subspaces), flags, variance)
