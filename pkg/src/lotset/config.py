"""Flat key/value config files for the CLI.

Format: one ``key = value`` pair per line, '#' comments and blank lines
ignored. Unknown keys are rejected so typos fail loudly. See the README
for the full key list; every key mirrors an ExperimentConfig field.
"""

from pathlib import Path

from .deform import DeformationConfig
from .errors import ConfigError, MissingFile
from .harness import ExperimentConfig
from .subspace import ALL_FLAGS, ANISO_SCALE, SHEAR, TRANSLATION

FLAG_CODES = {"T": TRANSLATION, "D": ANISO_SCALE, "S": SHEAR}

_INT_KEYS = {
    "classes", "points", "dim", "train_per_class", "test_per_class",
    "repeats", "seed", "fsort_bins", "target_n",
}
_FLOAT_KEYS = {
    "translate_max", "scale_max", "shear_max", "jitter_std",
    "ood_translate_max", "ood_scale_max", "ood_shear_max", "ood_jitter_std",
    "ood_factor", "variance", "ref_jitter",
}
_STR_KEYS = {"methods", "split_sizes", "flags", "train_manifest", "test_manifest"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def parse_flags(text: str) -> tuple:
    text = text.strip()
    if text.lower() in ("", "none"):
        return ()
    flags = []
    for code in text.split(","):
        code = code.strip()
        if code not in FLAG_CODES:
            raise ConfigError(f"unknown invariance flag {code!r}; expected subset of T,D,S")
        flags.append(FLAG_CODES[code])
    return tuple(f for f in ALL_FLAGS if f in flags)


def read_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, eq, value = stripped.partition("=")
        if not eq:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _convert(values: dict) -> dict:
    out = {}
    for key, raw in values.items():
        try:
            if key in _INT_KEYS:
                out[key] = int(raw)
            elif key in _FLOAT_KEYS:
                out[key] = float(raw)
            else:
                out[key] = raw
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return out


def experiment_config(values: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from parsed config-file values plus CLI overrides."""
    v = _convert(values)
    if overrides:
        v.update({k: val for k, val in overrides.items() if val is not None})

    deform = DeformationConfig(
        translate_max=v.pop("translate_max", 1.0),
        scale_max=v.pop("scale_max", 2.0),
        shear_max=v.pop("shear_max", 0.25),
        jitter_std=v.pop("jitter_std", 0.0),
    )
    ood_keys = ("ood_translate_max", "ood_scale_max", "ood_shear_max", "ood_jitter_std")
    ood_deform = None
    if any(k in v for k in ood_keys):
        ood_deform = DeformationConfig(
            translate_max=v.pop("ood_translate_max", deform.translate_max),
            scale_max=v.pop("ood_scale_max", deform.scale_max),
            shear_max=v.pop("ood_shear_max", deform.shear_max),
            jitter_std=v.pop("ood_jitter_std", deform.jitter_std),
        )

    kwargs = {"deform": deform, "ood_deform": ood_deform}
    if "methods" in v:
        kwargs["methods"] = tuple(m.strip() for m in v.pop("methods").split(",") if m.strip())
    if "split_sizes" in v:
        try:
            kwargs["split_sizes"] = tuple(
                int(s) for s in v.pop("split_sizes").split(",") if s.strip()
            )
        except ValueError as exc:
            raise ConfigError(f"bad split_sizes: {exc}") from exc
    if "flags" in v:
        kwargs["flags"] = parse_flags(v.pop("flags"))
    kwargs.update(v)
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
