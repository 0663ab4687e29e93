"""Dataset ingestion, normalization, config parsing and result serialization.

File formats:

* datasets: plain text (one value per line) or a CSV column;
* experiment configs: INI key/value files with one section per concern
  (see the CLI help for the keys each subcommand reads);
* results: CSV files with a fixed column order, plus a JSON run manifest
  carrying the config echo, seeds, dataset hash and package version.

Every writer is deterministic: identical inputs produce identical bytes.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .errors import ConfigError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Split:
    """Washout / train / test partition of a series, consumed in that order."""

    washout: int = 300
    train: int = 3000
    test: int = 700

    def __post_init__(self):
        if min(self.washout, self.train, self.test) < 0:
            raise ConfigError("split sizes must be >= 0")

    @property
    def total(self) -> int:
        return self.washout + self.train + self.test


@dataclass(frozen=True)
class TimeSeries:
    """An input series with provenance and normalization bookkeeping."""

    values: np.ndarray
    source: str
    sha256: str
    normalization: str = "none"
    raw_min: float | None = None
    raw_max: float | None = None

    def __len__(self):
        return len(self.values)

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        """Map min-max normalized values back to the raw scale."""
        if self.normalization != "minmax01":
            raise ConfigError(f"series is not normalized (mode {self.normalization!r})")
        return np.asarray(values) * (self.raw_max - self.raw_min) + self.raw_min


def _hash_values(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values, dtype=float).tobytes()).hexdigest()


def load_series(path, fmt: str = "plain", column: int = 0) -> TimeSeries:
    """Load a dataset from ``path``.

    ``fmt="plain"`` expects one numeric value per line; ``fmt="csv"`` reads
    the given ``column`` of a comma-separated file. Parse failures report the
    offending line number.
    """
    path = str(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    values = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if fmt == "plain":
            token = line
        elif fmt == "csv":
            parts = line.split(",")
            if column >= len(parts):
                raise ConfigError(f"{path}:{lineno}: no column {column}")
            token = parts[column].strip()
            if lineno == 1:
                try:
                    float(token)
                except ValueError:
                    continue  # header row
        else:
            raise ConfigError(f"unknown dataset format {fmt!r}")
        try:
            values.append(float(token))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: cannot parse {token!r} as a number") from None
    if not values:
        raise ConfigError(f"{path}: empty dataset")
    return TimeSeries(values=np.array(values), source=path, sha256=digest)


def henon_series(length: int, seed: int = 0, discard: int = 200) -> TimeSeries:
    """Synthetic chaotic stand-in: the x-orbit of the Henon map.

    ``x_{k+1} = 1 - 1.4 x_k^2 + 0.3 x_{k-1}`` with a seeded random start and
    ``discard`` burn-in steps. One-step-ahead forecasting of this orbit needs
    memory of the previous sample, which exercises the reservoir the same way
    the chaotic laser benchmark does.
    """
    if length < 1:
        raise ConfigError("length must be >= 1")
    rng = np.random.default_rng(seed)
    x, x_prev = rng.uniform(-0.1, 0.1, size=2)
    out = np.empty(length + discard)
    for k in range(length + discard):
        x, x_prev = 1.0 - 1.4 * x * x + 0.3 * x_prev, x
        out[k] = x
    values = out[discard:]
    return TimeSeries(values=values, source=f"synthetic:henon(seed={seed},n={length})",
                      sha256=_hash_values(values))


def normalize_minmax01(series: TimeSeries, fit_range: slice) -> TimeSeries:
    """Min-max scale to [0, 1], with the affine map fitted on ``fit_range`` only.

    Values outside the fit range may fall outside [0, 1]; they are clipped
    with a logged warning so phase encodings stay bounded. The raw extrema are
    retained for de-normalization.
    """
    fit = series.values[fit_range]
    lo, hi = float(fit.min()), float(fit.max())
    if hi == lo:
        raise ConfigError("fit range is constant; cannot min-max normalize")
    scaled = (series.values - lo) / (hi - lo)
    outside = (scaled < 0.0) | (scaled > 1.0)
    if np.any(outside):
        log.warning("min-max normalization clipped %d/%d values outside the fit range",
                    int(outside.sum()), scaled.size)
        scaled = np.clip(scaled, 0.0, 1.0)
    return replace(series, values=scaled, normalization="minmax01",
                   raw_min=lo, raw_max=hi)


def format_float(x) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows) -> None:
    """Write rows (iterables of numbers/strings) under a fixed header."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else format_float(cell) for cell in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_manifest(path, *, config_echo: dict, seeds: dict, dataset_sha256: str | None = None,
                   extra: dict | None = None) -> None:
    """Write the JSON run manifest. Keys are sorted so reruns are byte-identical."""
    payload = {
        "artifact_version": __version__,
        "config": config_echo,
        "seeds": seeds,
    }
    if dataset_sha256 is not None:
        payload["dataset_sha256"] = dataset_sha256
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    found = parser.read(str(path))
    if not found:
        raise ConfigError(f"config file not found: {path}")
    return parser


def config_echo(parser: configparser.ConfigParser) -> dict:
    """Plain dict view of a parsed config, suitable for manifests."""
    return {section: dict(parser[section]) for section in parser.sections()}


@dataclass
class SectionSchema:
    """Declares the keys a config section accepts (with defaults)."""

    name: str
    keys: dict = field(default_factory=dict)  # key -> (type tag, default or REQUIRED)

    def parse(self, parser: configparser.ConfigParser) -> dict:
        if self.name not in parser:
            section = {}
        else:
            section = dict(parser[self.name])
        unknown = set(section) - set(self.keys)
        if unknown:
            raise ConfigError(
                f"[{self.name}] has unknown keys: {', '.join(sorted(unknown))}")
        out = {}
        for key, (kind, default) in self.keys.items():
            if key in section:
                out[key] = _convert(self.name, key, kind, section[key])
            elif default is REQUIRED:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}")
            else:
                out[key] = default
        return out


REQUIRED = object()


def _convert(section, key, kind, text):
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "str":
            return text
        if kind == "bool":
            return text.lower() in ("1", "true", "yes", "on")
        if kind == "float_list":
            return [float(tok) for tok in text.replace(",", " ").split()]
        if kind == "int_list":
            return [int(tok) for tok in text.replace(",", " ").split()]
        if kind == "float_or_auto":
            return None if text.lower() == "auto" else float(text)
        if kind == "int_or_auto":
            return None if text.lower() == "auto" else int(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {text!r} is not a valid {kind}") from None
    raise ConfigError(f"unknown config kind {kind!r}")
