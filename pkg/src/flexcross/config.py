"""Run configuration: JSON ingestion, parameter grids, seeds and tolerances.

A configuration file is a JSON object::

    {
      "schema_version": 1,
      "space": "spherical",
      "n": 3,
      "G": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
      "lambda": [1, 2, 4],
      "s": [-1, -1, -1],
      "s_prime": [1, 1, 1],
      "u_grid": [0, 0.5, "inf"],      # optional
      "seed": 12345,                  # optional
      "tolerances": {"dihedral": 1e-8} # optional
    }

Grid entries are numbers or the tokens ``"inf"`` / ``"-inf"``; both tokens
denote the single point at infinity.
"""
from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, InvalidDataError
from .flexion import INF, SimplestTypeData, as_param, validate_data
from .spaces import KINDS, Space

SCHEMA_VERSION = 1
DEFAULT_SEED = 0x5EED
SEED_ENV = "FLEXCROSS_SEED"

REQUIRED_FIELDS = ("space", "n", "G", "lambda", "s", "s_prime")
OPTIONAL_FIELDS = ("schema_version", "u_grid", "seed", "tolerances")

# Named tolerances; entries that depend on the dimension are resolved by
# ``resolve_tolerances``.
BASE_TOLERANCES = {
    "edge_length": 1e-9,
    "dihedral": 1e-8,
    "sign_law": 1e-8,
    "h_identity": 1e-12,
    "flatness": 1e-10,
    "duality": 1e-9,
    "concurrency": 1e-8,
    "ratio": 1e-8,
    "tangency": 1e-8,
    "codim2_relation": 1e-9,
    "alternating_sum": 1e-9,
    "decomposition_slack": 1e-6,
    "witness": 1e-8,
}


class ConfigError(InputError):
    """Malformed configuration file; ``where`` names the line or field."""

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class ValidationError(InvalidDataError):
    """Well-formed configuration whose data violates a construction condition."""

    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"data violates condition: {condition}")


def default_u_grid() -> list[float]:
    """65 parameter values: 0, +-logspace(-3, 3) and infinity.

    The positive branch has 32 points and the negative branch 31 (the
    value -1e-3 is dropped) so that the total count is 65.
    """
    pos = np.logspace(-3, 3, 32)
    neg = -np.logspace(-3, 3, 32)[1:]
    return normalize_grid([0.0, *pos, *neg, INF])


def normalize_grid(values) -> list[float]:
    """Sorted, deduplicated grid with infinity (if present) last."""
    finite = sorted({float(v) for v in values if not np.isinf(v)})
    out = [0.0 if v == 0 else v for v in finite]
    if any(np.isinf(v) for v in values):
        out.append(INF)
    return out


def resolve_tolerances(n: int, overrides: dict | None = None) -> dict[str, float]:
    """Default tolerances for dimension ``n`` updated by ``overrides``."""
    tol = dict(BASE_TOLERANCES)
    tol["facet_relation"] = 1e-9 if n <= 3 else 1e-4
    tol["volume_agreement"] = 1e-8 if n <= 3 else 1e-4
    for name, value in (overrides or {}).items():
        if name not in tol:
            raise ConfigError(f"unknown tolerance {name!r}", "tolerances")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"tolerance {name!r} is not a number", "tolerances") from None
        if not value > 0 or not np.isfinite(value):
            raise ConfigError(f"tolerance {name!r} must be positive and finite", "tolerances")
        tol[name] = value
    return tol


def parse_tol_overrides(items) -> dict[str, float]:
    """Parse ``NAME=VALUE`` command-line items."""
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"expected NAME=VALUE, got {item!r}", "--tol")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"tolerance value {value!r} is not a number", "--tol") from None
    return out


def resolve_seed(cli_seed: int | None, config_seed: int | None) -> int:
    """``--seed`` wins over ``FLEXCROSS_SEED``, which wins over the config value."""
    if cli_seed is not None:
        return int(cli_seed) & (2**64 - 1)
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env, 0) & (2**64 - 1)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer", SEED_ENV) from None
    if config_seed is not None:
        return int(config_seed) & (2**64 - 1)
    return DEFAULT_SEED


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream for the check ``name``: the crc32 of the name is
    appended to the run seed as entropy."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), zlib.crc32(name.encode("utf-8"))])
    return np.random.default_rng(ss)


@dataclass
class RunConfig:
    data: SimplestTypeData
    u_grid: list[float]
    seed: int
    tolerances: dict[str, float]
    source: str | None = None
    schema_version: int = SCHEMA_VERSION
    outputs: dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.data.n

    def rng(self, name: str) -> np.random.Generator:
        return check_rng(self.seed, name)

    def header(self) -> list[str]:
        """Comment lines describing the run, without the leading ``#``."""
        tol = ",".join(f"{k}={v!r}" for k, v in sorted(self.tolerances.items()))
        return [
            f"schema_version={self.schema_version}",
            f"seed={self.seed}",
            f"space={self.data.space.kind} n={self.n}",
            f"tolerances={tol}",
        ]


def _matrix(value, shape, name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("entries must be numbers", name) from None
    if arr.shape != shape:
        raise ConfigError(f"expected shape {shape}, got {arr.shape}", name)
    if not np.all(np.isfinite(arr)):
        raise ConfigError("entries must be finite", name)
    return arr


def _grid_value(v, i):
    if isinstance(v, bool):
        raise ConfigError("grid entries must be numbers or 'inf'", f"u_grid[{i}]")
    if isinstance(v, str) and v.strip().lower() not in ("inf", "-inf", "+inf"):
        raise ConfigError(f"unknown token {v!r}", f"u_grid[{i}]")
    try:
        return as_param(v)
    except (InputError, TypeError, ValueError):
        raise ConfigError("grid entries must be numbers or 'inf'", f"u_grid[{i}]") from None


def config_from_dict(
    doc: dict, seed: int | None = None, tol_overrides: dict | None = None, source: str | None = None
) -> RunConfig:
    """Build a RunConfig from a parsed document; see the module docstring."""
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object")
    unknown = set(doc) - set(REQUIRED_FIELDS) - set(OPTIONAL_FIELDS)
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)}", sorted(unknown)[0])
    for name in REQUIRED_FIELDS:
        if name not in doc:
            raise ConfigError("missing required field", name)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r}", "schema_version")
    kind = doc["space"]
    if kind not in KINDS:
        raise ConfigError(f"must be one of {list(KINDS)}", "space")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ConfigError("must be an integer >= 2", "n")
    G = _matrix(doc["G"], (n, n), "G")
    lam = _matrix(doc["lambda"], (n,), "lambda")
    s = _matrix(doc["s"], (n,), "s")
    sp = _matrix(doc["s_prime"], (n,), "s_prime")
    for name, arr in (("s", s), ("s_prime", sp)):
        if not np.all(np.isin(arr, (-1.0, 1.0))):
            raise ConfigError("entries must be +1 or -1", name)

    if "u_grid" in doc:
        raw = doc["u_grid"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("must be a non-empty list", "u_grid")
        grid = normalize_grid([_grid_value(v, i) for i, v in enumerate(raw)])
    else:
        grid = default_u_grid()

    cfg_seed = doc.get("seed")
    if cfg_seed is not None and (isinstance(cfg_seed, bool) or not isinstance(cfg_seed, int)):
        raise ConfigError("must be an integer", "seed")
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict):
        raise ConfigError("must be an object", "tolerances")
    tolerances = resolve_tolerances(n, {**tol_doc, **(tol_overrides or {})})

    data = SimplestTypeData(Space(kind, n), G, lam, s, sp)
    problem = validate_data(data)
    if problem is not None:
        raise ValidationError(problem)
    return RunConfig(
        data=data,
        u_grid=grid,
        seed=resolve_seed(seed, cfg_seed),
        tolerances=tolerances,
        source=source,
        schema_version=version,
    )


def parse_config(path, seed: int | None = None, tol_overrides: dict | None = None) -> RunConfig:
    """Read and validate a configuration file.

    Raises:
        ConfigError: unreadable file, malformed JSON (with line number) or a
            bad field.
        ValidationError: the data violates a construction condition.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return config_from_dict(doc, seed=seed, tol_overrides=tol_overrides, source=str(path))


def data_to_dict(data: SimplestTypeData, u_grid=None, seed: int | None = None) -> dict:
    """Inverse of ``config_from_dict`` for the data part."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "space": data.space.kind,
        "n": data.n,
        "G": data.G.tolist(),
        "lambda": data.lam.tolist(),
        "s": data.s.astype(int).tolist(),
        "s_prime": data.s_prime.astype(int).tolist(),
    }
    if u_grid is not None:
        doc["u_grid"] = ["inf" if np.isinf(u) else float(u) for u in u_grid]
    if seed is not None:
        doc["seed"] = int(seed)
    return doc
