"""JSON experiment configuration for the command-line front end."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional

import numpy as np

from .errors import ConfigError, PointerLabError
from .hilbert import (Projector, SystemOperator, SystemState, complex_from_json,
                      make_projector)
from .pointer import PointerGrid, PointerObservable, PointerState, gaussian_pointer

DEFAULT_OBSERVABLES = ("q", "p")


@dataclass
class ExperimentConfig:
    raw: dict
    psi: SystemState
    psi_f: Optional[SystemState]
    operator_factory: Callable[[], SystemOperator]
    operator_field: str
    grid: PointerGrid
    phi: PointerState
    gammas: List[float]
    observables: List[PointerObservable]
    output_dir: Optional[str] = None
    formats: List[str] = field(default_factory=lambda: ["csv"])
    seed: int = 0
    mc_samples: int = 10_000
    verify_instances: int = 200

    def operator(self) -> SystemOperator:
        """Build the operator, reporting construction failures as ConfigError."""
        try:
            return self.operator_factory()
        except PointerLabError as exc:
            raise ConfigError(self.operator_field, str(exc)) from exc

    @property
    def sha256(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _get(d: dict, key: str, path: str, default: Any = ...):
    if key in d:
        return d[key]
    if default is ...:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return default


def _state(obj, path, dim) -> SystemState:
    try:
        v = complex_from_json(obj, 1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"not a complex vector: {exc}") from exc
    if v.ndim != 1:
        raise ConfigError(path, "expected a vector of [re, im] pairs")
    if dim is not None and v.size != dim:
        raise ConfigError(path, f"length {v.size} does not match dimension {dim}")
    try:
        return SystemState.from_vector(v)
    except (PointerLabError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _operator(spec, path, dim):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(path, "expected exactly one of projector_basis, projector_matrix, "
                                "hermitian_matrix")
    (kind, value), = spec.items()
    fpath = f"{path}.{kind}"
    try:
        if kind == "projector_basis":
            vecs = [complex_from_json(v, 1) for v in value]
            mats = None
        elif kind in ("projector_matrix", "hermitian_matrix"):
            mats = complex_from_json(value, 2)
            vecs = None
        else:
            raise ConfigError(path, f"unknown operator kind {kind!r}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(fpath, f"malformed complex data: {exc}") from exc

    if vecs is not None:
        if any(v.ndim != 1 or v.size != dim for v in vecs):
            raise ConfigError(fpath, f"basis vectors must have length {dim}")

        def factory():
            return make_projector(vecs)
    else:
        if mats.shape != (dim, dim):
            raise ConfigError(fpath, f"matrix must be {dim}x{dim}, got {mats.shape}")
        cls = Projector if kind == "projector_matrix" else SystemOperator

        def factory():
            return cls(mats)
    return factory, fpath


def _gammas(sweep, path) -> List[float]:
    if "gamma" in sweep:
        g = sweep["gamma"]
        values = [g] if isinstance(g, (int, float)) else list(g)
    elif "range" in sweep:
        lo, hi = sweep["range"]
        steps = int(_get(sweep, "steps", path))
        if steps < 1:
            raise ConfigError(f"{path}.steps", "must be >= 1")
        values = list(np.linspace(float(lo), float(hi), steps))
    else:
        raise ConfigError(path, "give either 'gamma' or 'range' + 'steps'")
    try:
        values = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.gamma", str(exc)) from exc
    if not values:
        raise ConfigError(f"{path}.gamma", "gamma list is empty")
    if not all(np.isfinite(values)):
        raise ConfigError(f"{path}.gamma", "gamma values must be finite")
    return values


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a configuration document; every error names its field."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    system = _get(raw, "system", "")
    dim = int(_get(system, "dimension", "system"))
    if dim < 2:
        raise ConfigError("system.dimension", "must be >= 2")
    psi = _state(_get(system, "psi", "system"), "system.psi", dim)
    psi_f = None
    if system.get("psi_f") is not None:
        psi_f = _state(system["psi_f"], "system.psi_f", dim)
    factory, op_field = _operator(_get(system, "operator", "system"), "system.operator", dim)

    ptr = raw.get("pointer", {})
    sigma = float(ptr.get("sigma", 1.0))
    if not sigma > 0:
        raise ConfigError("pointer.sigma", "must be positive")
    q_range = ptr.get("q_range", [-20 * sigma, 20 * sigma])
    try:
        grid = PointerGrid(int(ptr.get("n_points", 1024)), float(q_range[0]),
                           float(q_range[1]), float(ptr.get("hbar", 1.0)))
    except ValueError as exc:
        raise ConfigError("pointer", str(exc)) from exc
    try:
        phi = gaussian_pointer(grid, float(ptr.get("center", 0.0)), sigma,
                               chirp=float(ptr.get("chirp", 0.0)),
                               momentum=float(ptr.get("momentum", 0.0)))
    except (PointerLabError, ValueError) as exc:
        raise ConfigError("pointer", str(exc)) from exc

    gammas = _gammas(raw.get("sweep", {"gamma": [0.5]}), "sweep")
    try:
        observables = [PointerObservable.parse(o)
                       for o in raw.get("observables", DEFAULT_OBSERVABLES)]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("observables", str(exc)) from exc

    outputs = raw.get("outputs", {})
    formats = list(outputs.get("formats", ["csv"]))
    if any(f not in ("csv", "json") for f in formats):
        raise ConfigError("outputs.formats", "only 'csv' and 'json' are supported")
    return ExperimentConfig(
        raw=raw, psi=psi, psi_f=psi_f, operator_factory=factory, operator_field=op_field,
        grid=grid, phi=phi, gammas=gammas, observables=observables,
        output_dir=outputs.get("directory"), formats=formats,
        seed=int(raw.get("seed", 0)),
        mc_samples=int(raw.get("monte_carlo", {}).get("samples", 10_000)),
        verify_instances=int(raw.get("verify", {}).get("instances", 200)),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from exc
    return parse_config(raw)
