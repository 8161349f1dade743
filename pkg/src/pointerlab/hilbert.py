"""
Finite-dimensional system states and operators.

Everything here is immutable: arrays are copied on construction and marked
read-only, so instances can be shared freely.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (DegenerateInput, DimensionMismatch, NotHermitian,
                     NotIdempotent, OrthogonalPostSelection)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
IDEMPOTENT_TOL = 1e-10
RANK_TOL = 1e-10
OVERLAP_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def complex_to_json(z) -> list:
    """Encode a complex array as nested ``[re, im]`` pairs."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return [float(z.real), float(z.imag)]
    return [complex_to_json(x) for x in z]


def _complex_leaf(x) -> complex:
    if isinstance(x, (list, tuple, np.ndarray)):
        if len(x) != 2:
            raise ValueError(f"complex entry must be a number or [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def complex_from_json(obj, ndim: int = None) -> np.ndarray:
    """Inverse of :func:`complex_to_json`.

    ``ndim`` is the rank of the complex array being decoded (1 for a state,
    2 for a matrix). Each entry may then be a bare real number or an
    ``[re, im]`` pair, which removes the ambiguity between a real 2 x 2
    matrix and a vector of two pairs. Without ``ndim`` every innermost
    length-2 list is read as a pair.
    """
    if ndim is None:
        arr = np.asarray(obj, dtype=float)
        if arr.ndim == 0:
            return np.asarray(complex(arr))
        if arr.shape[-1] != 2:
            return arr.astype(complex)
        return arr[..., 0] + 1j * arr[..., 1]

    def decode(x, depth):
        if depth == 0:
            return _complex_leaf(x)
        if not isinstance(x, (list, tuple, np.ndarray)):
            raise ValueError(f"expected a nested list of rank {ndim}")
        return [decode(y, depth - 1) for y in x]

    out = np.array(decode(obj, ndim), dtype=complex)
    if out.ndim != ndim:
        raise ValueError(f"ragged data: expected rank {ndim}, got shape {out.shape}")
    return out


@dataclass(frozen=True, eq=False)
class SystemState:
    """Normalized pure state of a d-level system."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = _frozen(self.amplitudes)
        if a.ndim != 1 or a.size < 2:
            raise DimensionMismatch(f"state must be a vector with d >= 2, got shape {a.shape}")
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |c|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_vector(cls, v) -> "SystemState":
        """Normalize ``v`` and wrap it."""
        v = np.asarray(v, dtype=complex)
        n = np.linalg.norm(v)
        if n == 0 or not np.isfinite(n):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "SystemState") -> complex:
        """``<self|other>``."""
        _check_dims(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json(self) -> list:
        return complex_to_json(self.amplitudes)

    @classmethod
    def from_json(cls, obj) -> "SystemState":
        """Exact inverse of :meth:`to_json`; the input must already be normalized."""
        return cls(complex_from_json(obj, 1))


@dataclass(frozen=True, eq=False)
class SystemOperator:
    """Hermitian d x d operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionMismatch(f"operator must be square with d >= 2, got {m.shape}")
        err = np.max(np.abs(m - m.conj().T))
        if err >= HERMITIAN_TOL:
            raise NotHermitian(f"max |A - A^dagger| = {err:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def idempotency_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m @ m - m)))

    def is_projector(self, tol: float = IDEMPOTENT_TOL) -> bool:
        return self.idempotency_residual() < tol

    def to_json(self) -> list:
        return complex_to_json(self.matrix)

    @classmethod
    def from_json(cls, obj):
        return cls(complex_from_json(obj, 2))


class Projector(SystemOperator):
    """Hermitian idempotent operator (eigenvalues 0 and 1 only)."""

    def __post_init__(self):
        super().__post_init__()
        res = self.idempotency_residual()
        if res >= IDEMPOTENT_TOL:
            raise NotIdempotent(f"max |A^2 - A| = {res:.3e}")
        ev = np.linalg.eigvalsh(self.matrix)
        off = np.minimum(np.abs(ev), np.abs(ev - 1.0)).max()
        if off >= IDEMPOTENT_TOL:
            raise NotIdempotent(f"eigenvalue off {{0, 1}} by {off:.3e}")

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))


def as_projector(op: SystemOperator) -> Projector:
    """Return ``op`` as a :class:`Projector`, raising NotIdempotent otherwise."""
    if isinstance(op, Projector):
        return op
    return Projector(op.matrix)


def make_projector(basis_vectors: Sequence, rank_tol: float = RANK_TOL) -> Projector:
    """Projector onto the span of ``basis_vectors``.

    The vectors are orthonormalized with modified Gram-Schmidt; any vector
    whose residual norm falls below ``rank_tol`` (relative to its original
    norm) is considered dependent.

    Parameters
    ----------
    basis_vectors : sequence of SystemState or array_like
        Spanning vectors, all of the same dimension.
    rank_tol : float
        Relative residual below which a vector counts as dependent.

    Returns
    -------
    Projector

    Raises
    ------
    DegenerateInput
        If the vectors are linearly dependent.
    """
    vecs = [np.asarray(getattr(v, "amplitudes", v), dtype=complex) for v in basis_vectors]
    if not vecs:
        raise DegenerateInput("empty basis")
    d = vecs[0].size
    for v in vecs:
        _check_dims(d, v.size)
    ortho = []
    for v in vecs:
        n0 = np.linalg.norm(v)
        if n0 == 0:
            raise DegenerateInput("zero vector in basis")
        w = v.copy()
        for u in ortho:
            w = w - np.vdot(u, w) * u
        n = np.linalg.norm(w)
        if n <= rank_tol * n0:
            raise DegenerateInput(
                f"basis vector {len(ortho)} is linearly dependent (residual {n / n0:.2e})")
        ortho.append(w / n)
    u = np.array(ortho).T
    p = u @ u.conj().T
    # remove roundoff asymmetry before validation
    p = 0.5 * (p + p.conj().T)
    return Projector(p)


def _check_dims(d1, d2):
    if d1 != d2:
        raise DimensionMismatch(f"dimension mismatch: {d1} vs {d2}")


def expectation(state: SystemState, op: SystemOperator) -> float:
    """``<psi|A|psi>`` (real for Hermitian A)."""
    _check_dims(state.dim, op.dim)
    a = state.amplitudes
    return float(np.vdot(a, op.matrix @ a).real)


@dataclass(frozen=True)
class WeakValue:
    value: complex

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag

    def __complex__(self):
        return complex(self.value)


def weak_value(ctx_states, op: SystemOperator, overlap_tolerance: float = OVERLAP_TOL) -> WeakValue:
    """Weak value ``<psi_f|A|psi_i> / <psi_f|psi_i>``.

    Parameters
    ----------
    ctx_states : tuple of SystemState
        ``(psi_i, psi_f)``.
    op : SystemOperator
    overlap_tolerance : float
        Minimum accepted ``|<psi_f|psi_i>|``.
    """
    psi_i, psi_f = ctx_states
    _check_dims(psi_i.dim, psi_f.dim)
    _check_dims(psi_i.dim, op.dim)
    overlap = psi_f.inner(psi_i)
    if abs(overlap) <= overlap_tolerance:
        raise OrthogonalPostSelection(abs(overlap), overlap_tolerance)
    num = complex(np.vdot(psi_f.amplitudes, op.matrix @ psi_i.amplitudes))
    return WeakValue(num / overlap)


@dataclass(frozen=True)
class PPSContext:
    """Pre/post-selection pair together with derived quantities for one operator."""

    psi_i: SystemState
    psi_f: SystemState
    overlap: complex
    chi: float
    a_w: WeakValue

    @property
    def phase(self) -> complex:
        """``exp(i chi)``."""
        return self.overlap / abs(self.overlap)

    @property
    def is_trivial(self) -> bool:
        """True when pre- and post-selected states coincide exactly."""
        return bool(np.array_equal(self.psi_i.amplitudes, self.psi_f.amplitudes))


def pps_context(psi_i: SystemState, psi_f: SystemState, op: SystemOperator,
                overlap_tolerance: float = OVERLAP_TOL) -> PPSContext:
    """Bundle a pre/post-selection with its overlap, Pancharatnam phase and weak value.

    ``chi`` is the principal argument of ``<psi_f|psi_i>``, in (-pi, pi].
    """
    a_w = weak_value((psi_i, psi_f), op, overlap_tolerance)
    overlap = psi_f.inner(psi_i)
    chi = cmath.phase(overlap)
    if chi <= -np.pi:
        chi += 2 * np.pi
    return PPSContext(psi_i, psi_f, overlap, chi, a_w)
