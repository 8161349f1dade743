"""
Exact pointer states, profiles and means for projector measurements.

For a projector ``A`` the coupling ``exp(-i gamma A p / hbar)`` collapses to
``1 - A + A S`` with ``S`` the pointer translation by ``gamma``. All
functions here use that two-branch form and are valid at any coupling
strength.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .hilbert import (PPSContext, SystemOperator, SystemState,
                      as_projector, expectation, weak_value)
from .pointer import (PointerGrid, PointerObservable, PointerState, braket,
                      mean_rows, translate)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementConfig:
    """Coupling strength, measured operator and pre-measurement pointer."""

    gamma: float
    op: SystemOperator
    phi0: PointerState

    def __post_init__(self):
        if not np.isfinite(self.gamma):
            raise ValueError("gamma must be finite")


@dataclass(frozen=True, eq=False)
class JointState:
    """System (x) pointer amplitudes, shape ``(d, n_points)``."""

    grid: PointerGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[1] != self.grid.n_points:
            raise ValueError(f"joint amplitudes must have shape (d, {self.grid.n_points})")
        n = self._norm2(a)
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"joint state not normalized: {n!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def _norm2(self, a):
        return float(np.vdot(a, a).real) * self.grid.dq

    @classmethod
    def product(cls, psi: SystemState, phi: PointerState) -> "JointState":
        return cls(phi.grid, np.outer(psi.amplitudes, phi.amplitudes))

    @property
    def norm(self) -> float:
        return float(np.sqrt(self._norm2(self.amplitudes)))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def marginal(self) -> np.ndarray:
        """Pointer position density, summed over the system index."""
        return (np.abs(self.amplitudes) ** 2).sum(axis=0)


@dataclass(frozen=True)
class PPSPointerState:
    """Post-selected pointer state with its Pancharatnam phase and normalization."""

    pointer: PointerState
    chi: float
    normalization_n: float

    def __post_init__(self):
        if not self.normalization_n > 0:
            raise ValueError("normalization must be positive")


def interaction_apply(psi: SystemState, phi: PointerState, a: SystemOperator,
                      gamma: float) -> JointState:
    """``(1 - A + A S)|psi>|phi>`` assembled from its two branches."""
    a = as_projector(a)
    a_psi = a.matrix @ psi.amplitudes
    rest = psi.amplitudes - a_psi
    base, shifted = _branches(phi, gamma)
    amps = np.outer(rest, base) + np.outer(a_psi, shifted)
    return JointState(phi.grid, amps)


def _branches(phi: PointerState, gamma: float):
    # returns phi and S phi as arrays; containment of S phi enforced by translate
    return phi.amplitudes, translate(phi, gamma).amplitudes


def ps_profile(psi: SystemState, phi: PointerState, a: SystemOperator,
               gamma: float) -> np.ndarray:
    """Pointer position density after a projector measurement of a pre-selected system.

    A weighted sum of the unshifted and shifted densities; there is no
    interference term.
    """
    a = as_projector(a)
    w = expectation(psi, a)
    base, moved = _branches(phi, gamma)
    return (1 - w) * np.abs(base) ** 2 + w * np.abs(moved) ** 2


def ps_mean(m: PointerObservable, psi: SystemState, phi: PointerState,
            a: SystemOperator, gamma: float) -> float:
    """``(1 - <A>) <phi|M|phi> + <A> <phi|S^dag M S|phi>``."""
    a = as_projector(a)
    w = expectation(psi, a)
    base, moved = _branches(phi, gamma)
    g = phi.grid
    return (1 - w) * mean_rows(g, base, m) + w * mean_rows(g, moved, m)


def _pps_parts(ctx: PPSContext, a: SystemOperator, phi: PointerState, gamma: float):
    a = as_projector(a)
    if ctx.psi_i.dim != a.dim:
        raise DimensionMismatch(f"context dimension {ctx.psi_i.dim} vs operator {a.dim}")
    # recomputed so a context built for another operator cannot leak in
    aw = complex(weak_value((ctx.psi_i, ctx.psi_f), a, overlap_tolerance=0.0))
    base, moved = _branches(phi, gamma)
    s_overlap = braket(phi.grid, base, moved)
    n2 = abs(1 - aw) ** 2 + abs(aw) ** 2 + 2 * (aw * (1 - aw.conjugate()) * s_overlap).real
    return aw, base, moved, float(np.sqrt(n2))


def normalization(ctx: PPSContext, a: SystemOperator, phi: PointerState, gamma: float) -> float:
    """The post-selected normalization ``N`` (uses ``<phi|S|phi>`` by quadrature)."""
    return _pps_parts(ctx, a, phi, gamma)[3]


def pps_pointer_state(ctx: PPSContext, a: SystemOperator, phi: PointerState,
                      gamma: float) -> PPSPointerState:
    """Exact post-selected pointer ``exp(i chi)/N (1 - A_w + A_w S)|phi>``.

    The global phase is kept.
    """
    aw, base, moved, n = _pps_parts(ctx, a, phi, gamma)
    amps = ctx.phase / n * ((1 - aw) * base + aw * moved)
    return PPSPointerState(PointerState(phi.grid, amps), ctx.chi, n)


def pps_profile(ctx: PPSContext, a: SystemOperator, phi: PointerState,
                gamma: float) -> np.ndarray:
    """Post-selected position density, including the interference cross term."""
    aw, base, moved, n = _pps_parts(ctx, a, phi, gamma)
    cross = 2 * (aw * (1 - aw.conjugate()) * base.conj() * moved).real
    return (abs(1 - aw) ** 2 * np.abs(base) ** 2
            + abs(aw) ** 2 * np.abs(moved) ** 2 + cross) / n ** 2


def pps_mean(m: PointerObservable, ctx: PPSContext, a: SystemOperator,
             phi: PointerState, gamma: float) -> float:
    """Exact post-selected mean of ``M``.

    ``N^-2 {|1-A_w|^2 <M> + |A_w|^2 <S^dag M S> + 2 Re[A_w (1-A_w*) <phi|M S|phi>]}``
    """
    aw, base, moved, n = _pps_parts(ctx, a, phi, gamma)
    g = phi.grid
    m_base = mean_rows(g, base, m)
    m_moved = mean_rows(g, moved, m)
    m_cross = braket(g, base, m.apply(g, moved))
    total = (abs(1 - aw) ** 2 * m_base + abs(aw) ** 2 * m_moved
             + 2 * (aw * (1 - aw.conjugate()) * m_cross).real)
    return total / n ** 2
