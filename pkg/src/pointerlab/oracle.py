"""
Brute-force reference evolution.

The coupling ``exp(-i gamma A p / hbar)`` is diagonal in the pointer
momentum, so on each Fourier mode ``p_k`` it is the d x d unitary
``V diag(exp(-i gamma a p_k / hbar)) V^dag`` built from the eigenpairs of
``A``. That is applied mode by mode to the whole joint state. Nothing here
relies on ``A`` being a projector.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import DimensionMismatch, GridContainment, PostSelectionFailure
from .exact import JointState
from .hilbert import SystemOperator, SystemState
from .pointer import (EDGE_TOL, MomentReport, PointerObservable, PointerState,
                      check_no_wrap, edge_ratio, moments_rows)

RECONSTRUCTION_TOL = 1e-10
SUCCESS_FLOOR = 1e-20


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, op: SystemOperator) -> "SpectralDecomposition":
        w, v = np.linalg.eigh(op.matrix)
        dec = cls(w, v)
        err = dec.reconstruction_error(op)
        if err >= RECONSTRUCTION_TOL:
            raise ArithmeticError(f"spectral reconstruction residual {err:.2e}")
        return dec

    def reconstruction_error(self, op: SystemOperator) -> float:
        v, w = self.eigenvectors, self.eigenvalues
        return float(np.max(np.abs((v * w) @ v.conj().T - op.matrix)))

    def orthonormality_error(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0]))))


def evolve_joint(psi: Union[SystemState, JointState], phi: PointerState, a: SystemOperator,
                 gamma: float) -> JointState:
    """Apply ``exp(-i gamma A p / hbar)`` to ``psi (x) phi``.

    ``psi`` may also be a :class:`JointState`, in which case ``phi`` only
    supplies the grid and the joint state is evolved directly.

    Raises
    ------
    GridContainment
        If the largest eigen-shift wraps the pointer around the periodic grid.
    """
    grid = phi.grid
    if isinstance(psi, JointState):
        joint = np.asarray(psi.amplitudes)
    else:
        joint = np.outer(psi.amplitudes, phi.amplitudes)
    if joint.shape[0] != a.dim:
        raise DimensionMismatch(f"system dimension {joint.shape[0]} vs operator {a.dim}")
    dec = SpectralDecomposition.of(a)
    max_shift = abs(gamma) * np.max(np.abs(dec.eigenvalues))
    if max_shift >= grid.length / 2:
        raise GridContainment(f"largest shift {max_shift:g} exceeds half the grid length")

    v = dec.eigenvectors
    # phases[j, k] = exp(-i gamma a_j p_k / hbar)
    phases = np.exp(-1j * gamma * np.outer(dec.eigenvalues, grid.p) / grid.hbar)
    u = np.einsum("ij,jk,lj->kil", v, phases, v.conj())      # (N, d, d) per-mode unitaries
    spec = np.fft.fft(joint, axis=-1)
    out = np.fft.ifft(np.einsum("kil,lk->ik", u, spec), axis=-1)
    r = edge_ratio(out)
    if r >= EDGE_TOL:
        raise GridContainment(f"evolved state reaches grid edge (edge/peak = {r:.2e})")
    # a contained evolution moves the pointer centroid by gamma <A> exactly
    mean_a = float(np.vdot(joint, a.matrix @ joint).real / np.vdot(joint, joint).real)
    check_no_wrap(grid, joint, out, gamma * mean_a)
    return JointState(grid, out)


def oracle_ps_moments(joint: JointState, m: PointerObservable,
                      mass: float = None) -> MomentReport:
    """Moments of the reduced pointer state (``M`` acts on the pointer only)."""
    return moments_rows(joint.grid, joint.amplitudes, m, mass)


def oracle_post_select(joint: JointState, psi_f: SystemState) -> Tuple[PointerState, float]:
    """Project the system onto ``psi_f``.

    Returns the normalized pointer state (global phase untouched) and the
    norm of the projected, unnormalized pointer.
    """
    if psi_f.dim != joint.dim:
        raise DimensionMismatch(f"post-selection dimension {psi_f.dim} vs {joint.dim}")
    raw = psi_f.amplitudes.conj() @ joint.amplitudes
    prob = float(np.vdot(raw, raw).real) * joint.grid.dq
    if prob <= SUCCESS_FLOOR:
        raise PostSelectionFailure(f"post-selection probability {prob:.2e}")
    norm = float(np.sqrt(prob))
    return PointerState(joint.grid, raw / norm), norm
