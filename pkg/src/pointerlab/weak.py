"""
First-order (small coupling) pointer means and measurement sensitivities.

These formulas hold for any Hermitian system operator, not only projectors.
Commutator and anticommutator means are obtained by applying the operators
on the grid (``q`` diagonal, ``p`` via FFT) and integrating.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import InvalidRegime, UndefinedSensitivity, WeakRegimeWarning
from .exact import MeasurementConfig, pps_mean, ps_mean
from .hilbert import PPSContext, SystemOperator, SystemState, expectation, weak_value
from .oracle import evolve_joint, oracle_post_select
from .pointer import (MOMENTUM, POSITION, PointerObservable, PointerState,
                      ccv, mean_rows, observable_mean, pair_statistic, variance)

COMMUTATOR_TOL = 1e-12
WEAKNESS_THRESHOLD = 0.1


def _aw(ctx: PPSContext, a: SystemOperator) -> complex:
    return complex(weak_value((ctx.psi_i, ctx.psi_f), a, overlap_tolerance=0.0))


def check_weakness(phi: PointerState, gamma: float, a_w: complex = 1.0) -> bool:
    """Warn if ``gamma * max(1, |A_w|)`` exceeds a tenth of the pointer width.

    Returns True when the heuristic is satisfied.
    """
    sigma = math.sqrt(variance(phi, POSITION))
    ok = abs(gamma) * max(1.0, abs(a_w)) <= WEAKNESS_THRESHOLD * sigma * (1 + 1e-9)
    if not ok:
        warnings.warn(
            f"gamma={gamma:g} with |A_w|={abs(a_w):.3g} is not weak relative to "
            f"pointer width {sigma:.3g}; first-order results may be inaccurate",
            WeakRegimeWarning, stacklevel=3)
    return ok


def weak_ps_mean(m: PointerObservable, psi: SystemState, a: SystemOperator,
                 phi: PointerState, gamma: float) -> float:
    """``<M> - (i/hbar) gamma <A> <[M, p]>`` for a pre-selected system."""
    hbar = phi.grid.hbar
    check_weakness(phi, gamma)
    val = (observable_mean(phi, m)
           - 1j / hbar * gamma * expectation(psi, a) * _comm(phi, m))
    return val.real


def weak_pps_mean(m: PointerObservable, ctx: PPSContext, a: SystemOperator,
                  phi: PointerState, gamma: float) -> float:
    """First-order post-selected mean of ``M``.

    ``<M> - (i/hbar) gamma A_w* <[M, p]> + 2 (gamma/hbar) Im A_w ccv(M, p)``;
    the imaginary parts of the last two terms cancel.
    """
    hbar = phi.grid.hbar
    aw = _aw(ctx, a)
    check_weakness(phi, gamma, aw)
    val = (observable_mean(phi, m)
           - 1j / hbar * gamma * aw.conjugate() * _comm(phi, m)
           + 2 * gamma / hbar * aw.imag * ccv(phi, m))
    return val.real


def _comm(phi, m, power=1):
    return pair_statistic(phi.grid, phi.amplitudes, m, -1, power)


def _anti(phi, m, power=1):
    return pair_statistic(phi.grid, phi.amplitudes, m, +1, power)


def b_statistic(phi: PointerState, m: PointerObservable) -> complex:
    """``<[M^2, p]> - 2 <M> <[M, p]>`` (purely imaginary)."""
    return _comm(phi, m, 2) - 2 * observable_mean(phi, m) * _comm(phi, m)


def c_statistic(phi: PointerState, m: PointerObservable) -> float:
    """``<{M^2, p}> - 2 <M> <{M, p}>``; :func:`b_statistic` with anticommutators."""
    return (_anti(phi, m, 2) - 2 * observable_mean(phi, m) * _anti(phi, m)).real


@dataclass(frozen=True)
class SensitivityReport:
    """Single-reading sensitivities; divide by sqrt(n) for an n-reading mean.

    Entries that do not apply to the measurement are NaN.
    ``im_accuracy_term`` is the ``Im A_w`` contribution to the final
    variance; a negative value means the imaginary part improves the
    accuracy of ``Re A_w``.
    """

    delta_mean_a: float = math.nan
    delta_gamma: float = math.nan
    delta_re_aw: float = math.nan
    b_mp: complex = complex(math.nan)
    c_mp: float = math.nan
    variance_final: float = math.nan
    im_accuracy_term: float = math.nan


def _denominator(phi, m, gamma):
    if m.is_momentum:
        raise UndefinedSensitivity("M = p is excluded: [p, p] = 0")
    comm = _comm(phi, m)
    if abs(comm) < COMMUTATOR_TOL:
        raise UndefinedSensitivity(f"<[M, p]> = {comm:.2e} vanishes")
    return comm, abs(1j / phi.grid.hbar * gamma * comm)


def _sqrt_variance(v):
    if v < 0:
        raise InvalidRegime(f"first-order variance {v:.3e} is negative")
    return math.sqrt(v)


def sensitivity_ps(m: PointerObservable, psi: SystemState, a: SystemOperator,
                   phi: PointerState, gamma: float) -> SensitivityReport:
    """Error-propagation accuracy of ``<psi|A|psi>`` (and of ``gamma``) from the mean of ``M``.

    Raises
    ------
    UndefinedSensitivity
        For ``M = p`` or whenever ``<[M, p]>`` vanishes.
    InvalidRegime
        If the first-order final variance is negative.
    """
    hbar = phi.grid.hbar
    comm, den = _denominator(phi, m, gamma)
    mean_a = expectation(psi, a)
    b = b_statistic(phi, m)
    var_final = (variance(phi, m) - 1j / hbar * gamma * b * mean_a).real
    sd = _sqrt_variance(var_final)
    dgamma_den = abs(1j / hbar * mean_a * comm)
    return SensitivityReport(
        delta_mean_a=sd / den,
        delta_gamma=sd / dgamma_den if dgamma_den > 0 else math.nan,
        b_mp=b,
        c_mp=c_statistic(phi, m),
        variance_final=var_final,
    )


def sensitivity_gamma(psi: Union[SystemState, PPSContext], a: SystemOperator,
                      phi: PointerState) -> float:
    """Accuracy of ``gamma`` inferred from the mean pointer position.

    For a pre-selected ``psi`` this is ``Delta q / <A>``. Given a
    :class:`PPSContext`, the post-selected analogue
    ``Delta q / |Re A_w + (2/hbar) Im A_w cov(q, p)|`` is returned, which is
    ``Delta q`` when ``A_w = 1``.
    """
    dq = math.sqrt(variance(phi, POSITION))
    if isinstance(psi, PPSContext):
        aw = _aw(psi, a)
        slope = aw.real + 2 / phi.grid.hbar * aw.imag * ccv(phi, POSITION).real
    else:
        slope = expectation(psi, a)
    if abs(slope) < COMMUTATOR_TOL:
        raise UndefinedSensitivity("mean pointer position does not depend on gamma")
    return dq / abs(slope)


def sensitivity_re_weak_value(m: PointerObservable, ctx: PPSContext, a: SystemOperator,
                              phi: PointerState, gamma: float) -> SensitivityReport:
    """Error-propagation accuracy of ``Re A_w`` from the post-selected mean of ``M``.

    The final variance is expanded to first order in ``gamma``; the
    ``<M>^2`` inside the ``Im A_w`` bracket uses the pre-measurement mean.
    """
    hbar = phi.grid.hbar
    comm, den = _denominator(phi, m, gamma)
    aw = _aw(ctx, a)
    b = b_statistic(phi, m)
    c = c_statistic(phi, m)
    var_m = variance(phi, m)
    mean_m = observable_mean(phi, m)
    mean_p = observable_mean(phi, MOMENTUM)
    im_term = gamma / hbar * (c - 2 * mean_p * (var_m - mean_m ** 2)) * aw.imag
    var_final = (var_m - 1j / hbar * gamma * b * aw.real).real + im_term
    sd = _sqrt_variance(var_final)
    dgamma = (-1j / hbar * aw.conjugate() * comm + 2 / hbar * aw.imag * ccv(phi, m)).real
    return SensitivityReport(
        delta_gamma=sd / abs(dgamma) if abs(dgamma) > 0 else math.nan,
        delta_re_aw=sd / den,
        b_mp=b,
        c_mp=c,
        variance_final=var_final,
        im_accuracy_term=im_term,
    )


# -- convergence -------------------------------------------------------------------

def exact_mean(m: PointerObservable, config: MeasurementConfig,
               psi: Optional[SystemState] = None, ctx: Optional[PPSContext] = None) -> float:
    """Exact pointer mean at ``config.gamma``.

    Uses the closed forms when the operator is a projector and the
    brute-force evolution otherwise.
    """
    a, phi, gamma = config.op, config.phi0, config.gamma
    projector = a.is_projector()
    if ctx is None:
        if projector:
            return ps_mean(m, psi, phi, a, gamma)
        joint = evolve_joint(psi, phi, a, gamma)
        return mean_rows(phi.grid, joint.amplitudes, m)
    if projector:
        return pps_mean(m, ctx, a, phi, gamma)
    pointer, _ = oracle_post_select(evolve_joint(ctx.psi_i, phi, a, gamma), ctx.psi_f)
    return observable_mean(pointer, m)


@dataclass
class ConvergenceTable:
    gammas: List[float] = field(default_factory=list)
    exact: List[float] = field(default_factory=list)
    weak: List[float] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.abs(np.array(self.exact) - np.array(self.weak))

    @property
    def ratios(self) -> np.ndarray:
        """Error ratio between consecutive entries (NaN where undefined)."""
        e = self.errors
        with np.errstate(divide="ignore", invalid="ignore"):
            return e[:-1] / e[1:]

    def slope(self) -> float:
        """Least-squares slope of log(error) against log(gamma)."""
        g = np.array(self.gammas)
        e = self.errors
        keep = (g > 0) & (e > 0)
        if keep.sum() < 2:
            return math.nan
        return float(np.polyfit(np.log(g[keep]), np.log(e[keep]), 1)[0])

    def rows(self):
        r = np.concatenate([[math.nan], self.ratios])
        return list(zip(self.gammas, self.exact, self.weak, self.errors, r))


def convergence_probe(config: MeasurementConfig, m: PointerObservable,
                      gamma_sequence: Sequence[float], psi: Optional[SystemState] = None,
                      ctx: Optional[PPSContext] = None) -> ConvergenceTable:
    """Tabulate ``|exact - weak|`` over ``gamma_sequence``.

    Pass ``psi`` for a pre-selected instance or ``ctx`` for a pre/post-selected
    one. For small decreasing couplings the consecutive ratios approach
    ``(gamma_k / gamma_{k+1})**2``.
    """
    if (psi is None) == (ctx is None):
        raise ValueError("give exactly one of psi or ctx")
    gammas = [float(g) for g in gamma_sequence]
    if any(g < 0 for g in gammas):
        raise ValueError("couplings must be non-negative")
    table = ConvergenceTable()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakRegimeWarning)
        for g in gammas:
            cfg = replace(config, gamma=g)
            ex = exact_mean(m, cfg, psi=psi, ctx=ctx)
            if ctx is None:
                wk = weak_ps_mean(m, psi, config.op, config.phi0, g)
            else:
                wk = weak_pps_mean(m, ctx, config.op, config.phi0, g)
            table.gammas.append(g)
            table.exact.append(ex)
            table.weak.append(wk)
    return table
