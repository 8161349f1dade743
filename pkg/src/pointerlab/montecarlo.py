"""
Monte-Carlo check of the error-propagation sensitivities.

Single pointer-position readings are drawn from the exact post-measurement
profile; each reading is inverted into an estimate of the measured quantity
using the first-order mean formula. The sample standard deviation of those
estimates is the empirical single-reading sensitivity.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import exact
from .hilbert import PPSContext, SystemOperator, SystemState, expectation, weak_value
from .oracle import evolve_joint, oracle_post_select
from .pointer import POSITION, PointerGrid, PointerState, ccv, observable_mean
from .weak import sensitivity_gamma, sensitivity_ps, sensitivity_re_weak_value


@dataclass(frozen=True)
class MonteCarloResult:
    quantity: str
    predicted: float
    empirical: float
    estimate_mean: float
    n: int

    @property
    def relative_error(self) -> float:
        return abs(self.empirical - self.predicted) / self.predicted

    @property
    def standard_error(self) -> float:
        """Empirical accuracy of the mean of all ``n`` readings."""
        return self.empirical / np.sqrt(self.n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["relative_error"] = self.relative_error
        return d


def sample_positions(grid: PointerGrid, profile: np.ndarray, n: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` positions from a gridded density (uniform within each cell)."""
    w = np.clip(np.asarray(profile, dtype=float), 0.0, None)
    w = w / w.sum()
    idx = rng.choice(grid.n_points, size=n, p=w)
    return grid.q[idx] + rng.uniform(-0.5, 0.5, size=n) * grid.dq


def ps_profile_any(psi: SystemState, a: SystemOperator, phi: PointerState,
                   gamma: float) -> np.ndarray:
    """Exact pre-selected profile for any Hermitian ``a``."""
    if a.is_projector():
        return exact.ps_profile(psi, phi, a, gamma)
    return evolve_joint(psi, phi, a, gamma).marginal()


def pps_profile_any(ctx: PPSContext, a: SystemOperator, phi: PointerState,
                    gamma: float) -> np.ndarray:
    """Exact post-selected profile for any Hermitian ``a``."""
    if a.is_projector():
        return exact.pps_profile(ctx, a, phi, gamma)
    pointer, _ = oracle_post_select(evolve_joint(ctx.psi_i, phi, a, gamma), ctx.psi_f)
    return pointer.density


def _result(quantity, predicted, estimates):
    return MonteCarloResult(quantity, float(predicted), float(np.std(estimates, ddof=1)),
                            float(np.mean(estimates)), int(estimates.size))


def mc_mean_a(psi, a, phi, gamma, n, rng) -> MonteCarloResult:
    """Readings inverted as ``<A> = (q - <q>_phi) / gamma``."""
    readings = sample_positions(phi.grid, ps_profile_any(psi, a, phi, gamma), n, rng)
    est = (readings - observable_mean(phi, POSITION)) / gamma
    return _result("delta_mean_a", sensitivity_ps(POSITION, psi, a, phi, gamma).delta_mean_a, est)


def mc_gamma(psi, a, phi, gamma, n, rng) -> MonteCarloResult:
    """Readings inverted as ``gamma = (q - <q>_phi) / <A>``."""
    readings = sample_positions(phi.grid, ps_profile_any(psi, a, phi, gamma), n, rng)
    est = (readings - observable_mean(phi, POSITION)) / expectation(psi, a)
    return _result("delta_gamma", sensitivity_gamma(psi, a, phi), est)


def mc_re_weak_value(ctx, a, phi, gamma, n, rng) -> MonteCarloResult:
    """Readings inverted through ``q = <q> + gamma Re A_w + 2 (gamma/hbar) Im A_w cov(q, p)``."""
    aw = complex(weak_value((ctx.psi_i, ctx.psi_f), a, overlap_tolerance=0.0))
    hbar = phi.grid.hbar
    readings = sample_positions(phi.grid, pps_profile_any(ctx, a, phi, gamma), n, rng)
    offset = observable_mean(phi, POSITION) + 2 * gamma / hbar * aw.imag * ccv(phi, POSITION).real
    est = (readings - offset) / gamma
    predicted = sensitivity_re_weak_value(POSITION, ctx, a, phi, gamma).delta_re_aw
    return _result("delta_re_aw", predicted, est)
