"""
One-dimensional pointer on a uniform periodic grid.

Position acts diagonally on the grid samples; momentum acts diagonally on
the discrete Fourier coefficients, ``p_k = 2 pi hbar fftfreq(N, dq)``.
Translation is a momentum-space phase ``exp(-i gamma p / hbar)``, which is
exact for band-limited wavefunctions and needs no interpolation.

Array arguments named ``rows`` may carry leading axes (e.g. a system index);
expectations then sum over every axis, which gives the mean of a
pointer-only operator in the reduced pointer state.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import GridContainment

NORM_TOL = 1e-10
EDGE_TOL = 1e-10
EDGE_POINTS = 2
WRAP_TOL = 1e-9


@dataclass(frozen=True)
class PointerGrid:
    """Uniform grid of ``n_points`` cells on ``[q_min, q_max)``."""

    n_points: int = 1024
    q_min: float = -20.0
    q_max: float = 20.0
    hbar: float = 1.0

    def __post_init__(self):
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 64, got {n}")
        if not self.q_max > self.q_min:
            raise ValueError("q_max must exceed q_min")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def centered(cls, sigma: float = 1.0, half_width: float = 20.0,
                 n_points: int = 1024, hbar: float = 1.0) -> "PointerGrid":
        """Grid on ``[-half_width * sigma, half_width * sigma)``."""
        return cls(n_points, -half_width * sigma, half_width * sigma, hbar)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n_points

    @property
    def length(self) -> float:
        return self.q_max - self.q_min

    @cached_property
    def q(self) -> np.ndarray:
        q = self.q_min + self.dq * np.arange(self.n_points)
        q.setflags(write=False)
        return q

    @cached_property
    def p(self) -> np.ndarray:
        p = 2 * np.pi * self.hbar * np.fft.fftfreq(self.n_points, self.dq)
        p.setflags(write=False)
        return p

    def metadata(self) -> dict:
        return {"n_points": self.n_points, "q_min": self.q_min, "q_max": self.q_max,
                "dq": self.dq, "hbar": self.hbar}


# -- raw array kernels -------------------------------------------------------

def apply_q(grid: PointerGrid, rows: np.ndarray, power: int = 1) -> np.ndarray:
    if power == 0:
        return np.asarray(rows, dtype=complex)
    return grid.q ** power * rows


def apply_p(grid: PointerGrid, rows: np.ndarray, power: int = 1) -> np.ndarray:
    if power == 0:
        return np.asarray(rows, dtype=complex)
    return np.fft.ifft(grid.p ** power * np.fft.fft(rows, axis=-1), axis=-1)


def shift(grid: PointerGrid, rows: np.ndarray, gamma: float) -> np.ndarray:
    """``phi(q) -> phi(q - gamma)`` along the last axis."""
    if gamma == 0:
        return np.array(rows, dtype=complex)
    kernel = np.exp(-1j * gamma * grid.p / grid.hbar)
    return np.fft.ifft(kernel * np.fft.fft(rows, axis=-1), axis=-1)


def braket(grid: PointerGrid, a: np.ndarray, b: np.ndarray) -> complex:
    """``<a|b>`` by grid quadrature, summed over all axes."""
    return complex(np.vdot(a, b) * grid.dq)


def edge_ratio(amplitudes: np.ndarray) -> float:
    """Largest edge magnitude (outermost points on both sides) relative to the peak."""
    mag = np.abs(amplitudes)
    peak = mag.max()
    if peak == 0:
        return 0.0
    edge = max(mag[..., :EDGE_POINTS].max(), mag[..., -EDGE_POINTS:].max())
    return float(edge / peak)


def position_centroid(grid: PointerGrid, rows: np.ndarray) -> float:
    """Norm-weighted mean position of one or more stacked rows."""
    dens = np.abs(rows) ** 2
    return float(np.sum(dens * grid.q) / np.sum(dens))


def check_no_wrap(grid: PointerGrid, before: np.ndarray, after: np.ndarray,
                  expected_shift: float):
    """Raise GridContainment if a periodic shift wrapped part of the state around.

    A contained translation moves the centroid by exactly ``expected_shift``;
    any portion that crossed the grid boundary moves it by a multiple of the
    grid length instead.
    """
    moved = position_centroid(grid, after) - position_centroid(grid, before)
    if abs(moved - expected_shift) > WRAP_TOL * grid.length:
        raise GridContainment(
            f"shift of {expected_shift:g} wrapped around the periodic grid "
            f"(centroid moved by {moved:g})")


# -- states --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointerState:
    """Normalized pointer wavefunction sampled on ``grid``."""

    grid: PointerGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} amplitudes, got shape {a.shape}")
        norm2 = float(np.vdot(a, a).real) * self.grid.dq
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"pointer state not normalized: {norm2!r}")
        r = edge_ratio(a)
        if r >= EDGE_TOL:
            raise GridContainment(f"wavefunction reaches grid edge (edge/peak = {r:.2e})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_amplitudes(cls, grid: PointerGrid, amplitudes) -> "PointerState":
        """Normalize arbitrary samples and wrap them."""
        a = np.asarray(amplitudes, dtype=complex)
        n = np.sqrt(np.vdot(a, a).real * grid.dq)
        if n == 0 or not np.isfinite(n):
            raise ValueError("cannot normalize a zero or non-finite wavefunction")
        return cls(grid, a / n)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_csv(self, fh=None) -> Optional[str]:
        """Write ``q, Re phi, Im phi, |phi|^2`` with ``#`` metadata lines.

        Returns the text when ``fh`` is None.
        """
        out = fh if fh is not None else io.StringIO()
        for k, v in self.grid.metadata().items():
            out.write(f"# {k} = {v!r}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["q", "re_phi", "im_phi", "abs2_phi"])
        for q, z, d in zip(self.grid.q, self.amplitudes, self.density):
            w.writerow([f"{q:.17g}", f"{z.real:.17g}", f"{z.imag:.17g}", f"{d:.17g}"])
        if fh is None:
            return out.getvalue()
        return None

    @classmethod
    def from_csv(cls, text: str) -> "PointerState":
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].partition("=")
                meta[k.strip()] = float(v)
            elif line and not line.startswith("q,"):
                body.append([float(x) for x in line.split(",")])
        grid = PointerGrid(int(meta["n_points"]), meta["q_min"], meta["q_max"], meta["hbar"])
        body = np.array(body)
        return cls(grid, body[:, 1] + 1j * body[:, 2])


def gaussian_pointer(grid: PointerGrid, center: float = 0.0, sigma: float = 1.0,
                     chirp: float = 0.0, momentum: float = 0.0) -> PointerState:
    """Gaussian pointer with position variance ``sigma**2``.

    ``chirp`` adds a phase ``exp(i chirp q^2)`` and ``momentum`` a phase
    ``exp(i momentum q / hbar)``; both default to zero (a real, stationary packet).

    Raises
    ------
    GridContainment
        If ``center +- 6 sigma`` leaves the grid or the tails reach the grid edge.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if center - 6 * sigma < grid.q_min or center + 6 * sigma > grid.q_max:
        raise GridContainment(
            f"6-sigma support [{center - 6 * sigma}, {center + 6 * sigma}] leaves grid "
            f"[{grid.q_min}, {grid.q_max}]")
    q = grid.q
    env = np.exp(-((q - center) ** 2) / (4 * sigma ** 2))
    phase = np.exp(1j * (chirp * q ** 2 + momentum * q / grid.hbar))
    return PointerState.from_amplitudes(grid, env * phase)


def translate(phi: PointerState, gamma: float) -> PointerState:
    """Apply the translation operator: ``<q|S|phi> = phi(q - gamma)``.

    Raises
    ------
    GridContainment
        If the shifted state reaches the grid edge or wraps around it.
    """
    out = shift(phi.grid, phi.amplitudes, gamma)
    check_no_wrap(phi.grid, phi.amplitudes, out, gamma)
    return PointerState(phi.grid, out)


# -- observables ---------------------------------------------------------------

@dataclass(frozen=True)
class PointerObservable:
    """Real polynomial in ``q`` and ``p``.

    ``terms`` holds ``(coefficient, q_power, p_power)`` triples. A mixed term
    ``q^a p^b`` is applied as ``(q^a p^b + p^b q^a) / 2`` so the operator is
    Hermitian.
    """

    terms: tuple = field(default=((1.0, 1, 0),))

    def __post_init__(self):
        clean = []
        for t in self.terms:
            c, a, b = t
            if int(a) < 0 or int(b) < 0:
                raise ValueError("powers must be non-negative")
            clean.append((float(c), int(a), int(b)))
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def position(cls) -> "PointerObservable":
        return cls(((1.0, 1, 0),))

    @classmethod
    def momentum(cls) -> "PointerObservable":
        return cls(((1.0, 0, 1),))

    @classmethod
    def polynomial(cls, terms: Sequence) -> "PointerObservable":
        return cls(tuple(terms))

    @classmethod
    def parse(cls, spec) -> "PointerObservable":
        """Build from ``"q"``, ``"p"``, ``"q^2"``, ``"p^3"``, ``"qp"`` or ``{"terms": [...]}``."""
        if isinstance(spec, PointerObservable):
            return spec
        if isinstance(spec, dict):
            return cls(tuple(tuple(t) for t in spec["terms"]))
        s = str(spec).replace(" ", "").replace("**", "^")
        if s in ("qp", "pq"):
            return cls(((1.0, 1, 1),))
        if not s or s[0] not in "qp":
            raise ValueError(f"unrecognized observable {spec!r}")
        power = int(s[2:]) if s[1:2] == "^" else (1 if len(s) == 1 else None)
        if power is None:
            raise ValueError(f"unrecognized observable {spec!r}")
        return cls(((1.0, power, 0),)) if s[0] == "q" else cls(((1.0, 0, power),))

    @property
    def kind(self) -> str:
        if all(b == 0 for _, _, b in self.terms):
            return "position"
        if all(a == 0 for _, a, _ in self.terms):
            return "momentum"
        return "polynomial"

    @property
    def is_position(self) -> bool:
        return self.terms == ((1.0, 1, 0),)

    @property
    def is_momentum(self) -> bool:
        return self.terms == ((1.0, 0, 1),)

    @property
    def label(self) -> str:
        parts = []
        for c, a, b in self.terms:
            mono = "".join(s if k == 1 else f"{s}^{k}" for s, k in (("q", a), ("p", b)) if k)
            mono = mono or "1"
            parts.append(mono if c == 1.0 else f"{c:g}*{mono}")
        return "+".join(parts)

    def apply(self, grid: PointerGrid, rows: np.ndarray) -> np.ndarray:
        """``M|rows>`` along the last axis."""
        rows = np.asarray(rows, dtype=complex)
        out = np.zeros_like(rows)
        for c, a, b in self.terms:
            if b == 0:
                out += c * apply_q(grid, rows, a)
            elif a == 0:
                out += c * apply_p(grid, rows, b)
            else:
                qp = apply_q(grid, apply_p(grid, rows, b), a)
                pq = apply_p(grid, apply_q(grid, rows, a), b)
                out += 0.5 * c * (qp + pq)
        return out


POSITION = PointerObservable.position()
MOMENTUM = PointerObservable.momentum()


def _density_mean(grid, rows, m):
    # diagonal representations avoid an operator application
    if m.kind == "position":
        w = (np.abs(rows) ** 2).reshape(-1, grid.n_points).sum(axis=0)
        vals = sum(c * grid.q ** a for c, a, _ in m.terms)
        return float(np.dot(w, vals) * grid.dq)
    w = (np.abs(np.fft.fft(rows, axis=-1)) ** 2).reshape(-1, grid.n_points).sum(axis=0)
    vals = sum(c * grid.p ** b for c, _, b in m.terms)
    return float(np.dot(w, vals) * grid.dq / grid.n_points)


def mean_rows(grid: PointerGrid, rows: np.ndarray, m: PointerObservable) -> float:
    if m.kind == "polynomial":
        return braket(grid, rows, m.apply(grid, rows)).real
    return _density_mean(grid, rows, m)


def observable_mean(phi: PointerState, m: PointerObservable) -> float:
    """``<phi|M|phi>``."""
    return mean_rows(phi.grid, phi.amplitudes, m)


def product_mean(grid: PointerGrid, rows, first, second) -> complex:
    """``<rows| first second |rows>`` for operator callables acting on arrays."""
    return braket(grid, rows, first(second(rows)))


def pair_statistic(grid: PointerGrid, rows, m: PointerObservable, sign: int,
                   power: int = 1) -> complex:
    """``<M^power p> + sign * <p M^power>``.

    ``sign=-1`` gives the commutator mean ``<[M^k, p]>``, ``sign=+1`` the
    anticommutator mean ``<{M^k, p}>``.
    """
    def mk(x):
        for _ in range(power):
            x = m.apply(grid, x)
        return x

    def p(x):
        return apply_p(grid, x)

    return product_mean(grid, rows, mk, p) + sign * product_mean(grid, rows, p, mk)


def commutator_mean(phi: PointerState, m: PointerObservable, power: int = 1) -> complex:
    """``<phi|[M^power, p]|phi>`` (purely imaginary)."""
    return pair_statistic(phi.grid, phi.amplitudes, m, -1, power)


def anticommutator_mean(phi: PointerState, m: PointerObservable, power: int = 1) -> float:
    """``<phi|{M^power, p}|phi>`` (real)."""
    return pair_statistic(phi.grid, phi.amplitudes, m, +1, power).real


def variance(phi: PointerState, m: PointerObservable) -> float:
    return _variance_rows(phi.grid, phi.amplitudes, m)


def _variance_rows(grid, rows, m):
    mean = mean_rows(grid, rows, m)
    mpsi = m.apply(grid, rows)
    return braket(grid, mpsi, mpsi).real - mean ** 2


def ccv(phi: PointerState, m: PointerObservable, n: PointerObservable = MOMENTUM) -> complex:
    """Complex covariance ``<M N> - <M><N>``."""
    g, rows = phi.grid, phi.amplitudes
    return (product_mean(g, rows, lambda x: m.apply(g, x), lambda x: n.apply(g, x))
            - mean_rows(g, rows, m) * mean_rows(g, rows, n))


def cov(phi: PointerState, m: PointerObservable, n: PointerObservable = MOMENTUM) -> float:
    """Symmetrized covariance ``<{M, N}>/2 - <M><N>``."""
    g, rows = phi.grid, phi.amplitudes
    mn = product_mean(g, rows, lambda x: m.apply(g, x), lambda x: n.apply(g, x))
    nm = product_mean(g, rows, lambda x: n.apply(g, x), lambda x: m.apply(g, x))
    return (0.5 * (mn + nm)).real - mean_rows(g, rows, m) * mean_rows(g, rows, n)


@dataclass(frozen=True)
class MomentReport:
    """Pointer moments for a state (or reduced pointer state).

    ``ccv_mp`` is ``<M p> - <M><p>``, ``ccv_pm`` the reversed order, and
    ``anticomm_mean`` is ``<{M, p}>``. ``mass``, when given, enables
    :meth:`dvar_q_dt` through the free-particle relation
    ``m d/dt(var q) = 2 cov(q, p)``.
    """

    mean_q: float
    mean_p: float
    var_q: float
    var_p: float
    cov_qp: float
    mean_m: float
    var_m: float
    ccv_mp: complex
    ccv_pm: complex
    cov_mp: float
    anticomm_mean: float
    mass: Optional[float] = None

    def dvar_q_dt(self) -> float:
        if self.mass is None:
            raise ValueError("pointer mass not set")
        return 2 * self.cov_qp / self.mass


def moments_rows(grid: PointerGrid, rows: np.ndarray, m: PointerObservable = POSITION,
                 mass: Optional[float] = None) -> MomentReport:
    """:func:`moments` for raw (possibly stacked) rows."""
    rows = np.asarray(rows, dtype=complex)

    def ap(x):
        return apply_p(grid, x)

    def aq(x):
        return apply_q(grid, x)

    def am(x):
        return m.apply(grid, x)

    mean_q = mean_rows(grid, rows, POSITION)
    mean_p = mean_rows(grid, rows, MOMENTUM)
    mean_m = mean_rows(grid, rows, m)
    qp = product_mean(grid, rows, aq, ap)
    pq = product_mean(grid, rows, ap, aq)
    mp = product_mean(grid, rows, am, ap)
    pm = product_mean(grid, rows, ap, am)
    return MomentReport(
        mean_q=mean_q,
        mean_p=mean_p,
        var_q=_variance_rows(grid, rows, POSITION),
        var_p=_variance_rows(grid, rows, MOMENTUM),
        cov_qp=(0.5 * (qp + pq)).real - mean_q * mean_p,
        mean_m=mean_m,
        var_m=_variance_rows(grid, rows, m),
        ccv_mp=mp - mean_m * mean_p,
        ccv_pm=pm - mean_p * mean_m,
        cov_mp=(0.5 * (mp + pm)).real - mean_m * mean_p,
        anticomm_mean=(mp + pm).real,
        mass=mass,
    )


def moments(phi: PointerState, m: PointerObservable = POSITION,
            mass: Optional[float] = None) -> MomentReport:
    """Means, variances, covariance and complex covariance of ``phi``."""
    return moments_rows(phi.grid, phi.amplitudes, m, mass)
