"""Independent numerical checks of the closed-form states.

A Strang split-operator propagator integrates the dimensionless Schrodinger
equation on a periodic grid,

    d/dtau Phi = -i H Phi,
    H = p^2/2 + Xi tau cos^2(a) p - Xi q sin^2(a) + Xi^2 tau^2 cos^4(a) / 2,

with the momentum-diagonal part applied in Fourier space. All the commutators
beyond first order reduce to c-numbers for this Hamiltonian, so the splitting
error is a global phase of order dt^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EdgeLeakageError, GridMismatchError
from .states import MomentSet, evaluate_gcs, moments

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class SpatialGrid:
    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self):
        if not self.q_max > self.q_min:
            raise ValueError("q_max must exceed q_min")
        n = self.n_points
        if n < 256 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 256, got {n}")

    @property
    def dq(self):
        return (self.q_max - self.q_min) / self.n_points

    @property
    def points(self):
        return self.q_min + self.dq * np.arange(self.n_points)

    @property
    def momenta(self):
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dq)


DEFAULT_GRID = SpatialGrid(-20.0, 20.0, 4096)


@dataclass(frozen=True)
class WavefunctionSample:
    grid: SpatialGrid
    tau: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dq)


def sample_gcs(state, grid, tau):
    """Sample the closed-form state on ``grid``; the discrete norm must be 1 to 1e-6."""
    sample = WavefunctionSample(grid, float(tau), evaluate_gcs(state, grid.points, tau))
    if abs(sample.norm - 1.0) > NORM_TOLERANCE:
        raise EdgeLeakageError(
            f"discrete norm {sample.norm:.9f} on [{grid.q_min}, {grid.q_max}]; "
            "grid too small or too coarse for this state"
        )
    return sample


def oracle_grid(state, tau_final, base=DEFAULT_GRID, width=8.0):
    """Grid holding mean +- width*sigma at 0 and ``tau_final`` in both q and p.

    The q-range of ``base`` is doubled at fixed ``n_points`` until the packet
    fits; ``n_points`` is doubled only if the momentum content then exceeds the
    grid's Nyquist momentum.
    """
    grid = base
    ends = (moments(state, 0.0), moments(state, tau_final))
    for m in ends:
        lo, hi = m.mean_q - width * m.sigma_q, m.mean_q + width * m.sigma_q
        while lo < grid.q_min or hi > grid.q_max:
            centre = 0.5 * (grid.q_min + grid.q_max)
            half = grid.q_max - centre
            grid = SpatialGrid(centre - 2 * half, centre + 2 * half, grid.n_points)
    p_max = max(abs(m.mean_p) + width * m.sigma_p for m in ends)
    while p_max > math.pi / grid.dq:
        grid = SpatialGrid(grid.q_min, grid.q_max, 2 * grid.n_points)
    return grid


def _edge_ratio(values):
    density = np.abs(values) ** 2
    peak = density.max()
    return max(density[0], density[-1]) / peak if peak > 0 else math.inf


def propagate(sample, Xi, alpha, tau_final, dt=1e-4, edge_threshold=1e-12):
    """Split-operator propagation of ``sample`` up to ``tau_final``.

    The step is shortened slightly so that an integer number of steps lands on
    ``tau_final``. Explicit time dependence is evaluated at step midpoints.

    Raises
    ------
    EdgeLeakageError
        If the density at either edge exceeds ``edge_threshold`` times the peak.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt > 1e-3:
        warnings.warn(f"dt = {dt} exceeds 1e-3; splitting phase error grows as dt^2", stacklevel=2)
    span = tau_final - sample.tau
    if span < 0:
        raise ValueError("tau_final precedes the sample time")
    grid = sample.grid
    psi = sample.values.copy()
    if _edge_ratio(psi) > edge_threshold:
        raise EdgeLeakageError(f"initial edge density ratio {_edge_ratio(psi):.2e}")
    n_steps = max(1, math.ceil(span / dt - 1e-9)) if span > 0 else 0
    if n_steps == 0:
        return WavefunctionSample(grid, float(tau_final), psi)
    dt = span / n_steps

    q = grid.points
    p = grid.momenta
    c2 = math.cos(alpha) ** 2
    s2 = math.sin(alpha) ** 2
    kinetic = 0.5 * p**2
    drift = Xi * c2 * p
    linear = np.exp(1j * Xi * s2 * q * dt)

    psi_p = np.fft.fft(psi)
    for k in range(n_steps):
        tm = sample.tau + (k + 0.5) * dt
        half_kick = np.exp(-0.5j * dt * (kinetic + tm * drift))
        psi_p *= half_kick
        psi = np.fft.ifft(psi_p)
        psi *= linear * np.exp(-0.5j * dt * (Xi * tm) ** 2 * c2**2)
        ratio = _edge_ratio(psi)
        if ratio > edge_threshold:
            raise EdgeLeakageError(
                f"edge density ratio {ratio:.2e} at tau = {sample.tau + (k + 1) * dt:.6f}"
            )
        psi_p = np.fft.fft(psi)
        psi_p *= half_kick
    return WavefunctionSample(grid, float(tau_final), np.fft.ifft(psi_p))


def _spectral_apply(values, grid, power):
    return np.fft.ifft(grid.momenta**power * np.fft.fft(values))


def quadrature_moments(sample):
    """Moments of a sampled wavefunction by discrete sums.

    Momentum moments and the symmetrized covariance are evaluated spectrally.
    """
    norm = sample.norm
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"sample is not normalized (norm {norm:.9f})")
    grid = sample.grid
    q = grid.points
    psi = sample.values
    weight = np.abs(psi) ** 2 * grid.dq / norm
    mean_q = float(np.sum(q * weight))
    var_q = float(np.sum((q - mean_q) ** 2 * weight))

    p = grid.momenta
    spectrum = np.abs(np.fft.fft(psi)) ** 2
    spectrum /= spectrum.sum()
    mean_p = float(np.sum(p * spectrum))
    var_p = float(np.sum((p - mean_p) ** 2 * spectrum))

    dp_psi = _spectral_apply(psi, grid, 1) - mean_p * psi
    covariance = float(np.real(np.sum(np.conj(psi) * (q - mean_q) * dp_psi)) * grid.dq / norm)
    return MomentSet(sample.tau, mean_q, mean_p, math.sqrt(var_q), math.sqrt(var_p), covariance)


def apply_hamiltonian(values, grid, Xi, alpha, tau):
    c2 = math.cos(alpha) ** 2
    s2 = math.sin(alpha) ** 2
    q = grid.points
    return (
        0.5 * _spectral_apply(values, grid, 2)
        + Xi * tau * c2 * _spectral_apply(values, grid, 1)
        + (-Xi * s2 * q + 0.5 * (Xi * tau) ** 2 * c2**2) * values
    )


def schrodinger_residual(state, grid, tau, h=1e-4, amplitude=evaluate_gcs):
    """Grid L2 norm of (d/dtau + iH) Phi.

    The time derivative is a five-point central difference of ``amplitude``
    with step ``h``; spatial derivatives are spectral.
    """
    if not 1e-6 <= h <= 1e-3:
        raise ValueError(f"h must lie in [1e-6, 1e-3], got {h!r}")
    if tau < 2 * h:
        raise ValueError("tau must be at least 2h for central differences")
    q = grid.points

    def at(t):
        return amplitude(state, q, t)

    dphi = (-at(tau + 2 * h) + 8 * at(tau + h) - 8 * at(tau - h) + at(tau - 2 * h)) / (12 * h)
    phi = at(tau)
    residual = dphi + 1j * apply_hamiltonian(phi, grid, state.Xi, state.alpha, tau)
    return float(np.sqrt(np.sum(np.abs(residual) ** 2) * grid.dq))


class ResidualStudy(NamedTuple):
    steps: tuple
    residuals: tuple
    roundoff_dominated: bool


def residual_convergence(state, grid, tau, steps=(1e-3, 5e-4, 2.5e-4), amplitude=evaluate_gcs):
    """Residuals for decreasing steps; flags roundoff when they stop decreasing."""
    steps = tuple(sorted(steps, reverse=True))
    residuals = tuple(schrodinger_residual(state, grid, tau, h, amplitude) for h in steps)
    flag = any(b >= a for a, b in zip(residuals, residuals[1:]))
    return ResidualStudy(steps, residuals, flag)


def l2_distance(a, b, phase_aligned=False):
    """Grid L2 distance; optionally minimized over a global phase of ``b``."""
    if a.grid != b.grid:
        raise GridMismatchError("samples live on different grids")
    if abs(a.tau - b.tau) > 1e-12 * max(1.0, abs(a.tau)):
        raise GridMismatchError(f"samples at different times {a.tau} and {b.tau}")
    dq = a.grid.dq
    if not phase_aligned:
        return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * dq))
    overlap = np.sum(np.conj(b.values) * a.values) * dq
    squared = a.norm + b.norm - 2 * abs(overlap)
    return float(math.sqrt(max(squared, 0.0)))
