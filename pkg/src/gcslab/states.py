"""Generalized coherent states: wavefunctions, densities, moments, uncertainty."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import SQRT2, SeedCoefficients, coefficient_functions, phase_integral
from .errors import DegenerateSeedError, HeisenbergViolationError

PI_QUARTER = math.pi ** -0.25


def zeta_from_initial(seed, q0, p0):
    """Eigenvalue of the annihilation operator for initial means (q0, p0)."""
    return (seed.f0 * q0 + 1j * seed.g0 * p0) / SQRT2


def initial_means(seed, zeta):
    """Inverse of :func:`zeta_from_initial`."""
    zeta = complex(zeta)
    return (
        SQRT2 * (seed.g0.conjugate() * zeta).real,
        SQRT2 * (seed.f0.conjugate() * zeta).imag,
    )


@dataclass(frozen=True)
class GcsState:
    """A generalized coherent state in dimensionless variables.

    Parameters
    ----------
    seed : SeedCoefficients
    Xi : float
        Dimensionless field strength.
    alpha : float
        Gauge mixing angle in [0, pi/2].
    zeta : complex
        Eigenvalue of the annihilation-type integral of motion.
    """

    seed: SeedCoefficients
    Xi: float = 0.0
    alpha: float = math.pi / 2
    zeta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "zeta", complex(self.zeta))
        if not 0.0 <= self.alpha <= math.pi / 2:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha!r}")

    @classmethod
    def from_means(cls, seed, Xi, alpha, q0, p0):
        return cls(seed, Xi, alpha, zeta_from_initial(seed, q0, p0))

    @property
    def initial_means(self):
        return initial_means(self.seed, self.zeta)


class MomentSet(NamedTuple):
    tau: float
    mean_q: float
    mean_p: float
    sigma_q: float
    sigma_p: float
    sigma_qp: float


class UncertaintyReport(NamedTuple):
    heisenberg_product: float
    rs_residual: float


def _sqrt_g(seed, g):
    # g(tau)/g0 has positive imaginary part for tau > 0, so the principal root
    # of the ratio is continuous in tau.
    return cmath.sqrt(seed.g0) * np.sqrt(g / seed.g0)


def moments(state, tau):
    """Closed-form means, deviations and covariance at time ``tau``."""
    seed = state.seed
    q0, p0 = state.initial_means
    _, g, _ = coefficient_functions(seed, state.Xi, state.alpha, tau)
    covariance = (seed.f0.conjugate() * g - 1.0) / 2j
    scale = abs(seed.f0.conjugate() * g) + 1.0
    if abs(covariance.imag) > 1e-12 * scale:
        raise DegenerateSeedError(f"covariance has imaginary part {covariance.imag!r}")
    return MomentSet(
        tau=float(tau),
        mean_q=q0 + p0 * tau + 0.5 * state.Xi * tau**2,
        mean_p=p0 + state.Xi * tau * math.sin(state.alpha) ** 2,
        sigma_q=abs(g) / SQRT2,
        sigma_p=abs(seed.f0) / SQRT2,
        sigma_qp=covariance.real,
    )


def evaluate_gcs(state, q, tau, check=False, phase_term=True):
    """Wavefunction Phi_zeta(q, tau) in the centred Gaussian form.

    Parameters
    ----------
    state : GcsState
    q : float or ndarray
    tau : float
        Time, ``tau >= 0``.
    check : bool
        Also evaluate the uncentred form and raise if the two differ by more
        than 1e-10.
    phase_term : bool
        Include the integrated phase. Only for diagnostics: without it the
        result does not solve the Schrodinger equation when ``Xi != 0``.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    seed = state.seed
    q = np.asarray(q, dtype=float)
    _, g, phi = coefficient_functions(seed, state.Xi, state.alpha, tau)
    if abs(g) < 1e-300:
        raise DegenerateSeedError("g(tau) vanishes")
    m = moments(state, tau)
    integral = phase_integral(seed, state.Xi, state.alpha, tau) if phase_term else 0.0
    rho = (
        ((seed.f0 * phi.conjugate()).imag * m.mean_q + (g.conjugate() * phi).real * m.mean_p) / SQRT2
        + (g.conjugate() / g * phi**2 / 2).imag
        - integral
    )
    dq = q - m.mean_q
    value = (
        PI_QUARTER
        / _sqrt_g(seed, g)
        * np.exp(-seed.f0 / g * dq**2 / 2 + 0.5j * m.mean_p * (2 * q - m.mean_q) + 1j * rho)
    )
    if check:
        other = _evaluate_uncentred(state, q, tau, g, phi, integral)
        diff = np.max(np.abs(value - other))
        if diff > 1e-10:
            raise RuntimeError(f"wavefunction forms disagree by {diff:.3e}")
    return value


def _evaluate_uncentred(state, q, tau, g, phi, integral):
    seed = state.seed
    zeta = state.zeta
    gc = g.conjugate()
    displacement = np.exp(
        SQRT2 * (q + SQRT2 * (phi * gc).real) / g * zeta - gc / g * zeta**2 / 2 - abs(zeta) ** 2 / 2
    )
    vacuum = (
        PI_QUARTER
        / _sqrt_g(seed, g)
        * np.exp(
            -seed.f0 / g * q**2 / 2
            - SQRT2 * phi / g * q
            - abs(g) ** 2 * (phi / g).real ** 2
            - 1j * integral
        )
    )
    return displacement * vacuum


def density(state, q, tau):
    """Gaussian probability density |Phi|^2."""
    m = moments(state, tau)
    q = np.asarray(q, dtype=float)
    return np.exp(-((q - m.mean_q) ** 2) / (2 * m.sigma_q**2)) / (math.sqrt(2 * math.pi) * m.sigma_q)


def sigma_q_closed_form(sigma_q0, sigma_p0, tau, branch=1):
    """Coordinate deviation from the initial deviations alone.

    ``branch`` is the sign in front of the cross term; +1 corresponds to
    Im(f0 g0*) = -sqrt(4 sq^2 sp^2 - 1).
    """
    excess = 4.0 * sigma_q0**2 * sigma_p0**2 - 1.0
    if excess < -1e-12:
        raise HeisenbergViolationError(
            f"sigma_q * sigma_p = {sigma_q0 * sigma_p0!r} < 1/2", product=sigma_q0 * sigma_p0
        )
    cross = branch * math.sqrt(max(excess, 0.0))
    return np.sqrt(sigma_q0**2 + cross * tau + sigma_p0**2 * np.asarray(tau) ** 2)


def check_uncertainty(state, tau):
    """Heisenberg product and Robertson-Schrodinger residual at ``tau``.

    Variances are formed from the components of f0 and g(tau) directly rather
    than by squaring the deviations, which keeps the residual at roundoff level.
    """
    m = moments(state, tau)
    f0 = state.seed.f0
    g = state.seed.g0 + 1j * f0 * tau
    var_q = 0.5 * (g.real * g.real + g.imag * g.imag)
    var_p = 0.5 * (f0.real * f0.real + f0.imag * f0.imag)
    return UncertaintyReport(
        heisenberg_product=m.sigma_q * m.sigma_p,
        rs_residual=var_q * var_p - m.sigma_qp**2 - 0.25,
    )


def cs_specialize(sigma_q0):
    """Seed of the coherent state minimizing sigma_q sigma_p at tau = 0."""
    if not sigma_q0 > 0:
        raise ValueError(f"sigma_q0 must be positive, got {sigma_q0!r}")
    g0 = SQRT2 * sigma_q0
    return SeedCoefficients(1.0 / g0, g0)


def classical_correspondence(state, setup):
    """Initial classical position and momentum matching the state's means."""
    seed = state.seed
    sigma_z = setup.length_scale * abs(seed.g0) / SQRT2
    sigma_pz = setup.hbar * abs(seed.f0) / SQRT2 / setup.length_scale
    z0 = 2 * sigma_z * (cmath.exp(-1j * cmath.phase(seed.g0)) * state.zeta).real
    p0 = 2 * sigma_pz * (cmath.exp(-1j * cmath.phase(seed.f0)) * state.zeta).imag
    return z0, p0
