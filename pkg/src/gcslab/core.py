"""Physical setup, unit conversion and integral-of-motion coefficients.

The particle moves along z in a constant field E with a one-parameter gauge
family

    A0(z) = -z E sin^2(alpha),    A(t) = -c t E cos^2(alpha),

so the field enters the scalar potential for alpha = pi/2 and the vector
potential for alpha = 0. Everything past this module works in the
dimensionless variables

    q = z / l,   p = l p_z / hbar,   tau = hbar t / (m l^2),
    Xi = m^2 l^3 xi / hbar^2,  xi = e E / m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeedError, HeisenbergViolationError
from .quadrature import adaptive_gauss_legendre

SQRT2 = math.sqrt(2.0)
SEED_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DerivedScales:
    """Natural scales of the particle: reduced Compton wavelength and critical field.

    The critical field m^2 c^3 / (|e| hbar) uses the charge magnitude.
    """

    compton: float
    critical_field: float
    hbar: float

    def de_broglie(self, p_z):
        """Wavelength 2 pi hbar / |p_z|; undefined for p_z = 0."""
        if p_z == 0:
            raise ValueError("de Broglie wavelength is undefined for zero momentum")
        return 2.0 * math.pi * self.hbar / abs(p_z)


@dataclass(frozen=True)
class PhysicalSetup:
    """Particle, field and unit scale.

    ``charge`` is signed (an electron has a negative charge); ``xi`` and the
    dimensionless field ``Xi`` carry its sign.
    """

    mass: float
    charge: float
    light_speed: float
    hbar: float
    field_amplitude: float = 0.0
    alpha: float = math.pi / 2
    length_scale: float = 1.0

    def __post_init__(self):
        for name in ("mass", "light_speed", "hbar", "length_scale"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (self.field_amplitude >= 0 and math.isfinite(self.field_amplitude)):
            raise ValueError(f"field_amplitude must be >= 0, got {self.field_amplitude!r}")
        if not 0.0 <= self.alpha <= math.pi / 2:
            raise ValueError(f"alpha must lie in [0, pi/2], got {self.alpha!r}")
        if not math.isfinite(self.charge):
            raise ValueError("charge must be finite")

    @classmethod
    def natural(cls, field_amplitude=0.0, alpha=math.pi / 2, length_scale=1.0, charge=1.0):
        """Units with hbar = m = c = 1."""
        return cls(1.0, charge, 1.0, 1.0, field_amplitude, alpha, length_scale)

    @property
    def xi(self):
        """Acceleration e E / m (signed)."""
        return self.charge * self.field_amplitude / self.mass

    @property
    def Xi(self):
        """Dimensionless field m^2 l^3 xi / hbar^2."""
        return self.mass**2 * self.length_scale**3 * self.xi / self.hbar**2

    @property
    def scales(self):
        return DerivedScales(
            compton=self.hbar / (self.mass * self.light_speed),
            critical_field=self.mass**2 * self.light_speed**3 / (abs(self.charge) * self.hbar)
            if self.charge != 0
            else math.inf,
            hbar=self.hbar,
        )

    def scalar_potential(self, z):
        return -np.asarray(z) * self.field_amplitude * math.sin(self.alpha) ** 2

    def vector_potential(self, t):
        return -self.light_speed * np.asarray(t) * self.field_amplitude * math.cos(self.alpha) ** 2


@dataclass(frozen=True)
class SeedCoefficients:
    """Initial values (f0, g0) of the integral-of-motion coefficients.

    The annihilation/creation commutator fixes Re(f0 g0*) = 1.
    """

    f0: complex
    g0: complex

    def __post_init__(self):
        object.__setattr__(self, "f0", complex(self.f0))
        object.__setattr__(self, "g0", complex(self.g0))
        product = self.f0 * self.g0.conjugate()
        if not (math.isfinite(product.real) and abs(product.real - 1.0) <= SEED_TOLERANCE):
            raise DegenerateSeedError(f"Re(f0 g0*) = {product.real!r}, expected 1")

    @classmethod
    def from_deviations(cls, sigma_q, sigma_p, branch=1, phase=0.0):
        """Seed with |g0| = sqrt(2) sigma_q and |f0| = sqrt(2) sigma_p.

        The relative phase is fixed by Im(f0 g0*) = -branch * sqrt(4 sq^2 sp^2 - 1);
        ``branch=+1`` gives the monotonically spreading packet. ``phase`` is the
        common argument of f0, which only changes the state's global labelling.
        """
        if sigma_q <= 0 or sigma_p <= 0:
            raise ValueError("standard deviations must be positive")
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        excess = 4.0 * sigma_q**2 * sigma_p**2 - 1.0
        if excess < -1e-12:
            raise HeisenbergViolationError(
                f"sigma_q * sigma_p = {sigma_q * sigma_p!r} < 1/2", product=sigma_q * sigma_p
            )
        s = math.sqrt(max(excess, 0.0))
        f0 = SQRT2 * sigma_p * complex(math.cos(phase), math.sin(phase))
        g0 = complex(1.0, branch * s) / f0.conjugate()
        return cls(f0, g0)

    @property
    def commutator(self):
        return (self.f0 * self.g0.conjugate()).real


def classical_trajectory(setup, z0, p0, t):
    """Solution of Hamilton's equations for canonical z and p_z."""
    t = np.asarray(t, dtype=float)
    xi = setup.xi
    z = z0 + p0 / setup.mass * t + 0.5 * xi * t**2
    p = p0 + setup.mass * xi * t * math.sin(setup.alpha) ** 2
    if z.ndim == 0:
        return float(z), float(p)
    return z, p


def to_dimensionless(setup, z, p_z, t):
    l = setup.length_scale
    return z / l, l * p_z / setup.hbar, setup.hbar * t / (setup.mass * l**2)


def from_dimensionless(setup, q, p, tau):
    l = setup.length_scale
    return q * l, setup.hbar * p / l, setup.mass * l**2 * tau / setup.hbar


def coefficient_functions(seed, Xi, alpha, tau):
    """Return f(tau), g(tau), phi(tau) solving the integral-of-motion equations.

    phi is pinned by phi(0) = 0.
    """
    tau = np.asarray(tau, dtype=float)
    f = seed.f0 * np.ones_like(tau, dtype=complex)
    g = seed.g0 + 1j * seed.f0 * tau
    phi = -(1j * g * math.sin(alpha) ** 2 + 0.5 * seed.f0 * tau) * Xi * tau / SQRT2
    if tau.ndim == 0:
        return complex(f), complex(g), complex(phi)
    return f, g, phi


def q_function(seed, Xi, alpha, tau):
    """Q(tau) = (1 - i f0 tau / (2 g))^2 Xi^2 tau^2; independent of alpha."""
    tau = np.asarray(tau, dtype=float)
    g = seed.g0 + 1j * seed.f0 * tau
    if np.any(np.abs(g) < 1e-300):
        raise DegenerateSeedError("g(tau) vanishes")
    value = (1.0 - 0.5j * seed.f0 * tau / g) ** 2 * Xi**2 * tau**2
    return complex(value) if value.ndim == 0 else value


def phase_integral(seed, Xi, alpha, tau, abs_tol=1e-12, max_subdivisions=60):
    """Integral of Re Q(s) / 2 over s in [0, tau]."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau!r}")
    if Xi == 0 or tau == 0:
        return 0.0
    value, _ = adaptive_gauss_legendre(
        lambda s: 0.5 * np.real(q_function(seed, Xi, alpha, s)),
        0.0,
        tau,
        abs_tol=abs_tol,
        max_subdivisions=max_subdivisions,
    )
    return float(value)
