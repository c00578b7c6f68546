"""When does a coherent state behave semiclassically?

The criterion compares the growth of the packet width with the classical
displacement,

    R(t) = [sigma_z(t) - sigma_z(0)] / [z(t) - z0],

and calls the state semiclassical while R(t) <= 1. In units of the spreading
time t_sigma = m sigma_z / sigma_pz, with u = t / t_sigma,

    R(u) = (sqrt(1 + 2uY + u^2) - 1) / (uX + u^2 W),

so everything is fixed by three numbers X, Y, W (see :class:`RatioSet`).
Squaring shows that for u > 0

    R(u) <= 1  <=>  F(u) = 2(Y - X) + (1 - X^2 - 2W) u - 2XW u^2 - W^2 u^3 <= 0,

which :func:`semiclassical_intervals` solves exactly and the classifiers
bound in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import PhysicalSetup
from .errors import DomainError, HeisenbergViolationError, NoMotionError

EQUALITY_TOLERANCE = 1e-12
MINIMAL_TOLERANCE = 1e-9


class Regime(str, enum.Enum):
    ALWAYS = "SemiclassicalAlways"
    UNTIL = "SemiclassicalUntil"
    AFTER = "SemiclassicalAfter"
    QUANTUM = "QuantumAlways"


LABELS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "quantum")


@dataclass(frozen=True)
class RegimeVerdict:
    """Classification outcome.

    ``time_value`` (seconds) is the critical time for ``UNTIL`` and the
    critical or reference time for ``AFTER``; it is ``None`` otherwise.
    """

    regime: Regime
    condition_label: str
    time_value: float | None = None

    def __post_init__(self):
        timed = self.regime in (Regime.UNTIL, Regime.AFTER)
        if timed != (self.time_value is not None):
            raise ValueError(f"{self.regime.value} {'requires' if timed else 'forbids'} a time")
        if timed and not self.time_value > 0:
            raise ValueError(f"time_value must be positive, got {self.time_value!r}")
        if self.condition_label not in LABELS:
            raise ValueError(f"unknown condition label {self.condition_label!r}")

    def semiclassical_at(self, t, factor=1.0):
        """Whether the verdict guarantees R <= 1 at time ``t``.

        ``factor > 1`` reads the time condition as "much before" or "much
        after", e.g. ``t * factor <= t_c``.
        """
        if self.regime is Regime.ALWAYS:
            return True
        if self.regime is Regime.QUANTUM:
            return False
        if self.regime is Regime.UNTIL:
            return t * factor <= self.time_value
        return t >= factor * self.time_value


@dataclass(frozen=True)
class SemiclassicalInput:
    """Initial deviations and momentum of a packet in a given setup (SI or any
    consistent units)."""

    sigma_z: float
    sigma_pz: float
    p_z: float
    setup: PhysicalSetup = field(default_factory=PhysicalSetup.natural)

    def __post_init__(self):
        if not (self.sigma_z > 0 and self.sigma_pz > 0):
            raise ValueError("sigma_z and sigma_pz must be positive")
        bound = self.setup.hbar / 2
        product = self.sigma_z * self.sigma_pz
        if product < bound * (1 - EQUALITY_TOLERANCE):
            raise HeisenbergViolationError(
                f"sigma_z * sigma_pz = {product!r} < hbar/2 = {bound!r}", product=product
            )
        xi = self.setup.xi
        if xi != 0 and self.p_z != 0 and (xi > 0) != (self.p_z > 0):
            raise DomainError("initial momentum opposes the force; decelerating motion is not covered")

    @classmethod
    def coherent(cls, sigma_z, p_z, setup=None):
        """Minimal packet with sigma_z sigma_pz = hbar / 2."""
        setup = setup or PhysicalSetup.natural()
        return cls(sigma_z, setup.hbar / (2 * sigma_z), p_z, setup)

    @classmethod
    def from_ratios(cls, X, Y, W, setup=None, t_sigma=1.0):
        """Input realizing the given X, Y, W with spreading time ``t_sigma``."""
        setup = setup or PhysicalSetup.natural()
        if not 0 <= Y < 1:
            raise ValueError("Y must lie in [0, 1)")
        product = setup.hbar / (2 * math.sqrt(1 - Y * Y))
        sigma_z = math.sqrt(product * t_sigma / setup.mass)
        sigma_pz = product / sigma_z
        field_amplitude = 0.0
        if W:
            if setup.charge == 0:
                raise ValueError("a neutral particle cannot realize W > 0")
            field_amplitude = 2 * W * sigma_pz**2 / (abs(setup.charge) * setup.mass * sigma_z)
        sign = -1.0 if setup.charge < 0 else 1.0
        setup = replace(setup, field_amplitude=field_amplitude)
        return cls(sigma_z, sigma_pz, sign * X * sigma_pz, setup)

    @property
    def t_sigma(self):
        return self.setup.mass * self.sigma_z / self.sigma_pz

    @property
    def uncertainty_ratio(self):
        """hbar / (2 sigma_z sigma_pz), equal to 1 for a minimal packet."""
        return self.setup.hbar / (2 * self.sigma_z * self.sigma_pz)

    def is_minimal(self, tol=MINIMAL_TOLERANCE):
        return abs(self.uncertainty_ratio - 1.0) <= tol


@dataclass(frozen=True)
class RatioSet:
    X: float
    Y: float
    X_sigma: float
    W: float
    W_sigma: float
    t_sigma: float

    @property
    def delta(self):
        return 2 * abs(self.X - self.Y)

    @property
    def Delta(self):
        return abs(self.X**2 + 2 * self.W - 1)

    @property
    def Delta_sigma(self):
        return abs(self.X_sigma**2 + 2 * self.W_sigma - 1)


def ratios(inp):
    """Dimensionless ratios of an input; the field enters through |e| E."""
    setup = inp.setup
    hbar = setup.hbar
    x = inp.uncertainty_ratio
    Y = 0.0 if x >= 1 - EQUALITY_TOLERANCE else math.sqrt((1 - x) * (1 + x))
    scales = setup.scales
    e_ratio = setup.field_amplitude / scales.critical_field if setup.field_amplitude else 0.0
    mc = setup.mass * setup.light_speed
    W = 0.5 * (mc / inp.sigma_pz) ** 2 * (inp.sigma_z / scales.compton) * e_ratio
    W_sigma = 2 * (inp.sigma_z / scales.compton) ** 3 * e_ratio
    return RatioSet(
        X=abs(inp.p_z) / inp.sigma_pz,
        Y=Y,
        X_sigma=2 * abs(inp.p_z) * inp.sigma_z / hbar,
        W=W,
        W_sigma=W_sigma,
        t_sigma=inp.t_sigma,
    )


def spread(inp, t):
    """Growth sigma_z(t) - sigma_z(0) of the coordinate deviation."""
    r = ratios(inp)
    u = np.asarray(t, dtype=float) / r.t_sigma
    grow = 2 * u * r.Y + u * u
    value = inp.sigma_z * grow / (np.sqrt(1 + grow) + 1)
    return float(value) if value.ndim == 0 else value


def displacement(inp, t):
    """Classical distance travelled, |z(t) - z0|."""
    r = ratios(inp)
    u = np.asarray(t, dtype=float) / r.t_sigma
    value = inp.sigma_z * (u * r.X + u * u * r.W)
    return float(value) if value.ndim == 0 else value


def ratio_from_ratios(u, X, Y, W):
    """R as a function of u = t / t_sigma; u = 0 returns the limit from above."""
    if X == 0 and W == 0:
        raise NoMotionError("R is undefined for a packet at rest in zero field")
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # numerator and denominator divided by u; the root is factored for large u
        big = u > 1
        safe = np.where(big, u, 1.0)
        root = np.where(big, safe * np.sqrt(1 + (2 * Y + 1 / safe) / safe), np.sqrt(1 + u * (2 * Y + u)))
        value = (2 * Y + u) / (root + 1) / (X + u * W)
    if np.any(u == 0):
        if X > 0:
            limit = Y / X
        elif Y > 0:
            limit = math.inf
        else:
            limit = 1 / (2 * W)
        value = np.where(u == 0, limit, value)
    return float(value) if value.ndim == 0 else value


def ratio_R(inp, t):
    """Spread over displacement at time ``t`` (seconds); ``t = 0`` gives the limit."""
    r = ratios(inp)
    return ratio_from_ratios(np.asarray(t, dtype=float) / r.t_sigma, r.X, r.Y, r.W)


def criterion_polynomial(X, Y, W):
    """Coefficients of F(u), highest power first; R <= 1 iff F <= 0 for u > 0."""
    return np.array([-W * W, -2 * X * W, 1 - X * X - 2 * W, 2 * (Y - X)])


def _positive_roots(coeffs):
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if coeffs.size <= 1:
        return []
    roots = []
    for z in np.roots(coeffs):
        if abs(z.imag) <= 1e-7 * max(1.0, abs(z)) and z.real > 0:
            x = z.real
            deriv = np.polyder(coeffs)
            for _ in range(3):
                d = np.polyval(deriv, x)
                if d == 0:
                    break
                x -= np.polyval(coeffs, x) / d
            roots.append(x)
    return sorted(roots)


def semiclassical_intervals(r):
    """Exact time intervals (units of t_sigma) on which R <= 1.

    Returns a list of ``(start, end)`` pairs with ``end`` possibly ``inf``.
    """
    coeffs = criterion_polynomial(r.X, r.Y, r.W)
    cuts = [0.0, *_positive_roots(coeffs), math.inf]
    intervals = []
    for lo, hi in zip(cuts, cuts[1:]):
        probe = 0.5 * (lo + hi) if math.isfinite(hi) else max(2 * lo, 1.0)
        if np.polyval(coeffs, probe) <= 0:
            if intervals and intervals[-1][1] == lo:
                intervals[-1] = (intervals[-1][0], hi)
            else:
                intervals.append((lo, hi))
    return intervals


def _equal(X, Y):
    # Y = sqrt(1 - x^2) loses relative accuracy like 1/Y^2 as x -> 1
    scale = max(abs(X), abs(Y), 1e-300)
    small = max(min(abs(X), abs(Y), 1.0), 1e-3)
    rel = min(EQUALITY_TOLERANCE / small**2, 1e-6)
    return abs(X - Y) <= rel * scale


def reference_time_moderate(X, Y, W):
    """Sufficient time (units of t_sigma) when 1 - X^2 - 2W <= 0 and X < Y."""
    delta = 2 * abs(X - Y)
    Delta = abs(X * X + 2 * W - 1)
    candidates = [(delta / W**2) ** (1 / 3)]
    if Delta > 0:
        candidates.append(delta / Delta)
    if X * W > 0:
        candidates.append(math.sqrt(delta / (2 * X * W)))
    return min(candidates)


def reference_time_weak(X, Y, W):
    """Sufficient time (units of t_sigma) for a weak field, 0 < 2W < 1 - X^2."""
    delta = 2 * abs(X - Y)
    Delta = abs(X * X + 2 * W - 1)
    if X * W > 0:
        value = Delta / (4 * X * W) * (1 + math.sqrt(1 + 8 * X * W * delta / Delta**2))
        if math.isfinite(value):
            return value
    # without the quadratic term the cubic alone must outgrow Delta u + delta
    return _positive_roots([W * W, 0.0, -Delta, -delta])[-1]


def reference_time_coherent(X_sigma, W_sigma):
    """Sufficient time (units of t_sigma) for a minimal packet in a weak field."""
    Delta = abs(X_sigma**2 + 2 * W_sigma - 1)
    scale = math.sqrt(Delta) / W_sigma
    if X_sigma == 0:
        return scale
    return scale * min(1.0, math.sqrt(Delta) / (2 * X_sigma))


def critical_time_equal(X, W):
    """Crossing time (units of t_sigma) for X = Y in a weak field."""
    Delta = abs(X * X + 2 * W - 1)
    # (X/W)(sqrt(1 + Delta/X^2) - 1) without the cancellation at small X
    return Delta / (W * (math.sqrt(X * X + Delta) + X))


def _free_gcs(X, Y):
    if X == 0 and Y == 0:
        raise NoMotionError("R is undefined for a packet at rest in zero field")
    if X >= 1:
        return Regime.ALWAYS, "i", None
    if Y < X and not _equal(X, Y):
        return Regime.UNTIL, "ii", 2 * (X - Y) / abs(X * X - 1)
    return Regime.QUANTUM, "quantum", None


def _free_cs(X_sigma):
    if X_sigma == 0:
        raise NoMotionError("R is undefined for a packet at rest in zero field")
    if X_sigma >= 1:
        return Regime.ALWAYS, "i", None
    return Regime.UNTIL, "ii", 2 * X_sigma / abs(X_sigma**2 - 1)


def _field_gcs(X, Y, W):
    equal = _equal(X, Y)
    below = Y <= X or equal
    if X >= 1:
        return Regime.ALWAYS, "iii", None
    if 2 * W >= 1:
        if below:
            return Regime.ALWAYS, "iv", None
        # R(0+) = Y/X > 1: a strong field only helps after a while
        return Regime.AFTER, "iv", reference_time_moderate(X, Y, W)
    moderate = 1 - X * X <= 2 * W
    if moderate and below:
        return Regime.ALWAYS, "v", None
    if equal:
        return Regime.AFTER, "vi", critical_time_equal(X, W)
    if moderate:
        return Regime.AFTER, "vii", reference_time_moderate(X, Y, W)
    return Regime.AFTER, "viii", reference_time_weak(X, Y, W)


def _field_cs(X_sigma, W_sigma):
    if X_sigma >= 1:
        return Regime.ALWAYS, "iii", None
    if 2 * W_sigma >= 1:
        return Regime.ALWAYS, "iv", None
    if 1 - X_sigma**2 <= 2 * W_sigma:
        return Regime.ALWAYS, "v", None
    return Regime.AFTER, "ix", reference_time_coherent(X_sigma, W_sigma)


def _verdict(outcome, t_sigma):
    regime, label, u = outcome
    return RegimeVerdict(regime, label, None if u is None else u * t_sigma)


def _require_free(r):
    if r.W != 0:
        raise DomainError("free-particle classification needs a vanishing field")


def _require_field(r):
    if not r.W > 0:
        raise DomainError("field classification needs a positive field")


def _require_minimal(inp):
    if not inp.is_minimal():
        raise DomainError(
            f"coherent-state classification needs sigma_z sigma_pz = hbar/2, "
            f"got ratio {1 / inp.uncertainty_ratio:.12g}"
        )


def classify_free_gcs(inp):
    r = ratios(inp)
    _require_free(r)
    return _verdict(_free_gcs(r.X, r.Y), r.t_sigma)


def classify_free_cs(inp):
    _require_minimal(inp)
    r = ratios(inp)
    _require_free(r)
    return _verdict(_free_cs(r.X_sigma), r.t_sigma)


def classify_field_gcs(inp):
    r = ratios(inp)
    _require_field(r)
    if r.X == 0 and r.W == 0:
        raise NoMotionError("R is undefined for a packet at rest in zero field")
    return _verdict(_field_gcs(r.X, r.Y, r.W), r.t_sigma)


def classify_field_cs(inp):
    _require_minimal(inp)
    r = ratios(inp)
    _require_field(r)
    return _verdict(_field_cs(r.X_sigma, r.W_sigma), r.t_sigma)


def classify(inp, kind="gcs"):
    """Dispatch on state kind ("gcs" or "cs") and on whether a field acts."""
    if kind not in ("gcs", "cs"):
        raise ValueError(f"kind must be 'gcs' or 'cs', got {kind!r}")
    free = ratios(inp).W == 0
    if kind == "gcs":
        return classify_free_gcs(inp) if free else classify_field_gcs(inp)
    return classify_free_cs(inp) if free else classify_field_cs(inp)


def brute_force_crossing(R, bracket, threshold=1.0, rtol=1e-10, max_iter=400):
    """Bisection for R(t) = threshold inside ``bracket``."""
    lo, hi = map(float, bracket)
    f_lo = R(lo) - threshold
    f_hi = R(hi) - threshold
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        raise ValueError("R is not finite at the bracket ends")
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(f"no sign change of R - {threshold} on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * abs(mid):
            return mid
        f_mid = R(mid) - threshold
        if not math.isfinite(f_mid):
            raise ValueError(f"R is not finite at t = {mid}")
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ConditionCheck:
    physical: bool
    dimensionless: bool

    @property
    def consistent(self):
        return self.physical == self.dimensionless


@dataclass(frozen=True)
class PhysicalReport:
    """Inequalities in physical units next to their dimensionless forms.

    ``soft`` holds the "much less/greater than" readings with margin ``factor``.
    """

    conditions: dict
    soft: dict
    factor: float

    @property
    def consistent(self):
        return all(c.consistent for c in self.conditions.values())

    def flags(self):
        out = {name: c.physical for name, c in self.conditions.items()}
        out.update({f"{name}_soft": v for name, v in self.soft.items()})
        return out


def physical_conditions_report(inp, factor=10.0):
    setup = inp.setup
    hbar = setup.hbar
    scales = setup.scales
    r = ratios(inp)
    sz, spz = inp.sigma_z, inp.sigma_pz
    lam = scales.de_broglie(inp.p_z) if inp.p_z else math.inf
    k = 2 * math.pi * hbar / lam  # de Broglie momentum
    # k * sqrt(1 + (lam / (4 pi sz))^2), finite at lam = inf
    k_edge = math.sqrt(k * k + (hbar / (2 * sz)) ** 2)
    e_ratio = setup.field_amplitude / scales.critical_field if setup.field_amplitude else 0.0
    gcs_scale = (spz / (setup.mass * setup.light_speed)) ** 2 * scales.compton / sz
    cs_scale = 0.25 * (scales.compton / sz) ** 3
    shortfall = 1 - (k / spz) ** 2
    cs_shortfall = 1 - (4 * math.pi * sz / lam) ** 2

    conditions = {
        "narrow_momentum": ConditionCheck(spz <= k, r.X >= 1),
        "gcs_critical_interval": ConditionCheck(k < spz <= k_edge, r.Y <= r.X < 1),
        "gcs_quantum": ConditionCheck(spz > k_edge, r.X < r.Y),
        "cs_wide_packet": ConditionCheck(lam <= 4 * math.pi * sz, r.X_sigma >= 1),
        "gcs_strong_field": ConditionCheck(e_ratio >= gcs_scale, 2 * r.W >= 1),
        "gcs_moderate_field": ConditionCheck(
            gcs_scale * shortfall <= e_ratio < gcs_scale, 1 - r.X**2 <= 2 * r.W < 1
        ),
        "gcs_weak_field": ConditionCheck(
            0 < e_ratio < gcs_scale * shortfall, 0 < 2 * r.W < 1 - r.X**2
        ),
        "cs_strong_field": ConditionCheck(e_ratio >= cs_scale, 2 * r.W_sigma >= 1),
        "cs_weak_field": ConditionCheck(
            0 < e_ratio < cs_scale * cs_shortfall and sz < lam / (4 * math.pi),
            0 < 2 * r.W_sigma < 1 - r.X_sigma**2 and r.X_sigma < 1,
        ),
    }
    soft = {
        "narrow_momentum": factor * spz <= k,
        "cs_wide_packet": factor * lam <= 4 * math.pi * sz,
        "gcs_strong_field": e_ratio >= factor * gcs_scale,
        "cs_strong_field": e_ratio >= factor * cs_scale,
    }
    return PhysicalReport(conditions, soft, factor)
