"""Verification suites run by ``gcslab verify``.

Each suite returns a :class:`SuiteResult` with the worst measured error and
the tolerance it was held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SeedCoefficients
from .oracle import DEFAULT_GRID, l2_distance, oracle_grid, propagate, sample_gcs, schrodinger_residual
from .semiclassical import (
    SemiclassicalInput,
    brute_force_crossing,
    classify_field_gcs,
    classify_free_cs,
    classify_free_gcs,
    ratio_R,
)
from .states import GcsState, check_uncertainty, evaluate_gcs


@dataclass
class SuiteResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def random_seed(rng, sigma_range=(0.5, 1.5)):
    """Seed with random deviations (Heisenberg-valid), branch and phase."""
    sq = rng.uniform(*sigma_range)
    sp = rng.uniform(max(sigma_range[0], 0.5 / sq), sigma_range[1])
    branch = 1 if rng.random() < 0.5 else -1
    return SeedCoefficients.from_deviations(sq, sp, branch=branch, phase=rng.uniform(-math.pi, math.pi))


def random_state(rng, Xi_max=2.0, zeta_max=2.0, alphas=(0.0, math.pi / 4, math.pi / 2)):
    seed = random_seed(rng)
    zeta = zeta_max * math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())
    return GcsState(seed, rng.uniform(0.0, Xi_max), alphas[rng.integers(len(alphas))], complex(zeta))


def rs_identity(samples=100, rng_seed=0, tau_max=10.0):
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    worst_heisenberg = math.inf
    for _ in range(samples):
        state = random_state(rng)
        report = check_uncertainty(state, rng.uniform(0.0, tau_max))
        worst = max(worst, abs(report.rs_residual))
        worst_heisenberg = min(worst_heisenberg, report.heisenberg_product)
    passed = worst < 1e-12 and worst_heisenberg >= 0.5 - 1e-12
    return SuiteResult(
        "rs-identity", passed, worst, 1e-12, {"samples": samples, "min_heisenberg_product": worst_heisenberg}
    )


def norm(samples=10, rng_seed=0, taus=(0.0, 0.7, 2.3)):
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(samples):
        state = random_state(rng)
        for tau in taus:
            grid = oracle_grid(state, tau, width=12.0)
            values = evaluate_gcs(state, grid.points, tau)
            worst = max(worst, abs(np.sum(np.abs(values) ** 2) * grid.dq - 1.0))
    return SuiteResult("norm", worst < 1e-8, worst, 1e-8, {"samples": samples, "taus": list(taus)})


def _propagation_error(state, tau_final, dt=1e-4):
    grid = oracle_grid(state, tau_final, DEFAULT_GRID)
    start = sample_gcs(state, grid, 0.0)
    end = propagate(start, state.Xi, state.alpha, tau_final, dt)
    exact = sample_gcs(state, grid, tau_final)
    return l2_distance(end, exact), l2_distance(end, exact, phase_aligned=True)


def propagate_suite(cases=("free", "field")):
    details = {}
    passed = True
    for case in cases:
        if case == "free":
            state, tau, tol = GcsState(SeedCoefficients(1.0, 1.0)), 1.0, 1e-7
        elif case == "field":
            state, tau, tol = GcsState(SeedCoefficients(1.0, 1.0), 1.0, math.pi / 2, 1.0), 0.5, 1e-6
        else:
            raise ValueError(f"unknown propagate case {case!r}")
        raw, aligned = _propagation_error(state, tau)
        details[case] = {"raw_distance": raw, "aligned_distance": aligned, "tolerance": tol}
        passed &= raw < tol
    measured = max(d["raw_distance"] for d in details.values())
    return SuiteResult("propagate", passed, measured, min(d["tolerance"] for d in details.values()), details)


def residual_suite(h=1e-4, tau=0.5):
    free = GcsState(SeedCoefficients(1.0, 1.0))
    field_state = GcsState(SeedCoefficients(1.0, 1.0), 1.0, math.pi / 2, 1.0)
    free_residual = schrodinger_residual(free, DEFAULT_GRID, tau, h)
    field_residual = schrodinger_residual(field_state, DEFAULT_GRID, tau, h)
    mutated = schrodinger_residual(
        field_state, DEFAULT_GRID, tau, h, amplitude=lambda s, q, t: evaluate_gcs(s, q, t, phase_term=False)
    )
    measured = max(free_residual, field_residual)
    passed = measured < 1e-6 and mutated > 1e-2
    return SuiteResult(
        "residual",
        passed,
        measured,
        1e-6,
        {"free": free_residual, "field": field_residual, "without_phase_integral": mutated},
    )


def critical_times():
    cases = {
        "free-gcs": (SemiclassicalInput.from_ratios(0.9, 0.5, 0.0), classify_free_gcs),
        "free-cs": (SemiclassicalInput.from_ratios(0.5, 0.0, 0.0), classify_free_cs),
        "field-equal": (SemiclassicalInput.from_ratios(0.6, 0.6, 0.2), classify_field_gcs),
    }
    details = {}
    worst = 0.0
    for name, (inp, classifier) in cases.items():
        closed = classifier(inp).time_value
        ts = inp.t_sigma
        root = brute_force_crossing(lambda t: ratio_R(inp, t), (1e-6 * ts, 1e6 * ts))
        err = abs(closed - root) / closed
        worst = max(worst, err)
        details[name] = {"closed_form": closed / ts, "bisection": root / ts, "relative_error": err}
    return SuiteResult("critical-times", worst < 1e-8, worst, 1e-8, details)


def run_suite(name, options=None):
    options = options or {}
    if name == "rs-identity":
        return rs_identity(options.get("samples", 100), options.get("seed", 0))
    if name == "norm":
        return norm(options.get("samples", 10), options.get("seed", 0))
    if name == "propagate":
        return propagate_suite(tuple(options.get("cases", ("free", "field"))))
    if name == "residual":
        return residual_suite()
    if name == "critical-times":
        return critical_times()
    raise KeyError(name)
