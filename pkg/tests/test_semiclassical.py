import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import constants

from gcslab.core import PhysicalSetup
from gcslab.errors import DomainError, HeisenbergViolationError, NoMotionError
from gcslab.semiclassical import (
    LABELS,
    Regime,
    RegimeVerdict,
    SemiclassicalInput,
    brute_force_crossing,
    classify,
    classify_field_cs,
    classify_field_gcs,
    classify_free_cs,
    classify_free_gcs,
    displacement,
    physical_conditions_report,
    ratio_from_ratios,
    ratio_R,
    ratios,
    semiclassical_intervals,
    spread,
)

SLACK = 1 + 1e-9
LOG_GRID = np.geomspace(1e-6, 1e4, 2000)


def gcs(X, Y, W=0.0):
    return SemiclassicalInput.from_ratios(X, Y, W)


def cs(X_sigma, W_sigma=0.0, sigma_z=1.0):
    """Minimal packet in natural units with unit charge, where X = X_sigma and W = W_sigma."""
    setup = PhysicalSetup.natural(field_amplitude=W_sigma / (2 * sigma_z**3))
    return SemiclassicalInput.coherent(sigma_z, X_sigma / (2 * sigma_z), setup)


def max_ratio(X, Y, W, u):
    return float(np.max(ratio_from_ratios(u, X, Y, W)))


ratio_value = st.floats(0.0, 3.0)
unit_interval = st.floats(0.0, 0.999)
field_value = st.floats(1e-4, 2.0)


class TestInput:
    def test_ratios_round_trip(self):
        r = ratios(gcs(0.4, 0.7, 0.3))
        assert (r.X, r.Y, r.W) == pytest.approx((0.4, 0.7, 0.3))
        assert r.t_sigma == pytest.approx(1.0)

    def test_coherent_ratios_coincide(self):
        r = ratios(cs(0.5, 0.1, sigma_z=1.7))
        assert r.X == pytest.approx(r.X_sigma) and r.W == pytest.approx(r.W_sigma)
        assert r.Y == 0.0

    def test_heisenberg(self):
        with pytest.raises(HeisenbergViolationError) as info:
            SemiclassicalInput(1.0, 0.3, 0.0)
        assert info.value.product == pytest.approx(0.3)

    def test_opposing_momentum_rejected(self):
        setup = PhysicalSetup.natural(field_amplitude=1.0, charge=-1.0)
        with pytest.raises(DomainError):
            SemiclassicalInput(1.0, 1.0, 0.5, setup)
        SemiclassicalInput(1.0, 1.0, -0.5, setup)

    def test_electron_uses_charge_magnitude(self):
        setup = PhysicalSetup(constants.m_e, -constants.e, constants.c, constants.hbar, 1e8)
        sz = 1e-9
        inp = SemiclassicalInput.coherent(sz, -1e-25, setup)
        compton = constants.hbar / (constants.m_e * constants.c)
        e_crit = constants.m_e**2 * constants.c**3 / (constants.e * constants.hbar)
        assert ratios(inp).W_sigma == pytest.approx(2 * (sz / compton) ** 3 * 1e8 / e_crit)


class TestSpreadAndDisplacement:
    def test_spread_initial(self):
        assert spread(gcs(0.3, 0.2), 0.0) == 0.0

    def test_spread_minimal(self):
        inp = cs(0.5)
        assert spread(inp, inp.t_sigma) == pytest.approx(inp.sigma_z * (math.sqrt(2) - 1))

    def test_displacement(self):
        inp = gcs(1.0, 0.0, 0.5)
        assert displacement(inp, inp.t_sigma) == pytest.approx(1.5 * inp.sigma_z)

    @given(st.floats(0.0, 10.0))
    def test_free_displacement(self, t):
        inp = SemiclassicalInput(1.0, 2.0, 0.7)
        assert displacement(inp, t) == pytest.approx(0.7 * t, abs=1e-15)


class TestRatio:
    def test_minimal_free(self):
        inp = cs(1.0)
        assert ratio_R(inp, inp.t_sigma) == pytest.approx(math.sqrt(2) - 1)

    def test_at_free_critical_time(self):
        inp = gcs(0.9, 0.5)
        assert ratio_R(inp, 0.8 / 0.19 * inp.t_sigma) == pytest.approx(1.0, abs=1e-9)

    def test_short_time_limit(self):
        assert ratio_from_ratios(0.0, 0.8, 0.0, 0.0) == 0.0
        assert ratio_from_ratios(0.0, 0.8, 0.4, 0.0) == pytest.approx(0.5)
        assert ratio_from_ratios(0.0, 0.0, 0.0, 0.25) == pytest.approx(2.0)
        assert ratio_from_ratios(0.0, 0.0, 0.5, 0.25) == math.inf
        assert ratio_from_ratios(1e-12, 0.8, 0.4, 0.1) == pytest.approx(0.5, rel=1e-9)

    def test_no_motion(self):
        with pytest.raises(NoMotionError):
            ratio_R(SemiclassicalInput(1.0, 1.0, 0.0), 1.0)


class TestFreeClassifiers:
    def test_fast(self):
        assert classify_free_gcs(gcs(1.2, 0.3)) == RegimeVerdict(Regime.ALWAYS, "i")

    def test_critical_time(self):
        inp = gcs(0.9, 0.5)
        verdict = classify_free_gcs(inp)
        assert verdict.regime is Regime.UNTIL and verdict.condition_label == "ii"
        assert verdict.time_value == pytest.approx(0.8 / 0.19 * inp.t_sigma, rel=1e-12)
        assert verdict.time_value / inp.t_sigma == pytest.approx(4.21053, abs=5e-6)

    def test_quantum(self):
        assert classify_free_gcs(gcs(0.5, 0.9)).regime is Regime.QUANTUM

    def test_equal_ratios_are_quantum(self):
        assert classify_free_gcs(gcs(0.6, 0.6)).regime is Regime.QUANTUM

    def test_coherent(self):
        assert classify_free_cs(cs(2.0)).regime is Regime.ALWAYS
        inp = cs(0.5)
        assert classify_free_cs(inp).time_value == pytest.approx(4 / 3 * inp.t_sigma, rel=1e-12)

    def test_coherent_needs_minimal_packet(self):
        with pytest.raises(DomainError):
            classify_free_cs(gcs(0.5, 0.3))

    def test_field_rejected(self):
        with pytest.raises(DomainError):
            classify_free_gcs(gcs(0.5, 0.3, 0.1))
        with pytest.raises(DomainError):
            classify_field_gcs(gcs(0.5, 0.3))

    def test_at_rest(self):
        with pytest.raises(NoMotionError):
            classify_free_gcs(gcs(0.0, 0.0))


class TestFieldClassifiers:
    @pytest.mark.parametrize("X, Y", [(0.2, 0.1), (0.5, 0.5), (0.0, 0.0), (0.9, 0.3)])
    def test_strong(self, X, Y):
        assert classify_field_gcs(gcs(X, Y, 0.6)) == RegimeVerdict(Regime.ALWAYS, "iv")

    def test_strong_with_quantum_start(self):
        # R starts at Y/X = 9, so "always" would be wrong here
        inp = gcs(0.1, 0.9, 0.6)
        verdict = classify_field_gcs(inp)
        assert verdict.regime is Regime.AFTER and verdict.condition_label == "iv"
        assert ratio_from_ratios(1e-6, 0.1, 0.9, 0.6) > 1
        u = np.geomspace(verdict.time_value / inp.t_sigma, 1e4, 10**4)
        assert max_ratio(0.1, 0.9, 0.6, u) <= SLACK

    def test_equal_ratios(self):
        inp = gcs(0.6, 0.6, 0.2)
        verdict = classify_field_gcs(inp)
        assert (verdict.regime, verdict.condition_label) == (Regime.AFTER, "vi")
        assert verdict.time_value == pytest.approx(3 * (math.sqrt(5 / 3) - 1), rel=1e-12)
        root = brute_force_crossing(lambda t: ratio_R(inp, t), (1e-6, 1e6))
        assert root == pytest.approx(verdict.time_value, rel=1e-8)

    def test_weak(self):
        inp = gcs(0.3, 0.5, 0.2)
        verdict = classify_field_gcs(inp)
        assert verdict.condition_label == "viii"
        assert verdict.time_value == pytest.approx(4.92660, abs=5e-6)
        u = np.linspace(verdict.time_value, 100, 10**4)
        assert max_ratio(0.3, 0.5, 0.2, u) <= SLACK

    def test_moderate(self):
        verdict = classify_field_gcs(gcs(0.5, 0.8, 0.4))
        assert verdict.condition_label == "vii" and verdict.regime is Regime.AFTER

    def test_moderate_below(self):
        assert classify_field_gcs(gcs(0.8, 0.3, 0.2)) == RegimeVerdict(Regime.ALWAYS, "v")
        assert classify_field_gcs(gcs(0.8, 0.8, 0.2)) == RegimeVerdict(Regime.ALWAYS, "v")

    def test_coherent_strong(self):
        assert classify_field_cs(cs(0.3, 0.7)) == RegimeVerdict(Regime.ALWAYS, "iv")

    def test_coherent_moderate(self):
        assert classify_field_cs(cs(0.8, 0.25)) == RegimeVerdict(Regime.ALWAYS, "v")

    def test_coherent_weak(self):
        inp = cs(0.5, 0.1)
        verdict = classify_field_cs(inp)
        assert verdict.condition_label == "ix"
        assert verdict.time_value == pytest.approx(5.5 * inp.t_sigma, rel=1e-12)
        u = np.geomspace(5.5, 1e4, 10**4)
        assert max_ratio(0.5, 0.0, 0.1, u) <= SLACK

    def test_dispatch(self):
        assert classify(cs(0.5), "cs").condition_label == "ii"
        assert classify(gcs(0.6, 0.6, 0.2)).condition_label == "vi"
        with pytest.raises(ValueError):
            classify(gcs(0.5, 0.1), "other")


class TestVerdict:
    def test_time_presence(self):
        with pytest.raises(ValueError):
            RegimeVerdict(Regime.ALWAYS, "i", 1.0)
        with pytest.raises(ValueError):
            RegimeVerdict(Regime.UNTIL, "ii")
        with pytest.raises(ValueError):
            RegimeVerdict(Regime.AFTER, "vii", -1.0)

    def test_labels(self):
        with pytest.raises(ValueError):
            RegimeVerdict(Regime.ALWAYS, "x")
        assert "quantum" in LABELS

    def test_semiclassical_at(self):
        until = RegimeVerdict(Regime.UNTIL, "ii", 2.0)
        after = RegimeVerdict(Regime.AFTER, "vii", 2.0)
        assert until.semiclassical_at(1.0) and not until.semiclassical_at(3.0)
        assert after.semiclassical_at(3.0) and not after.semiclassical_at(1.0)


class TestBisection:
    def test_linear(self):
        assert brute_force_crossing(lambda t: t, (0.0, 5.0)) == pytest.approx(1.0, rel=1e-10)

    def test_requires_sign_change(self):
        with pytest.raises(ValueError):
            brute_force_crossing(lambda t: t, (2.0, 5.0))

    @pytest.mark.parametrize(
        "inp, expected",
        [(gcs(0.9, 0.5), 0.8 / 0.19), (cs(0.5), 4 / 3), (gcs(0.6, 0.6, 0.2), 3 * (math.sqrt(5 / 3) - 1))],
    )
    def test_closed_forms(self, inp, expected):
        ts = inp.t_sigma
        root = brute_force_crossing(lambda t: ratio_R(inp, t), (1e-6 * ts, 1e6 * ts))
        assert root / ts == pytest.approx(expected, rel=1e-8)


def _labels_consistent(label, X, Y, W):
    weak = 2 * W < 1 - X * X
    # Y carries relative roundoff ~ eps / Y^2 from the physical round trip
    close = abs(X - Y) <= min(1e-12 / max(min(X, Y, 1.0), 1e-3) ** 2, 1e-6) * max(X, Y)
    return {
        "iii": X >= 1,
        "iv": X < 1 and 2 * W >= 1,
        "v": X < 1 and 2 * W < 1 and not weak and (Y <= X or close),
        "vi": close and weak,
        "vii": Y > X and not close and not weak and 2 * W < 1,
        "viii": weak and not close,
    }[label]


class TestInvariants:
    @given(st.floats(1e-3, 3.0), unit_interval, field_value)
    @settings(max_examples=300)
    def test_partition(self, X, Y, W):
        inp = gcs(X, Y, W)
        r = ratios(inp)
        label = classify_field_gcs(inp).condition_label
        assert _labels_consistent(label, r.X, r.Y, r.W)

    @given(ratio_value, unit_interval, field_value)
    @settings(max_examples=200)
    def test_always_is_sound(self, X, Y, W):
        inp = gcs(X, Y, W)
        verdict = classify_field_gcs(inp)
        assume(verdict.regime is Regime.ALWAYS)
        r = ratios(inp)
        assert max_ratio(r.X, r.Y, r.W, LOG_GRID) <= SLACK

    @given(
        st.floats(0.0, 0.99).flatmap(lambda x: st.tuples(st.just(x), st.floats(x, 0.999))),
        field_value,
    )
    @settings(max_examples=200)
    def test_reference_times_suffice(self, XY, W):
        # R starts at Y/X >= 1, so nearly every draw has an AFTER verdict
        inp = gcs(*XY, W)
        verdict = classify_field_gcs(inp)
        assume(verdict.regime is Regime.AFTER)
        start = verdict.time_value / inp.t_sigma
        assume(start < 1e4)
        r = ratios(inp)
        assert max_ratio(r.X, r.Y, r.W, np.geomspace(start, 1e4, 2000)) <= SLACK

    @given(st.floats(1e-3, 0.999), st.floats(1e-4, 0.499))
    @settings(max_examples=200)
    def test_coherent_reference_time_suffices(self, X_sigma, W_sigma):
        inp = cs(X_sigma, W_sigma)
        verdict = classify_field_cs(inp)
        u = LOG_GRID if verdict.time_value is None else np.geomspace(verdict.time_value / inp.t_sigma, 1e4, 2000)
        assert max_ratio(X_sigma, 0.0, W_sigma, u) <= SLACK

    @given(st.floats(0.01, 0.99), unit_interval)
    def test_free_critical_time_direction(self, X, Y):
        assume(Y < X - 1e-6)
        r = ratios(gcs(X, Y))
        X, Y = r.X, r.Y
        tc = classify_free_gcs(gcs(X, Y)).time_value
        assert ratio_from_ratios(tc, X, Y, 0.0) == pytest.approx(1.0, abs=1e-8)
        before = np.linspace(1e-9, tc, 500)[:-1]
        assert max_ratio(X, Y, 0.0, before) <= SLACK
        assert ratio_from_ratios(tc * (1 + 1e-4), X, Y, 0.0) > 1

    @given(st.floats(0.01, 0.99), field_value)
    def test_equal_critical_time_direction(self, X, W):
        assume(2 * W < 1 - X * X)
        r = ratios(gcs(X, X, W))
        X, W = r.X, r.W
        tc = classify_field_gcs(gcs(X, X, W)).time_value
        assert ratio_from_ratios(tc, X, X, W) == pytest.approx(1.0, abs=1e-8)
        assert max_ratio(X, X, W, np.geomspace(tc, 1e4, 1000)) <= SLACK
        assert ratio_from_ratios(tc * (1 - 1e-4), X, X, W) > 1

    @given(ratio_value, unit_interval, field_value)
    @settings(max_examples=100)
    def test_intervals_match_grid(self, X, Y, W):
        r = ratios(gcs(X, Y, W))
        intervals = semiclassical_intervals(r)
        u = np.geomspace(1e-3, 1e3, 997)
        inside = np.zeros(u.shape, dtype=bool)
        for lo, hi in intervals:
            inside |= (u >= lo) & (u <= hi)
        values = ratio_from_ratios(u, X, Y, W)
        margin = np.abs(values - 1) > 1e-6
        assert np.array_equal(inside[margin], (values <= 1)[margin])

    @given(st.floats(1e-3, 3.0), unit_interval)
    def test_free_field_consistency(self, X, Y):
        assume(abs(X - Y) > 1e-6)
        free = classify_free_gcs(gcs(X, Y))
        tiny = ratios(gcs(X, Y, 1e-18))
        assert tiny.W < 1e-15
        first = semiclassical_intervals(tiny)[0]
        if free.regime is Regime.ALWAYS:
            assert classify_field_gcs(gcs(X, Y, 1e-18)).regime is Regime.ALWAYS
        elif free.regime is Regime.UNTIL:
            # near X = 1 the free critical time diverges and any field shifts it
            assume(free.time_value < 1e5)
            assert first[0] == 0.0
            assert first[1] == pytest.approx(free.time_value, rel=1e-6)
        else:
            assert first[0] > 1e4

    @given(st.floats(1e-3, 0.999))
    def test_free_field_consistency_coherent(self, X_sigma):
        inp = cs(X_sigma)
        free = classify_free_cs(inp)
        assume(free.time_value < 1e5 * inp.t_sigma)
        first = semiclassical_intervals(ratios(cs(X_sigma, 1e-18)))[0]
        assert first == (0.0, pytest.approx(free.time_value / inp.t_sigma, rel=1e-6))
        assert classify_field_cs(cs(X_sigma, 1e-18)).time_value > 1e4 * inp.t_sigma


def random_inputs(rng, n, setup):
    """Inputs spread across every threshold of the physical report."""
    scales = setup.scales
    out = []
    for _ in range(n):
        sigma_z = scales.compton * 10 ** rng.uniform(-2, 2)
        x = rng.uniform(0.05, 1.0) if rng.random() < 0.8 else 1.0
        sigma_pz = setup.hbar / (2 * sigma_z * x)
        X = 10 ** rng.uniform(-2, 2) if rng.random() < 0.9 else 0.0
        W = 10 ** rng.uniform(-3, 2) if rng.random() < 0.9 else 0.0
        E = 2 * W * sigma_pz**2 / (abs(setup.charge) * setup.mass * sigma_z)
        sign = -1.0 if setup.charge < 0 else 1.0
        field_setup = PhysicalSetup(
            setup.mass, setup.charge, setup.light_speed, setup.hbar, E, setup.alpha, setup.length_scale
        )
        out.append(SemiclassicalInput(sigma_z, sigma_pz, sign * X * sigma_pz, field_setup))
    return out


class TestPhysicalReport:
    def test_narrow_momentum(self):
        k = 2.0
        inp = SemiclassicalInput(3.0, 0.1 * k, k)
        report = physical_conditions_report(inp)
        assert report.conditions["narrow_momentum"].physical
        assert report.conditions["narrow_momentum"].dimensionless
        assert report.soft["narrow_momentum"]

    @pytest.mark.parametrize(
        "setup",
        [
            PhysicalSetup.natural(),
            PhysicalSetup(constants.m_e, -constants.e, constants.c, constants.hbar, length_scale=1e-9),
        ],
        ids=["natural", "si-electron"],
    )
    def test_equivalence(self, setup):
        rng = np.random.default_rng(11)
        for inp in random_inputs(rng, 300, setup):
            report = physical_conditions_report(inp)
            assert report.consistent, {k: v for k, v in report.conditions.items() if not v.consistent}

    def test_flags(self):
        flags = physical_conditions_report(cs(0.5, 0.1)).flags()
        assert flags["cs_weak_field"] and not flags["cs_strong_field"]
        assert "cs_strong_field_soft" in flags
