import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from asynciter.activation import ScheduleKind, SchedulePolicy, ScheduleState
from asynciter.dynamics import ConvergenceCriterion, run_trajectory
from asynciter.errors import DomainError, InsufficientData, NonPositiveError
from asynciter.linalg import spectral_radius
from asynciter.matrix_gen import SystemSpec, generate_system
from asynciter.rate import RateMode, coverage_probability_bound, fit_empirical_rate, theoretical_rate

from oracles import dominant_gap, monte_carlo_coverage


def test_bound_certain_updates():
    for T in (1, 3, 10):
        for n in (1, 5):
            assert coverage_probability_bound(1.0, T, n) == 1.0


def test_bound_hand_value():
    assert coverage_probability_bound(0.5, 2, 2) == 0.5625


def test_bound_matches_monte_carlo():
    assert abs(monte_carlo_coverage(0.5, 2, 2, 10**6, seed=1) - 0.5625) <= 0.002


@pytest.mark.parametrize("gamma, T, n", [(0.3, 4, 3), (0.1, 10, 5), (0.7, 1, 2)])
def test_bound_tight_when_probabilities_equal(gamma, T, n):
    assert monte_carlo_coverage(gamma, T, n, 200_000, seed=2) == pytest.approx(
        coverage_probability_bound(gamma, T, n), abs=0.005
    )


def test_bound_small_gamma_is_accurate():
    # (1 - (1 - g)^T)^n ~ (g T)^n for tiny g
    assert coverage_probability_bound(1e-12, 3, 2) == pytest.approx(9e-24, rel=1e-9)


@pytest.mark.parametrize("gamma", [0.0, -0.1, 1.5, math.nan])
def test_bound_domain(gamma):
    with pytest.raises(DomainError):
        coverage_probability_bound(gamma, 2, 2)


def test_bound_monotone_grid():
    gammas = np.linspace(0.05, 1.0, 20)
    for T in (1, 2, 5, 20):
        for n in (1, 3, 10):
            vals = [coverage_probability_bound(g, T, n) for g in gammas]
            assert all(a <= b for a, b in zip(vals, vals[1:]))
    for g in (0.1, 0.5):
        for n in (1, 4):
            vals = [coverage_probability_bound(g, T, n) for T in range(1, 40)]
            assert all(a <= b for a, b in zip(vals, vals[1:]))
        for T in (1, 4):
            vals = [coverage_probability_bound(g, T, n) for n in range(1, 40)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_bound_long_window():
    assert coverage_probability_bound(0.05, 200, 10) > 0.999


@given(st.floats(1e-6, 1.0), st.integers(1, 100), st.integers(1, 100))
def test_bound_in_unit_interval(gamma, T, n):
    assert 0.0 <= coverage_probability_bound(gamma, T, n) <= 1.0


def test_theoretical_rate_running_example():
    rep = theoretical_rate(0.3535534, 0.5, 2, 2, RateMode.PROBABILISTIC)
    assert rep.theoretical_rate == pytest.approx(0.0994368, abs=1e-6)
    assert rep.lambda_lower_bound == 0.5625
    assert rep.rate == rep.theoretical_rate


def test_theoretical_rate_deterministic():
    rep = theoretical_rate(0.9, 1.0, 3, 1, RateMode.DETERMINISTIC)
    assert rep.deterministic_rate == pytest.approx(0.3, abs=1e-15)
    assert rep.rate == rep.deterministic_rate


def test_theoretical_rate_zero_rho():
    rep = theoretical_rate(0.0, 0.4, 5, 3)
    assert rep.theoretical_rate == 0.0 and rep.deterministic_rate == 0.0


@given(st.floats(0, 2), st.floats(1e-3, 1.0), st.integers(1, 50), st.integers(1, 50))
def test_report_invariants(rho, gamma, T, n):
    rep = theoretical_rate(rho, gamma, T, n)
    lam = (1 - (1 - gamma) ** T) ** n
    assert abs(rep.lambda_lower_bound - lam) <= 1e-12
    assert abs(rep.theoretical_rate - rho * rep.lambda_lower_bound / T) <= 1e-12
    assert abs(rep.deterministic_rate - rho / T) <= 1e-12


def test_theoretical_rate_negative_rho():
    with pytest.raises(DomainError):
        theoretical_rate(-0.1, 0.5, 2, 2)


# -- fit_empirical_rate -------------------------------------------------------

def test_fit_powers_of_two():
    c, r2 = fit_empirical_rate([2.0**-k for k in range(13)], burn_in=0)
    assert c == pytest.approx(0.5, abs=1e-12) and r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_point_nine():
    c, r2 = fit_empirical_rate([0.9**k for k in range(51)], burn_in=0)
    assert abs(c - 0.9) <= 1e-9 and r2 > 1 - 1e-12


@given(st.floats(0.05, 0.99), st.floats(1e-3, 1e3), st.integers(10, 200))
def test_fit_recovers_geometric_factor(factor, scale, length):
    errs = scale * factor ** np.arange(length)
    errs = errs[errs >= 1e-14]
    if errs.size < 12:
        return
    c, r2 = fit_empirical_rate(errs)
    assert abs(c - factor) <= 1e-9 and r2 > 1 - 1e-12


def test_fit_truncates_tail():
    errs = [0.5**k for k in range(20)] + [1e-16, 0.0]
    c, _ = fit_empirical_rate(errs, burn_in=0)
    assert c == pytest.approx(0.5, abs=1e-12)


def test_fit_nonpositive_before_tail():
    errs = [0.5**k for k in range(20)]
    errs[5] = 0.0
    with pytest.raises(NonPositiveError):
        fit_empirical_rate(errs, burn_in=0)


def test_fit_insufficient():
    with pytest.raises(InsufficientData):
        fit_empirical_rate([0.5**k for k in range(9)], burn_in=0)
    with pytest.raises(InsufficientData):
        fit_empirical_rate([0.5**k for k in range(15)], burn_in=6)


def test_fit_default_burn_in_drops_transient():
    errs = [100.0] * 10 + [0.8**k for k in range(90)]
    c, _ = fit_empirical_rate(errs)
    assert c == pytest.approx(0.8, abs=1e-9)


def test_fit_sync_running_example():
    spec = SystemSpec([[0.0, 0.5], [0.25, 0.0]], [1.0, 1.0])
    rec = run_trajectory(spec, [0.0, 0.0], ScheduleState.start(SchedulePolicy(ScheduleKind.FULL_SYNC, 2)),
                         ConvergenceCriterion(1e-13, 1000))
    c, _ = fit_empirical_rate(rec.error_norms)
    assert 0.34 <= c <= 0.37


def sync_contraction(spec):
    sched = ScheduleState.start(SchedulePolicy(ScheduleKind.FULL_SYNC, spec.n))
    rec = run_trajectory(spec, np.zeros(spec.n), sched, ConvergenceCriterion(1e-13, 5000))
    return fit_empirical_rate(rec.error_norms)[0]


def test_sync_consistency_random_systems():
    checked = 0
    seed = 0
    while checked < 20:
        spec = generate_system(8, 0.9, seed=seed)
        seed += 1
        if dominant_gap(spec.F) > 0.8:
            continue
        assert abs(sync_contraction(spec) - spectral_radius(spec.F).rho) <= 0.05
        checked += 1


def test_slower_updates_do_not_speed_convergence():
    small, large = [], []
    for seed in range(50):
        spec = generate_system(6, 0.9, seed=seed)
        spec = SystemSpec(spec.F * 0.9 / spectral_radius(np.abs(spec.F)).rho, spec.D)
        for gamma, out in ((0.2, small), (0.6, large)):
            sched = ScheduleState.start(SchedulePolicy(ScheduleKind.BOUNDED_DELAY_REPAIR, 6, (gamma,) * 6, 8, seed))
            rec = run_trajectory(spec, np.zeros(6), sched, ConvergenceCriterion(1e-12, 50_000))
            out.append(fit_empirical_rate(rec.error_norms)[0])
    assert np.mean(small) >= np.mean(large) - 0.05
