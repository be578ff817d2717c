import dataclasses
import math

import numpy as np
import pytest

from tailtwist.distributions import DistributionSpec
from tailtwist.dominance import Scenario, ThetaSource, select_dominant
from tailtwist.estimators import (
    EstimateReport,
    Method,
    efficiency,
    estimate_conventional,
    estimate_improved,
    estimate_naive,
    likelihood_ratio_conventional,
    likelihood_ratio_improved,
    optimality_ratio,
)
from tailtwist.streams import UnitSampleStream
from tailtwist.twist_optimizer import solve_p, theta_star


def weibull_scenario(gamma_db=20.0, shapes=(0.4, 0.8)):
    specs = [DistributionSpec.weibull(k, 1.0) for k in shapes]
    return Scenario.from_db(specs, gamma_db)


def minmax_plan(scenario):
    plan = select_dominant(scenario)
    budget = solve_p(scenario, plan).objective_value
    return plan.with_theta(theta_star(plan.s, budget), ThetaSource.MINMAX_IMPROVED)


# -- naive MC -------------------------------------------------------------------


def test_zero_threshold_is_certain():
    scenario = Scenario.from_linear([DistributionSpec.weibull(0.4, 1.0)], 0.0)
    report = estimate_naive(scenario, runs=10_000, seed=1)
    assert report.alpha_hat == 1.0
    assert report.relative_error == 0.0


def test_naive_matches_closed_form_survival():
    # single component: alpha = exp(-100^0.4) = 1.8188e-3
    scenario = Scenario.from_linear([DistributionSpec.weibull(0.4, 1.0)], 100.0)
    report = estimate_naive(scenario, runs=1_000_000, seed=3)
    alpha = 0.0018188088961578717
    se = math.sqrt(alpha * (1 - alpha) / report.runs)
    assert abs(report.alpha_hat - alpha) < 3 * se


def test_report_fields_are_consistent():
    scenario = weibull_scenario(gamma_db=10.0)
    report = estimate_naive(scenario, runs=50_000, seed=5)
    m = report.runs
    expected_var = (report.second_moment - report.alpha_hat**2) * m / (m - 1)
    assert report.variance == pytest.approx(expected_var, rel=1e-12)
    assert report.ci95_low <= report.alpha_hat <= report.ci95_high
    assert report.second_moment >= report.alpha_hat**2  # Jensen
    assert report.theta == 0.0
    assert report.seed == 5
    assert report.method is Method.NAIVE_MC


# -- likelihood ratios ------------------------------------------------------------


def test_likelihood_ratio_is_one_without_twisting():
    plan = select_dominant(weibull_scenario()).with_theta(0.0, ThetaSource.MANUAL)
    spec = DistributionSpec.weibull(0.4, 1.0)
    assert likelihood_ratio_improved(plan, [3.0], spec) == 1.0


def test_likelihood_ratio_frozen_value():
    # (1-theta)^-1 * exp(-theta * 100^0.4) at the minmax theta
    plan = select_dominant(weibull_scenario()).with_theta(
        0.8415106807538887, ThetaSource.MANUAL
    )
    spec = DistributionSpec.weibull(0.4, 1.0)
    value = likelihood_ratio_improved(plan, [100.0], spec)
    assert value == pytest.approx(0.031194753030558537, rel=1e-12)


@pytest.mark.parametrize("theta", [0.3, 0.8415106807538887])
def test_change_of_measure_identity_improved(theta):
    # L(x) * twisted density(x) must reproduce the original density
    spec = DistributionSpec.lognormal(0.0, 6.0)
    plan = select_dominant(
        Scenario.from_db([spec, spec], 25.0)
    ).with_theta(theta, ThetaSource.MANUAL)
    rng = np.random.default_rng(8)
    for _ in range(25):
        x = rng.uniform(0.05, 500.0, size=2)
        log_l = math.log(likelihood_ratio_improved(plan, x, spec))
        log_f = sum(spec.log_density(v) for v in x)
        log_g = sum(
            math.log1p(-theta) + math.log(spec.hazard_rate(v))
            - (1.0 - theta) * spec.cumulative_hazard(v)
            for v in x
        )
        assert log_l == pytest.approx(log_f - log_g, rel=1e-10, abs=1e-10)


def test_change_of_measure_identity_conventional():
    scenario = weibull_scenario()
    theta = 0.683
    rng = np.random.default_rng(9)
    for _ in range(25):
        x = rng.uniform(0.05, 500.0, size=scenario.n)
        log_l = math.log(likelihood_ratio_conventional(scenario, theta, x))
        log_f = sum(s.log_density(v) for s, v in zip(scenario.components, x))
        log_g = sum(
            math.log1p(-theta) + math.log(s.hazard_rate(v))
            - (1.0 - theta) * s.cumulative_hazard(v)
            for s, v in zip(scenario.components, x)
        )
        assert log_l == pytest.approx(log_f - log_g, rel=1e-10, abs=1e-10)


def test_likelihood_ratio_validation():
    plan = select_dominant(weibull_scenario())
    spec = DistributionSpec.weibull(0.4, 1.0)
    with pytest.raises(ValueError):
        likelihood_ratio_improved(plan, [1.0], spec)  # theta unset
    plan = plan.with_theta(0.5, ThetaSource.MANUAL)
    with pytest.raises(ValueError):
        likelihood_ratio_improved(plan, [1.0, 2.0], spec)  # wrong arity
    with pytest.raises(ValueError):
        likelihood_ratio_improved(plan, [-1.0], spec)


# -- IS estimators -----------------------------------------------------------------


def test_improved_with_zero_theta_equals_naive():
    scenario = weibull_scenario(gamma_db=10.0)
    plan = select_dominant(scenario).with_theta(0.0, ThetaSource.MANUAL)
    a = estimate_naive(scenario, runs=40_000, seed=21)
    b = estimate_improved(scenario, plan, runs=40_000, seed=21)
    assert a.alpha_hat == b.alpha_hat
    assert a.second_moment == b.second_moment


def test_improved_reduces_to_conventional_when_all_dominant():
    scenario = weibull_scenario(shapes=(0.5, 0.5, 0.5))
    plan = select_dominant(scenario).with_theta(0.6, ThetaSource.MANUAL)
    assert plan.s == scenario.n
    a = estimate_conventional(scenario, 0.6, runs=40_000, seed=13)
    b = estimate_improved(scenario, plan, runs=40_000, seed=13)
    assert a.alpha_hat == b.alpha_hat
    assert a.second_moment == b.second_moment
    assert a.variance == b.variance


def test_estimators_agree_at_moderate_threshold():
    # alpha ~ 8e-2 here, so all three estimators resolve it cheaply
    scenario = weibull_scenario(gamma_db=10.0)
    plan = minmax_plan(scenario)
    naive = estimate_naive(scenario, runs=400_000, seed=31)
    conventional = estimate_conventional(scenario, 0.4, runs=200_000, seed=32)
    improved = estimate_improved(scenario, plan, runs=200_000, seed=33)
    for a, b in [(naive, conventional), (naive, improved), (conventional, improved)]:
        se = math.sqrt((a.variance / a.runs) + (b.variance / b.runs))
        assert abs(a.alpha_hat - b.alpha_hat) < 3 * se


def test_weights_are_nonnegative_and_bounded():
    scenario = weibull_scenario()
    plan = minmax_plan(scenario)
    report = estimate_improved(scenario, plan, runs=100_000, seed=17)
    # every weight is at most (1-theta)^-s, so the mean is too
    assert 0.0 <= report.alpha_hat <= (1.0 - plan.theta) ** -plan.s
    assert report.second_moment >= report.alpha_hat**2


def test_improved_beats_conventional_on_heavy_light_mix():
    scenario = weibull_scenario()
    plan = select_dominant(scenario)
    for theta in (0.3, 0.6, 0.9):
        conv = estimate_conventional(scenario, theta, runs=100_000, seed=41)
        imp = estimate_improved(
            scenario, plan.with_theta(theta, ThetaSource.MANUAL), runs=100_000, seed=42
        )
        band = 3 * math.sqrt(conv.second_moment_se**2 + imp.second_moment_se**2)
        assert imp.second_moment <= conv.second_moment + band


def test_estimate_determinism_and_worker_independence():
    scenario = weibull_scenario()
    plan = minmax_plan(scenario)
    a = estimate_improved(scenario, plan, runs=200_000, seed=77, workers=1)
    b = estimate_improved(scenario, plan, runs=200_000, seed=77, workers=4)
    c = estimate_improved(scenario, plan, runs=200_000, seed=77, workers=4)
    assert a == b == c


def test_multichunk_partial_tail_chunk():
    # runs not a multiple of the chunk size must still be deterministic
    scenario = weibull_scenario(gamma_db=10.0)
    a = estimate_naive(scenario, runs=70_001, seed=2, workers=1)
    b = estimate_naive(scenario, runs=70_001, seed=2, workers=3)
    assert a == b


def test_improved_validates_plan():
    scenario = weibull_scenario()
    plan = select_dominant(scenario)
    with pytest.raises(ValueError):
        estimate_improved(scenario, plan, runs=100, seed=0)  # theta unset
    mixed = dataclasses.replace(
        plan.with_theta(0.5, ThetaSource.MANUAL), dominant_indices=(0, 1), s=2
    )
    with pytest.raises(ValueError):
        estimate_improved(scenario, mixed, runs=100, seed=0)  # not identical


def test_conventional_validates_theta():
    scenario = weibull_scenario()
    with pytest.raises(ValueError):
        estimate_conventional(scenario, 1.0, runs=100, seed=0)


def test_runs_must_be_positive():
    scenario = weibull_scenario()
    with pytest.raises(ValueError):
        estimate_naive(scenario, runs=0, seed=0)


# -- efficiency and optimality -------------------------------------------------------


def _synthetic_report(alpha, variance):
    return EstimateReport(
        method=Method.IMPROVED_IS,
        alpha_hat=alpha,
        second_moment=variance + alpha**2,
        second_moment_se=0.0,
        variance=variance,
        relative_error=math.sqrt(variance) / alpha,
        ci95_low=alpha,
        ci95_high=alpha,
        runs=1000,
        theta=0.5,
        seed=0,
    )


def test_efficiency_of_naive_against_itself_is_one():
    alpha = 0.02
    report = _synthetic_report(alpha, alpha * (1 - alpha))
    assert efficiency(report, alpha).xi == pytest.approx(1.0, rel=1e-12)


def test_efficiency_validation():
    report = _synthetic_report(0.02, 0.0)
    with pytest.raises(ValueError):
        efficiency(report, 0.02)
    with pytest.raises(ValueError):
        efficiency(_synthetic_report(0.02, 1e-4), 1.5)


def test_optimality_ratio_endpoints():
    alpha = 1e-4
    assert optimality_ratio(alpha, alpha) == pytest.approx(1.0, rel=1e-12)
    assert optimality_ratio(alpha**2, alpha) == pytest.approx(2.0, rel=1e-12)


def test_optimality_ratio_validation():
    with pytest.raises(ValueError):
        optimality_ratio(1.0, 0.5)
    with pytest.raises(ValueError):
        optimality_ratio(0.5, 1.0)
    with pytest.raises(ValueError):
        optimality_ratio(0.0, 0.5)


def test_estimator_consumes_stream_components_in_order():
    # replication layout: chunk j / component i blocks, in index order
    scenario = weibull_scenario(gamma_db=10.0)
    report = estimate_naive(scenario, runs=1000, seed=55)
    stream = UnitSampleStream(55, 0)
    x0 = scenario.components[0].inverse_cumulative_hazard(-np.log(stream.uniforms(1000)))
    x1 = scenario.components[1].inverse_cumulative_hazard(-np.log(stream.uniforms(1000)))
    expected = float(np.mean(x0 + x1 > scenario.threshold_linear))
    assert report.alpha_hat == expected
