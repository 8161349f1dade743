import math

import numpy as np
import pytest

from pointerlab import SystemOperator, SystemState, pps_context
from pointerlab.montecarlo import (MonteCarloResult, mc_gamma, mc_mean_a, mc_re_weak_value,
                                   pps_profile_any, ps_profile_any, sample_positions)
from pointerlab.verify import check_monte_carlo, monte_carlo_cases


def test_sampler_reproduces_density_moments(grid, gauss):
    draws = sample_positions(grid, gauss.density, 200_000, np.random.default_rng(0))
    assert abs(draws.mean()) < 0.01
    assert draws.var() == pytest.approx(1.0 + grid.dq ** 2 / 12, rel=0.01)


def test_sampler_is_seeded(grid, gauss):
    a = sample_positions(grid, gauss.density, 100, np.random.default_rng(42))
    b = sample_positions(grid, gauss.density, 100, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_profiles_agree_with_oracle_for_general_operator(plus, plus_i, gauss):
    h = SystemOperator([[0.6, 0.3 - 0.2j], [0.3 + 0.2j, -0.4]])
    assert np.sum(ps_profile_any(plus, h, gauss, 0.4)) * gauss.grid.dq == pytest.approx(1.0)
    ctx = pps_context(plus, plus_i, h)
    assert np.sum(pps_profile_any(ctx, h, gauss, 0.4)) * gauss.grid.dq == pytest.approx(1.0)


def test_result_bookkeeping():
    r = MonteCarloResult("x", 2.0, 2.2, 0.5, 100)
    assert r.relative_error == pytest.approx(0.1)
    assert r.standard_error == pytest.approx(0.22)
    assert r.to_dict()["relative_error"] == pytest.approx(0.1)


@pytest.mark.parametrize("index", range(6))
def test_each_case_within_ten_percent(index):
    label, fn, args = monte_carlo_cases()[index]
    res = fn(*args, 10_000, np.random.default_rng(100 + index))
    assert res.relative_error < 0.10, label


def test_mean_estimate_is_unbiased(plus, p0, gauss):
    res = mc_mean_a(plus, p0, gauss, 0.5, 10_000, np.random.default_rng(3))
    # spread of a single reading is 1/0.5 = 2, so the mean of 10^4 readings is good to 0.02
    assert res.estimate_mean == pytest.approx(0.5, abs=0.08)


def test_gamma_estimate(plus, p0, gauss):
    res = mc_gamma(plus, p0, gauss, 0.5, 10_000, np.random.default_rng(4))
    assert res.estimate_mean == pytest.approx(0.5, abs=0.08)
    assert res.predicted == pytest.approx(2.0)


def test_re_weak_value_estimate(plus, gauss, p0):
    alpha = math.pi / 4 + 0.3
    ctx = pps_context(plus, SystemState.from_vector([math.cos(alpha), -math.sin(alpha)]), p0)
    res = mc_re_weak_value(ctx, p0, gauss, 0.02, 10_000, np.random.default_rng(5))
    assert abs(res.estimate_mean - ctx.a_w.re) < 4 * res.standard_error


def test_suite_is_deterministic():
    check_a, res_a = check_monte_carlo(seed=9, n=2_000)
    check_b, res_b = check_monte_carlo(seed=9, n=2_000)
    assert [r.empirical for _, r in res_a] == [r.empirical for _, r in res_b]
    assert check_a.max_residual == check_b.max_residual


def test_cases_include_complex_weak_value():
    ims = [abs(args[0].a_w.im) for _, _, args in monte_carlo_cases() if hasattr(args[0], "a_w")]
    assert len(monte_carlo_cases()) >= 5
    assert max(ims) > 0.1
