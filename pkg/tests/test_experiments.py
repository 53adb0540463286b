"""Harness behavior: settings, trials, complexity search, bounds, online runs."""

import math

import numpy as np
import pytest

from forecastcomp.agents import Truthful
from forecastcomp.experiments import (
    CompetitionSetting,
    ConsistentBestResponse,
    MyopicBestResponse,
    OnlinePreference,
    balls_in_bins_max,
    derive_seed,
    entropy_range,
    estimate_event_complexity,
    estimate_success_prob,
    gap_setting,
    identical_beliefs_setting,
    near_tie_setting,
    online_run,
    perfect_vs_terrible_setting,
    random_setting,
    regret_bound,
    run_competition_trial,
    theoretical_bounds,
    wilson_interval,
)
from forecastcomp.mechanisms import Elf, MultWeights, SimpleMax, elf_point_prob, selection_law
from forecastcomp.regularizers import NEG_ENTROPY


class TestSettings:
    def test_validation(self):
        with pytest.raises(ValueError):
            CompetitionSetting(np.full((1, 3), 0.5), np.full(3, 0.5))
        with pytest.raises(ValueError):
            CompetitionSetting(np.full((2, 3), 0.5), np.full(2, 0.5))
        with pytest.raises(ValueError):
            CompetitionSetting(np.full((2, 3), 1.5), np.full(3, 0.5))

    def test_perfect_vs_terrible_accuracies(self):
        setting = perfect_vs_terrible_setting(6, 10)
        acc = setting.accuracies()
        assert acc[0] == 1.0
        np.testing.assert_array_equal(acc[1:], 0.0)

    def test_perfect_vs_terrible_point_probs(self):
        n = 8
        setting = perfect_vs_terrible_setting(n, 1)
        f = elf_point_prob(setting.beliefs, 1, 0)
        assert f[0] == 2.0 / n
        np.testing.assert_allclose(f[1:], (n - 2) / (n * (n - 1)), rtol=1e-14)

    def test_perfect_vs_terrible_simple_max_always_picks_leader(self):
        setting = perfect_vs_terrible_setting(5, 4)
        for k in range(10):
            result = run_competition_trial(setting, [Truthful()] * 5, SimpleMax(), seed=k)
            assert result.winner == 0

    def test_gap_setting_accuracies(self):
        setting = gap_setting(4, 200, gap=0.32, seed=0)
        acc = setting.accuracies()
        assert acc[0] == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(acc[1:], 1.0 - 0.32, atol=1e-9)

    def test_near_tie_tiers(self):
        eps = 0.2
        setting = near_tie_setting(5, 100, eps, seed=1)
        acc = setting.accuracies()
        assert acc[0] == pytest.approx(1.0, abs=1e-12)
        assert np.min(acc) == pytest.approx(1.0 - 2 * eps, abs=1e-9)
        assert setting.epsilon_optimal(eps) == {0, 1, 2}

    def test_identical_beliefs_full_tie(self):
        setting = identical_beliefs_setting(4, 7, seed=2)
        acc = setting.accuracies()
        assert np.all(acc == acc[0])


class TestTrials:
    def test_deterministic_leader_wins(self):
        beliefs = np.zeros((3, 4))
        beliefs[0] = 1.0
        setting = CompetitionSetting(beliefs, np.ones(4))
        result = run_competition_trial(setting, [Truthful()] * 3, SimpleMax(), seed=11)
        assert result.winner == 0
        assert result.winner_is_eps_optimal(0.5)

    def test_bit_exact_replay(self):
        setting = perfect_vs_terrible_setting(5, 6)
        a = run_competition_trial(setting, [Truthful()] * 5, Elf(), seed=3)
        b = run_competition_trial(setting, [Truthful()] * 5, Elf(), seed=3)
        assert a.winner == b.winner
        assert a.draw.rng_trace == b.draw.rng_trace

    def test_mw_winner_frequency_matches_exact_law(self):
        # oracle: expected winner law = sum over outcome vectors of
        # P(y) * softmax law
        setting = random_setting(3, 4, seed=5)
        mech = MultWeights(eta=0.3)
        bits = ((np.arange(16)[:, None] >> np.arange(4)[None, :]) & 1).astype(float)
        weights = np.prod(bits * setting.theta + (1 - bits) * (1 - setting.theta), axis=1)
        exact = np.zeros(3)
        for k in range(16):
            exact += weights[k] * selection_law(mech, setting.beliefs, bits[k])
        trials = 30_000
        counts = np.zeros(3)
        for k in range(trials):
            result = run_competition_trial(setting, [Truthful()] * 3, mech, seed=derive_seed(1234, k))
            counts[result.winner] += 1
        freq = counts / trials
        se = np.sqrt(exact * (1 - exact) / trials)
        assert np.all(np.abs(freq - exact) <= 3 * se + 1e-9)


class TestSuccessProbability:
    def test_epsilon_one_always_succeeds(self):
        setting = random_setting(4, 5, seed=6)
        est = estimate_success_prob(setting, [Truthful()] * 4, Elf(), 1.0, 200, seed=7)
        assert est.rate == 1.0

    def test_dominant_leader_with_many_events(self):
        setting = gap_setting(4, 400, gap=0.32, seed=8)
        est = estimate_success_prob(setting, [Truthful()] * 4, SimpleMax(), 0.3, 200, seed=9)
        assert est.rate == 1.0

    def test_lower_bound_scenario_hurts_event_lotteries(self):
        n = 100
        m = math.ceil(n / 4 * math.log(n))
        setting = perfect_vs_terrible_setting(n, m)
        est = estimate_success_prob(setting, [Truthful()] * n, Elf(), 0.5, 400, seed=10)
        assert est.rate < 0.5

    def test_threads_do_not_change_counts(self):
        setting = random_setting(4, 6, seed=11)
        a = estimate_success_prob(setting, [Truthful()] * 4, Elf(), 0.2, 100, seed=12, threads=1)
        b = estimate_success_prob(setting, [Truthful()] * 4, Elf(), 0.2, 100, seed=12, threads=8)
        assert a == b

    def test_wilson_interval_values(self):
        lower, upper, half = wilson_interval(90, 100)
        assert 0.82 < lower < 0.9 < upper < 0.96
        assert half == pytest.approx((upper - lower) / 2)


class TestEventComplexity:
    def test_full_tie_needs_one_event(self):
        est = estimate_event_complexity(
            SimpleMax(),
            lambda m: identical_beliefs_setting(5, m, seed=13),
            [Truthful()] * 5,
            epsilon=0.3,
            delta=0.1,
            trials=100,
            seed=14,
        )
        assert est.m_estimate == 1

    def test_simple_max_within_theoretical_bound(self):
        bound = theoretical_bounds("simple_max", 10, 0.3, 0.1)
        est = estimate_event_complexity(
            SimpleMax(),
            lambda m: gap_setting(10, m, gap=0.32, seed=15),
            [Truthful()] * 10,
            epsilon=0.3,
            delta=0.1,
            trials=300,
            seed=16,
        )
        assert est.m_estimate <= bound
        assert est.probes[-1].rate >= 0.9

    def test_search_cap(self):
        # epsilon-optimality at eps=0.05 is unreachable for the trailing
        # forecasters, but the cap stops the search
        with pytest.raises(RuntimeError, match="cap"):
            estimate_event_complexity(
                Elf(),
                lambda m: perfect_vs_terrible_setting(4, m),
                [Truthful()] * 4,
                epsilon=0.5,
                delta=0.01,
                trials=50,
                seed=17,
                m_cap=8,
            )


class TestTheoreticalBounds:
    def test_simple_max_value(self):
        assert theoretical_bounds("simple_max", 10, 0.3, 0.1) == 103

    def test_mw_value(self):
        # ceil(200 * ln(2000) / 0.01) = ceil(152018.049...)
        assert theoretical_bounds("mw", 100, 0.1, 0.1) == 152019

    def test_elf_proof_scale_is_order_millions(self):
        value = theoretical_bounds("elf_proof", 100, 0.1, 0.1)
        assert 1_000_000 <= value < 10_000_000

    def test_elf_statement_constant(self):
        expected = math.ceil(5 * 99 / 0.01 * math.log(4 * 99 / 0.1))
        assert theoretical_bounds("elf", 100, 0.1, 0.1) == expected

    def test_noisy_max_needs_small_gamma(self):
        value = theoretical_bounds("noisy_max", 10, 0.3, 0.1)
        expected = math.ceil(28 * math.log(200) / (0.3 * (0.3 / 14)))
        assert value == expected
        with pytest.raises(ValueError):
            theoretical_bounds("noisy_max", 10, 0.3, 0.1, gamma=0.1)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            theoretical_bounds("simple_max", 1, 0.3, 0.1)
        with pytest.raises(ValueError):
            theoretical_bounds("elf", 2, 0.3, 0.1)
        with pytest.raises(ValueError):
            theoretical_bounds("simple_max", 10, 1.5, 0.1)
        with pytest.raises(ValueError):
            theoretical_bounds("unknown", 10, 0.3, 0.1)


class TestBallsInBins:
    def test_single_ball_never_exceeds(self):
        result = balls_in_bins_max(50, 1, trials=50, seed=18)
        assert result.probability == 0.0

    def test_birthday_collision(self):
        # m = n balls: some bin holds at least 2 with high probability
        rng = np.random.default_rng(19)
        n = 2000
        hits = 0
        for _ in range(50):
            loads = np.bincount(rng.integers(0, n, size=n), minlength=n)
            if loads.max() >= 2:
                hits += 1
        assert hits == 50

    def test_heavy_load_tail(self):
        n = 10_000
        m = int(0.1 * n * math.log(n))
        result = balls_in_bins_max(n, m, trials=60, seed=20)
        assert result.threshold == pytest.approx(4 * m / n + 1)
        assert result.probability >= 0.95


class TestOnlineRun:
    def test_single_expert_zero_regret(self):
        rng = np.random.default_rng(21)
        beliefs = rng.random((1, 50))
        trace = online_run(
            beliefs, rng.random(50), [Truthful()], OnlinePreference("myopic"), NEG_ENTROPY, 0.1, seed=22
        )
        assert trace.regret == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_array_equal(trace.pis, 1.0)

    def test_regret_bound_holds_per_trial(self):
        n, T = 10, 1000
        eta = math.sqrt(math.log(n) / (10 * T))
        bound = regret_bound("mw", T, n)
        rng = np.random.default_rng(23)
        for k in range(5):
            trace = online_run(
                rng.random((n, T)),
                rng.random(T),
                [Truthful()] * n,
                OnlinePreference("myopic"),
                NEG_ENTROPY,
                eta,
                seed=k,
            )
            assert trace.regret <= bound

    def test_identical_beliefs_matches_reference_accounting(self):
        # reference oracle: an independent exponential-weights loop over the
        # same reports and outcomes
        n, T = 4, 300
        rng = np.random.default_rng(24)
        row = rng.random(T)
        beliefs = np.tile(row, (n, 1))
        eta = 0.05
        trace = online_run(
            beliefs, rng.random(T), [Truthful()] * n, OnlinePreference("myopic"), NEG_ENTROPY, eta, seed=25
        )
        weights = np.ones(n)
        mech_score = 0.0
        for t in range(T):
            pi = weights / weights.sum()
            scores = 1.0 - (trace.outcomes[t] - trace.reports[:, t]) ** 2
            mech_score += float(np.dot(pi, scores))
            weights *= np.exp(eta * scores)
        best = max(np.sum(1.0 - (trace.outcomes - beliefs[i]) ** 2) for i in range(n))
        assert trace.regret == pytest.approx(best - mech_score, abs=1e-9)

    def test_causality_replay(self):
        n, T = 5, 200
        rng = np.random.default_rng(26)
        trace = online_run(
            rng.random((n, T)),
            rng.random(T),
            [Truthful()] * n,
            OnlinePreference("myopic"),
            NEG_ENTROPY,
            0.02,
            seed=27,
        )
        for t in (0, 1, 50, 199):
            np.testing.assert_array_equal(trace.replay_pi(t), trace.pis[t])
        assert abs(trace.recompute_regret() - trace.regret) <= 1e-10

    def test_myopic_best_response_stays_in_band(self):
        n, T = 3, 40
        eta = 0.05
        rng = np.random.default_rng(28)
        beliefs = rng.random((n, T))
        trace = online_run(
            beliefs,
            rng.random(T),
            [MyopicBestResponse()] * n,
            OnlinePreference("myopic"),
            NEG_ENTROPY,
            eta,
            seed=29,
        )
        assert np.max(np.abs(trace.reports - beliefs)) <= 4 * eta

    def test_consistent_with_myopic_preference_matches_myopic(self):
        n, T = 3, 8
        rng = np.random.default_rng(30)
        beliefs = rng.random((n, T))
        theta = rng.random(T)
        kwargs = dict(preference=OnlinePreference("myopic"), regularizer=NEG_ENTROPY, eta=0.05, seed=31)
        a = online_run(beliefs, theta, [MyopicBestResponse()] * n, **kwargs)
        b = online_run(beliefs, theta, [ConsistentBestResponse()] * n, **kwargs)
        np.testing.assert_allclose(a.reports, b.reports, atol=1e-6)

    def test_consistent_uniform_runs_and_stays_in_band(self):
        n, T = 2, 6
        eta = 0.05
        rng = np.random.default_rng(32)
        beliefs = rng.random((n, T))
        trace = online_run(
            beliefs,
            rng.random(T),
            [ConsistentBestResponse(), Truthful()],
            OnlinePreference("consistent_uniform"),
            NEG_ENTROPY,
            eta,
            seed=33,
        )
        assert np.max(np.abs(trace.reports[0] - beliefs[0])) <= 4 * eta

    def test_horizon_guard(self):
        rng = np.random.default_rng(34)
        with pytest.raises(ValueError, match="horizon"):
            online_run(
                rng.random((2, 20)),
                rng.random(20),
                [ConsistentBestResponse(max_horizon=5), Truthful()],
                OnlinePreference("consistent_uniform"),
                NEG_ENTROPY,
                0.05,
                seed=35,
            )


class TestPointGapProperty:
    def test_expected_point_gap_exceeds_threshold(self):
        # leader vs trailer with accuracy gap 0.36 > eps = 0.3: the mean
        # per-run point gap must clear m * eps / (n - 1) up to噪 MC noise
        from forecastcomp.mechanisms import elf_sample_points

        n, m, eps, trials = 5, 40, 0.3, 1500
        setting = gap_setting(n, m, gap=0.36, seed=36)
        rng = np.random.default_rng(37)
        gaps = []
        for k in range(trials):
            y = (rng.random(m) < setting.theta).astype(float)
            points = elf_sample_points(setting.beliefs, y, seed=derive_seed(38, k))
            gaps.append(points[0] - points[1])
        mean_gap = float(np.mean(gaps))
        se = float(np.std(gaps) / math.sqrt(trials))
        assert mean_gap > m * eps / (n - 1) - 3 * se


class TestHoeffdingSanity:
    def test_score_concentration(self):
        # per-forecaster deviation beyond sqrt(ln(2n/delta)/(2m)) happens
        # with probability at most delta/n (two-sided)
        n, m, delta, trials = 4, 60, 0.2, 2000
        setting = random_setting(n, m, seed=39)
        expected = np.array(
            [
                np.mean(
                    setting.theta * (1 - (1 - setting.beliefs[i]) ** 2)
                    + (1 - setting.theta) * (1 - setting.beliefs[i] ** 2)
                )
                for i in range(n)
            ]
        )
        bound = math.sqrt(math.log(2 * n / delta) / (2 * m))
        rng = np.random.default_rng(40)
        exceed = np.zeros(n)
        for _ in range(trials):
            y = (rng.random(m) < setting.theta).astype(float)
            avg = np.mean(1.0 - (y - setting.beliefs) ** 2, axis=1)
            exceed += np.abs(avg - expected) > bound
        rates = exceed / trials
        se = math.sqrt(0.25 / trials)
        assert np.all(rates <= delta / n + 3 * se)


class TestRegretBound:
    def test_mw_value(self):
        T, n = 10**4, 10
        assert regret_bound("mw", T, n) == pytest.approx(2 * math.sqrt(10 * T * math.log(n)), rel=1e-12)
        assert regret_bound("mw", T, n) == pytest.approx(959.7, abs=0.3)

    def test_entropy_range(self):
        assert entropy_range(2) == pytest.approx(math.log(2), abs=1e-15)

    def test_general_matches_mw_for_entropy_constants(self):
        T, n = 5000, 8
        general = regret_bound("general", T, d_r=math.log(n), alpha=0.5, beta=3.0)
        assert general == pytest.approx(regret_bound("mw", T, n), rel=1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError, match="T >= 8"):
            regret_bound("mw", 4, 10)
        with pytest.raises(ValueError, match="max"):
            regret_bound("general", 1, d_r=10.0, alpha=0.5, beta=3.0)


class TestSuccessMonotonicity:
    def test_success_rate_nondecreasing_in_m(self):
        # up to sampling noise, more events never hurt on the gap family
        rates = []
        for m in (2, 8, 32, 128):
            est = estimate_success_prob(
                gap_setting(4, m, gap=0.32, seed=41),
                [Truthful()] * 4,
                SimpleMax(),
                0.3,
                600,
                seed=42,
            )
            rates.append(est.rate)
        slack = 3 * math.sqrt(0.25 / 600)
        assert all(b >= a - slack for a, b in zip(rates, rates[1:]))


class TestOnlinePreference:
    def test_myopic_coefficients(self):
        pref = OnlinePreference("myopic")
        assert pref.coefficient(3, 4) == 1.0
        assert pref.coefficient(3, 7) == 0.0

    def test_uniform_coefficients(self):
        pref = OnlinePreference("consistent_uniform")
        assert pref.coefficient(1, 2) == pref.coefficient(1, 9) == 1.0

    def test_discounted_coefficients(self):
        pref = OnlinePreference("discounted", discount=0.5)
        assert pref.coefficient(2, 3) == 0.5
        assert pref.coefficient(2, 5) == 0.125

    def test_validation(self):
        with pytest.raises(ValueError):
            OnlinePreference("whatever")
        with pytest.raises(ValueError):
            OnlinePreference("discounted", discount=1.5)
        with pytest.raises(ValueError):
            OnlinePreference("myopic").coefficient(4, 4)


class TestSeeds:
    def test_derive_seed_stable_and_distinct(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 1, 3)
        assert derive_seed(7, 1) != derive_seed(8, 1)
