import math

import numpy as np
import pytest

from covertjam.covert import (
    PsiSample,
    _slot_statistics,
    alice_power_full_csi,
    alice_power_no_csi,
    alice_power_no_csi_n1,
    estimate_min_error_sum,
    ks_distance,
    min_error_sum_from_samples,
    psi_cdf,
    sample_psi,
    sample_psi_batch,
    simulate_slot_statistic,
    willie_variances,
)
from covertjam.model import ChannelRealization, SystemParams, derive_rng, make_strategy, single_beam
from covertjam.strategies import jammer_full_csi_m1


def params_for(M=1, N=2, epsilon=0.1, n=100, p_max=1.0):
    return SystemParams(epsilon=epsilon, n=n, p_max=p_max, sigma_w2=1.0, sigma_b2=1.0, M=M, N=N)


def fixed_channel(h_aw=1.0, h_ab=(1.0,), h_jw=(1.0, 1.0), H_jb=((1.0, 0.0),)):
    return ChannelRealization(h_aw=h_aw, h_ab=np.array(h_ab), h_jw=np.array(h_jw), H_jb=np.array(H_jb))


class TestWillieVariances:
    def test_arithmetic(self):
        ch = fixed_channel()
        iso = make_strategy(np.eye(2), [0.5, 0.5])
        pair = willie_variances(ch, iso, p_j=1.0, p_a=1.0, params=params_for())
        assert pair.sigma0 == pytest.approx(2.0)
        assert pair.sigma1 == pytest.approx(3.0)

    def test_pa_zero_collapses(self):
        ch = fixed_channel()
        iso = make_strategy(np.eye(2), [0.5, 0.5])
        pair = willie_variances(ch, iso, p_j=0.7, p_a=0.0, params=params_for())
        assert pair.sigma1 == pair.sigma0

    def test_orthogonal_beam_leaves_floor(self):
        ch = fixed_channel(h_jw=(1.0, 0.0))
        beam = single_beam(np.array([0.0, 1.0]))
        pair = willie_variances(ch, beam, p_j=5.0, p_a=0.0, params=params_for())
        assert pair.sigma0 == pytest.approx(1.0)

    def test_difference_is_alice_term(self):
        rng = np.random.default_rng(5)
        ch = fixed_channel(h_aw=1.3 - 0.2j, h_jw=tuple(rng.standard_normal(2)))
        beam = single_beam(np.array([1.0, 1.0j]))
        p_a = 0.37
        pair = willie_variances(ch, beam, p_j=2.0, p_a=p_a, params=params_for())
        # exact up to the one rounding of the sigma0 + term addition
        assert abs((pair.sigma1 - pair.sigma0) - p_a * abs(ch.h_aw) ** 2) <= 2 * np.finfo(float).eps * pair.sigma1

    def test_negative_power_rejected(self):
        ch = fixed_channel()
        with pytest.raises(ValueError):
            willie_variances(ch, single_beam(np.ones(2)), p_j=-1.0, p_a=0.0, params=params_for())


class TestAlicePowerFullCsi:
    def test_unit_quadform_case(self):
        ch = fixed_channel(h_jw=(1.0, 0.0))
        beam = single_beam(np.array([1.0, 0.0]))
        p = alice_power_full_csi(ch, beam, params_for(epsilon=0.4))
        assert p == pytest.approx(0.1)

    def test_orthogonal_beam_gives_zero(self):
        ch = fixed_channel(h_jw=(1.0, 0.0))
        beam = single_beam(np.array([0.0, 1.0]))
        assert alice_power_full_csi(ch, beam, params_for(epsilon=0.4)) == 0.0

    def test_linear_in_p_max(self):
        ch = fixed_channel(h_jw=(0.4, 1.1))
        beam = single_beam(np.array([1.0, 2.0]))
        p1 = alice_power_full_csi(ch, beam, params_for(p_max=1.0))
        p2 = alice_power_full_csi(ch, beam, params_for(p_max=2.0))
        assert p2 == pytest.approx(2.0 * p1)

    def test_degenerate_h_aw(self):
        ch = fixed_channel(h_aw=0.0)
        with pytest.raises(ValueError, match="degenerate"):
            alice_power_full_csi(ch, single_beam(np.ones(2)), params_for())


class TestClosedFormPowers:
    def test_no_csi_hand_value(self):
        # hand evaluation: 0.01 / (72 e ln 60)
        p = alice_power_no_csi(1, params_for(N=4, epsilon=0.1))
        assert abs(p - 1.248e-5) < 1e-8
        assert p == pytest.approx(1.2479254262283398e-05, rel=1e-12)

    def test_no_csi_linear_in_d(self):
        params = params_for(N=8, epsilon=0.1)
        base = alice_power_no_csi(1, params)
        for d in (1, 2, 4, 8):
            assert alice_power_no_csi(d, params) / base == d

    def test_no_csi_linear_in_p_max(self):
        p = alice_power_no_csi(1, params_for(N=4, epsilon=0.1, p_max=2.0))
        assert abs(p - 2.496e-5) < 2e-8

    def test_no_csi_d_out_of_range(self):
        with pytest.raises(ValueError):
            alice_power_no_csi(0, params_for(N=4))
        with pytest.raises(ValueError):
            alice_power_no_csi(5, params_for(N=4))

    def test_no_csi_increasing_in_d(self):
        params = params_for(N=6)
        values = [alice_power_no_csi(d, params) for d in range(1, 7)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_n1_hand_value(self):
        # hand evaluation: ln(6/5.9)/ln(60) * 0.1/12
        p = alice_power_no_csi_n1(params_for(N=1, epsilon=0.1))
        assert abs(p - 3.42e-5) < 1e-7
        assert p == pytest.approx(3.420799524189606e-05, rel=1e-12)

    def test_n1_linear_in_p_max(self):
        p1 = alice_power_no_csi_n1(params_for(N=1, p_max=1.0))
        p3 = alice_power_no_csi_n1(params_for(N=1, p_max=3.0))
        assert p3 == pytest.approx(3.0 * p1)

    def test_n1_positive_over_epsilon_range(self):
        for eps in (0.01, 0.1, 0.5, 0.9, 0.99):
            assert alice_power_no_csi_n1(params_for(N=1, epsilon=eps)) > 0.0


class TestSlotStatistic:
    def test_deterministic(self):
        assert simulate_slot_statistic(42, 100, 2.0) == simulate_slot_statistic(42, 100, 2.0)
        assert simulate_slot_statistic(42, 100, 2.0) != simulate_slot_statistic(43, 100, 2.0)

    def test_gamma_mean(self):
        draws = _slot_statistics(derive_rng(6), 100, 2.0, 100_000)
        assert 1.99 <= draws.mean() <= 2.01

    def test_gamma_variance(self):
        draws = _slot_statistics(derive_rng(7), 50, 3.0, 200_000)
        assert draws.var() == pytest.approx(3.0**2 / 50, rel=0.05)

    def test_concentration_at_large_n(self):
        draws = _slot_statistics(derive_rng(8), 10_000, 1.7, 5000)
        assert draws.std() < 0.05 * 1.7

    def test_per_use_oracle_agrees_in_law(self):
        fast = _slot_statistics(derive_rng(9), 64, 2.5, 40_000)
        slow = _slot_statistics(derive_rng(10), 64, 2.5, 40_000, per_use=True)
        se = math.sqrt(fast.var() / fast.size + slow.var() / slow.size)
        assert abs(fast.mean() - slow.mean()) < 4 * se
        assert slow.var() == pytest.approx(2.5**2 / 64, rel=0.1)


class TestEstimateMinErrorSum:
    def setup_method(self):
        self.params = params_for(N=4, n=100)
        rng = derive_rng(100)
        self.ch = ChannelRealization(
            h_aw=complex(rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2),
            h_ab=np.array([1.0]),
            h_jw=(rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2),
            H_jb=(rng.standard_normal((1, 4)) + 1j * rng.standard_normal((1, 4))) / np.sqrt(2),
        )
        self.strategy = jammer_full_csi_m1(self.ch, 2.0)

    def test_pa_zero_is_blind(self):
        est = estimate_min_error_sum(1, self.ch, self.strategy, 0.0, self.params, 20_000)
        assert est.error_sum >= 1.0 - 3.0 * est.stderr

    def test_lemma_power_is_covert(self):
        p_a = alice_power_full_csi(self.ch, self.strategy, self.params)
        est = estimate_min_error_sum(2, self.ch, self.strategy, p_a, self.params, 20_000)
        assert est.error_sum >= 0.9 - 3.0 * est.stderr

    def test_blatant_transmission_detected(self):
        params = params_for(N=4, n=10_000)
        est = estimate_min_error_sum(3, self.ch, self.strategy, 1000.0, params, 2000)
        assert est.error_sum < 0.05

    def test_monotone_in_pa_on_average(self):
        powers = [0.0, 0.05, 0.5]
        means = []
        ses = []
        for p_a in powers:
            vals = [
                estimate_min_error_sum((4, k), self.ch, self.strategy, p_a, self.params, 4000).error_sum
                for k in range(10)
            ]
            means.append(np.mean(vals))
            ses.append(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        assert means[1] <= means[0] + 2 * (ses[0] + ses[1])
        assert means[2] <= means[1] + 2 * (ses[1] + ses[2])

    def test_validation(self):
        with pytest.raises(ValueError):
            estimate_min_error_sum(5, self.ch, self.strategy, -0.1, self.params, 2000)
        with pytest.raises(ValueError):
            estimate_min_error_sum(5, self.ch, self.strategy, 0.1, self.params, 100)

    def test_per_use_path_consistent(self):
        p_a = 10.0 * alice_power_full_csi(self.ch, self.strategy, self.params)
        fast = estimate_min_error_sum(6, self.ch, self.strategy, p_a, self.params, 5000)
        slow = estimate_min_error_sum(7, self.ch, self.strategy, p_a, self.params, 5000, per_use=True)
        assert abs(fast.error_sum - slow.error_sum) < 4 * (fast.stderr + slow.stderr)

    def test_threshold_sweep_exact_on_tiny_sample(self):
        # fully separated samples: a perfect threshold exists
        err, p_fa, p_md = min_error_sum_from_samples([1.0, 2.0], [3.0, 4.0])
        assert (err, p_fa, p_md) == (0.0, 0.0, 0.0)
        # identical samples: nothing beats the trivial strategies
        err, _, _ = min_error_sum_from_samples([1.0, 2.0], [1.0, 2.0])
        assert err == 1.0


class TestPsi:
    def test_nonnegative(self):
        vals = sample_psi_batch(10, 3, 5, 10_000)
        assert np.all(vals >= 0.0)
        with pytest.raises(ValueError):
            PsiSample(value=-0.1, d=1)

    def test_scalar_matches_batch(self):
        s = sample_psi(11, 2, 4)
        assert s.d == 2
        assert s.value == sample_psi_batch(11, 2, 4, 1)[0]

    def test_median_at_d1(self):
        vals = sample_psi_batch(12, 1, 3, 10_000)
        assert 0.95 <= np.median(vals) <= 1.05

    def test_full_rank_is_v_invariant(self):
        # at d = N the gain is ||h_jw||^2 for any unitary V, canonical or not
        rng = derive_rng(13)
        h = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / np.sqrt(2)
        v = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
        canonical = np.sum(np.abs(h) ** 2)
        rotated = np.sum(np.abs(v.conj().T @ h) ** 2)
        assert rotated == pytest.approx(canonical, rel=1e-12)

    def test_d_range_validated(self):
        with pytest.raises(ValueError):
            sample_psi(14, 0, 4)
        with pytest.raises(ValueError):
            sample_psi(14, 5, 4)


class TestPsiCdf:
    def test_values(self):
        assert psi_cdf(1.0, 1) == pytest.approx(0.5)
        assert psi_cdf(0.0, 3) == 0.0
        assert psi_cdf(1.0, 3) == pytest.approx(0.125)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            psi_cdf(-0.5, 1)

    def test_vectorized(self):
        out = psi_cdf(np.array([0.0, 1.0, 3.0]), 2)
        assert np.allclose(out, [(0.0) ** 2, 0.25, 0.75**2])


class TestKsDistance:
    def test_inverse_transform_samples_pass(self):
        rng = derive_rng(15)
        for d in (1, 2, 4):
            u = rng.uniform(size=10_000)
            root = u ** (1.0 / d)
            samples = root / (1.0 - root)  # inverse of (x/(1+x))^d
            assert ks_distance(samples, d) < 1.63 / math.sqrt(10_000)

    def test_mismatched_d_is_large(self):
        for d in (1, 2, 4):
            samples = sample_psi_batch((16, d), d, d + 2, 10_000)
            assert ks_distance(samples, d + 2) > 0.1

    def test_constant_samples_near_one(self):
        assert ks_distance(np.full(1000, 100.0), 1) > 0.9

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_distance([], 1)
