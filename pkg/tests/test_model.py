import numpy as np
import pytest

from covertjam.model import (
    ChannelRealization,
    JammerStrategy,
    SystemParams,
    channel_from_batch,
    covariance,
    make_strategy,
    sample_channel,
    sample_channel_batch,
    single_beam,
)
from covertjam.numerics import quadform

PARAMS = SystemParams(epsilon=0.1, n=100, p_max=1.0, sigma_w2=1.0, sigma_b2=1.0, M=2, N=4)


class TestSystemParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(epsilon=0.0),
            dict(epsilon=1.0),
            dict(n=0),
            dict(p_max=0.0),
            dict(sigma_w2=-1.0),
            dict(M=0),
            dict(N=0),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        base = dict(epsilon=0.1, n=100, p_max=1.0, sigma_w2=1.0, sigma_b2=1.0, M=1, N=2)
        base.update(kwargs)
        with pytest.raises(ValueError):
            SystemParams(**base)


class TestSampling:
    def test_same_seed_identical(self):
        a = sample_channel(123, PARAMS)
        b = sample_channel(123, PARAMS)
        assert a.h_aw == b.h_aw
        assert np.array_equal(a.h_ab, b.h_ab)
        assert np.array_equal(a.h_jw, b.h_jw)
        assert np.array_equal(a.H_jb, b.H_jb)
        c = sample_channel(124, PARAMS)
        assert not np.array_equal(a.H_jb, c.H_jb)

    def test_unit_second_moment_h_aw(self):
        h_aw, _, _, _ = sample_channel_batch(7, PARAMS, 100_000)
        assert 0.99 <= np.mean(np.abs(h_aw) ** 2) <= 1.01

    def test_vector_norm_moment(self):
        _, _, h_jw, _ = sample_channel_batch(8, PARAMS, 100_000)
        assert 3.96 <= np.mean(np.sum(np.abs(h_jw) ** 2, axis=1)) <= 4.04

    def test_batch_shapes_and_determinism(self):
        batch = sample_channel_batch(9, PARAMS, 10)
        assert batch[0].shape == (10,)
        assert batch[1].shape == (10, 2)
        assert batch[2].shape == (10, 4)
        assert batch[3].shape == (10, 2, 4)
        again = sample_channel_batch(9, PARAMS, 10)
        for a, b in zip(batch, again):
            assert np.array_equal(a, b)
        ch = channel_from_batch(batch, 3)
        assert ch.M == 2 and ch.N == 4

    def test_dim_validation(self):
        with pytest.raises(ValueError, match="inconsistent"):
            ChannelRealization(h_aw=1.0, h_ab=np.ones(3), h_jw=np.ones(4), H_jb=np.ones((2, 4)))


class TestMakeStrategy:
    def test_single_beam_toward_e1(self):
        s = make_strategy(np.eye(4)[:, [0]], [1.0])
        assert s.d == 1
        assert np.allclose(s.V[:, 0], np.eye(4)[0])

    def test_isotropic(self):
        s = make_strategy(np.eye(3), np.full(3, 1 / 3))
        assert s.d == 3
        assert np.allclose(covariance(s, 1.0), np.eye(3) / 3)

    def test_renormalizes_fractions(self):
        s = make_strategy(np.eye(2), [2.0, 2.0])
        assert np.allclose(s.xi, [0.5, 0.5])

    def test_negative_fraction_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            make_strategy(np.eye(2), [1.0, -0.1])

    def test_zero_sum_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            make_strategy(np.eye(2), [0.0, 0.0])

    def test_dependent_columns_rejected(self):
        v = np.ones((3, 2), dtype=complex)
        with pytest.raises(ValueError, match="dependent"):
            make_strategy(v, [0.5, 0.5])

    def test_reorthonormalizes_slightly_skewed_input(self):
        rng = np.random.default_rng(0)
        v = np.linalg.qr(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))[0]
        skewed = v + 1e-9 * (rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        s = make_strategy(skewed, [0.3, 0.7])
        gram = s.V.conj().T @ s.V
        assert np.max(np.abs(gram - np.eye(2))) < 1e-12
        # polar correction stays close to the input directions
        assert np.max(np.abs(s.V - skewed)) < 1e-8

    def test_invariant_validation_on_raw_type(self):
        with pytest.raises(ValueError, match="orthonormal"):
            JammerStrategy(V=np.ones((2, 2), dtype=complex), xi=np.array([0.5, 0.5]))
        with pytest.raises(ValueError, match="sum to 1"):
            JammerStrategy(V=np.eye(2, dtype=complex), xi=np.array([0.4, 0.4]))


class TestCovariance:
    def test_isotropic_half_identity(self):
        s = make_strategy(np.eye(2), [0.5, 0.5])
        assert np.allclose(covariance(s, 1.0), 0.5 * np.eye(2))

    def test_single_beam_trace(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        sigma = covariance(single_beam(v), 3.0)
        assert np.trace(sigma).real == pytest.approx(3.0)
        u = v / np.linalg.norm(v)
        assert np.allclose(sigma, 3.0 * np.outer(u, u.conj()))

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            covariance(single_beam(np.ones(2)), -1.0)

    def test_eigenvalues_match_fractions(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            d = int(rng.integers(1, n + 1))
            v = np.linalg.qr(rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d)))[0]
            xi = rng.dirichlet(np.ones(d))
            p_j = float(rng.uniform(0.1, 5.0))
            s = make_strategy(v, xi)
            eigs = np.sort(np.linalg.eigvalsh(covariance(s, p_j)))
            expected = np.sort(np.concatenate([np.zeros(n - d), p_j * np.sort(s.xi)]))
            assert np.max(np.abs(eigs - expected)) < 1e-10
            assert eigs[0] >= -1e-10
            assert np.trace(covariance(s, p_j)).real == pytest.approx(p_j, abs=1e-10)

    def test_quadform_upper_bound(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = 5
            d = int(rng.integers(1, n + 1))
            v = np.linalg.qr(rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d)))[0]
            s = make_strategy(v, rng.dirichlet(np.ones(d)))
            h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            val = quadform(h, covariance(s, 1.0))
            bound = float(np.max(s.xi)) * float(np.sum(np.abs(h) ** 2))
            assert 0.0 <= val <= bound + 1e-12
