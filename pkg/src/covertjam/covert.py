"""Covertness-achieving powers and Willie's detection-error simulation.

Willie's optimal test is an energy test: the average received power over a
slot of n uses is Gamma(n, sigma/n) given the per-use variance sigma, so the
detector is simulated by drawing that sufficient statistic directly. A slow
per-use path (summing squared complex Gaussian samples) is kept behind a
debug flag as an oracle for the Gamma shortcut.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ChannelRealization,
    JammerStrategy,
    NoiseVariancePair,
    SystemParams,
    complex_gaussian,
    derive_rng,
)
from .numerics import quadform


@dataclass(frozen=True)
class DetectionEstimate:
    """Monte Carlo estimate of min over thresholds of P_FA + P_MD."""

    error_sum: float
    stderr: float
    n_slots: int
    n: int

    def __post_init__(self):
        if not 0.0 <= self.error_sum <= 1.0:
            raise ValueError(f"error_sum out of [0,1]: {self.error_sum}")
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")


@dataclass(frozen=True)
class PsiSample:
    """One draw of the normalized AN-gain ratio psi (nonnegative)."""

    value: float
    d: int

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError("psi is nonnegative by construction")


def willie_variances(
    ch: ChannelRealization,
    s: JammerStrategy,
    p_j: float,
    p_a: float,
    params: SystemParams,
) -> NoiseVariancePair:
    """Per-use variances of Willie's observation under H0 and H1."""
    if p_j < 0.0 or p_a < 0.0:
        raise ValueError("powers must be nonnegative")
    sigma0 = params.sigma_w2 + p_j * quadform(ch.h_jw, s.mixing())
    sigma1 = sigma0 + p_a * abs(ch.h_aw) ** 2
    return NoiseVariancePair(sigma0=sigma0, sigma1=sigma1)


def alice_power_full_csi(ch: ChannelRealization, s: JammerStrategy, params: SystemParams) -> float:
    """Covertness-achieving transmit power when Willie's CSI is known.

    Equals (epsilon * p_max / 4|h_aw|^2) times the AN gain the strategy puts
    on Willie's channel; zero when the AN is orthogonal to h_jw.
    """
    gain = abs(ch.h_aw) ** 2
    if gain == 0.0:
        raise ValueError("degenerate channel: h_aw = 0")
    return params.epsilon * params.p_max / (4.0 * gain) * quadform(ch.h_jw, s.mixing())


def alice_power_no_csi(d: int, params: SystemParams) -> float:
    """Covertness-achieving power without Willie's CSI, for an equal-power
    d-direction strategy; linear in d."""
    if not 1 <= d <= params.N:
        raise ValueError(f"need 1 <= d <= N={params.N}, got d={d}")
    base = params.epsilon**2 * params.p_max / (72.0 * math.e * math.log(6.0 / params.epsilon))
    return d * base


def alice_power_no_csi_n1(params: SystemParams) -> float:
    """No-CSI power for a single-antenna jammer (sharper than the generic
    d=1 bound)."""
    eps = params.epsilon
    return math.log(6.0 / (6.0 - eps)) / math.log(6.0 / eps) * eps / 12.0 * params.p_max


def _slot_statistics(rng: np.random.Generator, n: int, sigma, count: int, per_use: bool = False) -> np.ndarray:
    """Draws of the per-slot average received power for variance(s) sigma.

    sigma may be a scalar or a length-count array. The fast path samples the
    Gamma(n, sigma/n) law of the statistic directly; per_use=True averages n
    squared complex Gaussian samples per slot instead (the oracle path).
    """
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (count,))
    if np.any(sigma <= 0.0):
        raise ValueError("sigma must be positive")
    if not per_use:
        return rng.gamma(shape=float(n), scale=sigma / n)
    out = np.empty(count)
    # chunked so the (slots, n) scratch array stays modest
    chunk = max(1, int(2_000_000 // max(n, 1)))
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        z = complex_gaussian(rng, (hi - lo, n))
        out[lo:hi] = sigma[lo:hi] * np.mean(np.abs(z) ** 2, axis=1)
    return out


def simulate_slot_statistic(seed: int, n: int, sigma: float, per_use: bool = False) -> float:
    """One draw of Willie's slot statistic; deterministic given the seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(_slot_statistics(derive_rng(seed), n, sigma, 1, per_use=per_use)[0])


def min_error_sum_from_samples(stats0: np.ndarray, stats1: np.ndarray):
    """min over thresholds tau of P_FA(tau) + P_MD(tau), from raw samples.

    Sweeping every candidate threshold over the merged order statistics
    yields 1 - TV_hat, the exact empirical total-variation complement for a
    threshold test (declare H1 when the statistic exceeds tau). Returns
    (error_sum, p_fa, p_md) at the minimizing threshold.
    """
    s0 = np.sort(np.asarray(stats0, dtype=float))
    s1 = np.sort(np.asarray(stats1, dtype=float))
    grid = np.unique(np.concatenate([s0, s1]))
    f0 = np.searchsorted(s0, grid, side="right") / s0.size
    f1 = np.searchsorted(s1, grid, side="right") / s1.size
    diff = f0 - f1
    k = int(np.argmax(diff))
    if diff[k] <= 0.0:
        # no threshold beats the trivial always-H0 / always-H1 strategies
        return 1.0, 0.0, 1.0
    return 1.0 - float(diff[k]), 1.0 - float(f0[k]), float(f1[k])


def estimate_min_error_sum(
    seed: int,
    ch: ChannelRealization,
    s: JammerStrategy,
    p_a: float,
    params: SystemParams,
    n_slots: int,
    per_use: bool = False,
) -> DetectionEstimate:
    """Monte Carlo estimate of Willie's best-threshold error sum.

    Conditions on the given channel realization and randomizes only the
    per-slot jammer power P_j ~ Uniform[0, p_max] and the receiver noise:
    n_slots independent slots are simulated under each hypothesis, each with
    its own P_j draw, and all thresholds are swept over the merged samples.
    The stderr is the binomial approximation at the minimizing threshold.
    """
    if p_a < 0.0:
        raise ValueError("p_a must be nonnegative")
    if n_slots < 1000:
        raise ValueError("n_slots must be at least 1e3 for a usable estimate")
    rng = derive_rng(seed)
    an_gain = quadform(ch.h_jw, s.mixing())
    alice_term = p_a * abs(ch.h_aw) ** 2

    p_j0 = rng.uniform(0.0, params.p_max, n_slots)
    p_j1 = rng.uniform(0.0, params.p_max, n_slots)
    sigma0 = params.sigma_w2 + p_j0 * an_gain
    sigma1 = params.sigma_w2 + p_j1 * an_gain + alice_term
    stats0 = _slot_statistics(rng, params.n, sigma0, n_slots, per_use=per_use)
    stats1 = _slot_statistics(rng, params.n, sigma1, n_slots, per_use=per_use)

    error_sum, p_fa, p_md = min_error_sum_from_samples(stats0, stats1)
    stderr = math.sqrt(p_fa * (1.0 - p_fa) / n_slots + p_md * (1.0 - p_md) / n_slots)
    return DetectionEstimate(error_sum=error_sum, stderr=stderr, n_slots=n_slots, n=params.n)


def sample_psi_batch(seed: int, d: int, N: int, count: int, random_v: bool = False) -> np.ndarray:
    """Vectorized draws of psi = d * h_jw^H V X V^H h_jw / |h_aw|^2 with
    X = I/d.

    The law is the same for any orthonormal V; random_v=True exercises that
    by drawing a fresh orthonormal N x d frame per sample (QR of a Gaussian
    matrix) instead of the first d canonical directions.
    """
    if not 1 <= d <= N:
        raise ValueError(f"need 1 <= d <= N, got d={d}, N={N}")
    rng = derive_rng(seed)
    h_jw = complex_gaussian(rng, (count, N))
    h_aw = complex_gaussian(rng, count)
    if random_v:
        v, _ = np.linalg.qr(complex_gaussian(rng, (count, N, d)))
        proj = np.einsum("bnd,bn->bd", v.conj(), h_jw)
    else:
        proj = h_jw[:, :d]
    # d * (1/d) * sum_l |v_l^H h|^2 = ||V^H h||^2
    return np.sum(np.abs(proj) ** 2, axis=1) / np.abs(h_aw) ** 2


def sample_psi(seed: int, d: int, N: int, random_v: bool = False) -> PsiSample:
    """One draw of psi for an equal-power d-direction strategy."""
    value = float(sample_psi_batch(seed, d, N, 1, random_v=random_v)[0])
    return PsiSample(value=value, d=d)


def psi_cdf(x, d: int):
    """Beta-prime(d, 1) CDF: (x / (1 + x))^d for x >= 0."""
    if d < 1:
        raise ValueError("d must be >= 1")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("psi_cdf is defined for x >= 0")
    out = (arr / (1.0 + arr)) ** d
    return float(out) if np.isscalar(x) else out


def ks_distance(samples, d: int) -> float:
    """One-sample Kolmogorov-Smirnov statistic of samples vs psi_cdf(., d)."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("empty sample list")
    cdf = psi_cdf(x, d)
    i = np.arange(1, x.size + 1) / x.size
    return float(max(np.max(i - cdf), np.max(cdf - (i - 1.0 / x.size))))
