"""System parameters, channel realizations, jammer strategies, seeded sampling.

Channel coefficients are i.i.d. circularly-symmetric complex Gaussian with
E|h|^2 = 1 (real and imaginary parts each N(0, 1/2)). All sampling takes an
explicit seed; substreams derive from (master_seed, task_index) so results do
not depend on how work is partitioned across workers.
"""

from dataclasses import dataclass, field

import numpy as np


def _flatten_seed(x):
    if isinstance(x, (tuple, list)):
        out = []
        for part in x:
            out.extend(_flatten_seed(part))
        return out
    return [int(x) & 0xFFFFFFFFFFFFFFFF]


def derive_rng(*stream) -> np.random.Generator:
    """Generator for the substream identified by the (possibly nested) tuple
    of integers; distinct tuples give statistically independent streams."""
    return np.random.default_rng(np.random.SeedSequence(tuple(_flatten_seed(stream))))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) entries: unit second moment per complex coefficient."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants: covertness target, slot length, powers, antennas.

    epsilon is the covertness requirement in (0, 1); n the channel uses per
    slot; p_max the jammer power cap (linear); sigma_w2 / sigma_b2 the noise
    variances at Willie and Bob; M and N the antenna counts of Bob and the
    jammer.
    """

    epsilon: float
    n: int
    p_max: float
    sigma_w2: float
    sigma_b2: float
    M: int
    N: int

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0,1), got {self.epsilon}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        for name in ("p_max", "sigma_w2", "sigma_b2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.M < 1 or self.N < 1:
            raise ValueError("antenna counts must be >= 1")


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading draw: h_aw scalar, h_ab (M,), h_jw (N,), H_jb (M,N)."""

    h_aw: complex
    h_ab: np.ndarray
    h_jw: np.ndarray
    H_jb: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h_aw", complex(self.h_aw))
        object.__setattr__(self, "h_ab", _readonly(np.atleast_1d(self.h_ab)))
        object.__setattr__(self, "h_jw", _readonly(np.atleast_1d(self.h_jw)))
        object.__setattr__(self, "H_jb", _readonly(np.atleast_2d(self.H_jb)))
        m, n = self.H_jb.shape
        if self.h_ab.shape != (m,) or self.h_jw.shape != (n,):
            raise ValueError(
                f"inconsistent dims: h_ab {self.h_ab.shape}, h_jw {self.h_jw.shape}, H_jb {self.H_jb.shape}"
            )

    @property
    def M(self) -> int:
        return self.H_jb.shape[0]

    @property
    def N(self) -> int:
        return self.H_jb.shape[1]

    @property
    def h_jb(self) -> np.ndarray:
        """Jammer-to-Bob vector for M=1, as the column vector of Eq.-style
        quadratic forms: h_jb^H Sigma h_jb equals the AN power Bob receives."""
        if self.M != 1:
            raise ValueError("h_jb is only defined for M=1")
        return self.H_jb[0].conj()


@dataclass(frozen=True)
class JammerStrategy:
    """AN covariance in factored form: directions V (N x d) and fractions xi.

    The implied covariance is Sigma = P_j V diag(xi) V^H; columns of V are
    orthonormal, xi is nonnegative and sums to one, and 1 <= d <= N. A thin V
    (d < N) is the canonical representation; xi is never zero-padded, so d is
    always the rank.
    """

    V: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        v = _readonly(np.atleast_2d(self.V))
        xi = np.array(self.xi, dtype=float)
        xi.setflags(write=False)
        object.__setattr__(self, "V", v)
        object.__setattr__(self, "xi", xi)
        n, d = v.shape
        if not 1 <= d <= n:
            raise ValueError(f"need 1 <= d <= N, got V of shape {v.shape}")
        if xi.shape != (d,):
            raise ValueError(f"xi must have length {d}, got {xi.shape}")
        gram_err = np.max(np.abs(v.conj().T @ v - np.eye(d)))
        if gram_err > 1e-10:
            raise ValueError(f"V columns not orthonormal (deviation {gram_err:.3e})")
        if np.any(xi < 0.0) or np.any(xi > 1.0):
            raise ValueError("power fractions must lie in [0,1]")
        if abs(float(xi.sum()) - 1.0) > 1e-12:
            raise ValueError(f"power fractions must sum to 1, got {xi.sum()!r}")

    @property
    def d(self) -> int:
        return self.V.shape[1]

    @property
    def N(self) -> int:
        return self.V.shape[0]

    def mixing(self) -> np.ndarray:
        """The N x N matrix V diag(xi) V^H (covariance without the P_j scale)."""
        return (self.V * self.xi) @ self.V.conj().T


@dataclass(frozen=True)
class NoiseVariancePair:
    """Willie's per-use variances under H0 (sigma0) and H1 (sigma1)."""

    sigma0: float
    sigma1: float

    def __post_init__(self):
        if self.sigma0 <= 0.0 or self.sigma1 < self.sigma0:
            raise ValueError(f"need 0 < sigma0 <= sigma1, got ({self.sigma0}, {self.sigma1})")


def sample_channel(seed: int, params: SystemParams) -> ChannelRealization:
    """Draw one block-fading realization, deterministic given the seed."""
    rng = derive_rng(seed)
    return ChannelRealization(
        h_aw=complex(complex_gaussian(rng, ())),
        h_ab=complex_gaussian(rng, params.M),
        h_jw=complex_gaussian(rng, params.N),
        H_jb=complex_gaussian(rng, (params.M, params.N)),
    )


def sample_channel_batch(seed: int, params: SystemParams, count: int):
    """Vectorized draws: arrays h_aw (B,), h_ab (B,M), h_jw (B,N), H_jb (B,M,N).

    Uses the same per-coefficient law as sample_channel but its own stream
    layout; intended for Monte Carlo sweeps, not for reproducing individual
    sample_channel outputs.
    """
    rng = derive_rng(seed)
    return (
        complex_gaussian(rng, count),
        complex_gaussian(rng, (count, params.M)),
        complex_gaussian(rng, (count, params.N)),
        complex_gaussian(rng, (count, params.M, params.N)),
    )


def channel_from_batch(batch, i: int) -> ChannelRealization:
    """Materialize draw i of a sample_channel_batch result."""
    h_aw, h_ab, h_jw, h_jb = batch
    return ChannelRealization(h_aw=complex(h_aw[i]), h_ab=h_ab[i], h_jw=h_jw[i], H_jb=h_jb[i])


def make_strategy(V, xi) -> JammerStrategy:
    """Build a validated JammerStrategy from near-orthonormal directions.

    V is re-orthonormalized by the symmetric (polar) correction, which keeps
    each column as close as possible to its input; xi is renormalized to sum
    to one. Dependent columns or nonpositive xi raise.
    """
    v = np.atleast_2d(np.asarray(V, dtype=complex))
    if v.ndim != 2:
        raise ValueError("V must be a 2-d array of column directions")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi < 0.0):
        raise ValueError("power fractions must be nonnegative")
    total = float(xi.sum())
    if total <= 0.0:
        raise ValueError("power fractions sum to zero")
    gram = v.conj().T @ v
    eigvals, eigvecs = np.linalg.eigh(gram)
    if eigvals[0] < 1e-6 * max(eigvals[-1], 1.0):
        raise ValueError("V has (numerically) dependent columns")
    inv_sqrt = (eigvecs * (1.0 / np.sqrt(eigvals))) @ eigvecs.conj().T
    return JammerStrategy(V=v @ inv_sqrt, xi=xi / total)


def single_beam(v) -> JammerStrategy:
    """Unit-rank strategy pointing all power along v."""
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("beam direction must be nonzero")
    return JammerStrategy(V=(v / nrm)[:, None], xi=np.array([1.0]))


def covariance(strategy: JammerStrategy, p_j: float) -> np.ndarray:
    """The N x N AN covariance Sigma = p_j V diag(xi) V^H (Hermitian PSD,
    trace p_j)."""
    if p_j < 0.0:
        raise ValueError("p_j must be nonnegative")
    return p_j * strategy.mixing()
