"""Jammer AN strategies, Bob's linear receivers, and the coupled optimizer.

Throughout, sigma is the noise-to-jam ratio sigma_b^2 / P_j and every
objective is the normalized covert-SNR target with its leading constant
stripped; raw_snr_* multiply the constants back in. Every Rayleigh-quotient
subproblem here has a rank-one numerator, so each argmax is a single linear
solve (Sherman-Morrison when the denominator matrix is a rank-one shift of
the identity), which also makes the alternating optimizer cheap to run in
bulk across Monte Carlo draws.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import numerics
from .model import (
    ChannelRealization,
    JammerStrategy,
    SystemParams,
    complex_gaussian,
    derive_rng,
    make_strategy,
    single_beam,
)


class SchemeNotApplicableError(ValueError):
    """A cancellation scheme was requested for antenna counts that lack the
    required null space."""


@dataclass(frozen=True)
class ReceiveFilter:
    """Bob's linear combining weights, stored unit-norm and phase-normalized
    (every objective is scale-invariant in c)."""

    c: np.ndarray

    def __post_init__(self):
        c = numerics.normalize_phase(np.asarray(self.c, dtype=complex))
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def M(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class SnrEvaluation:
    """Normalized covert-SNR objective value with its provenance."""

    value: float
    strategy: JammerStrategy
    filter: Optional[ReceiveFilter]
    scheme_tag: str

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not (np.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"objective must be finite and nonnegative, got {self.value}")


class SchemeResult(NamedTuple):
    strategy: JammerStrategy
    filter: ReceiveFilter
    evaluation: SnrEvaluation


class GlobalOptResult(NamedTuple):
    strategy: JammerStrategy
    filter: ReceiveFilter
    evaluation: SnrEvaluation
    converged: bool


def _require_m1(ch: ChannelRealization):
    if ch.M != 1:
        raise ValueError(f"operation requires M=1, channel has M={ch.M}")


def _check_sigma(sigma: float):
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")


def objective_m1(ch: ChannelRealization, s: JammerStrategy, sigma: float) -> float:
    """Full-CSI normalized objective for single-antenna Bob:
    AN gain at Willie over (AN leakage to Bob + sigma)."""
    _require_m1(ch)
    _check_sigma(sigma)
    mix = s.mixing()
    return numerics.quadform(ch.h_jw, mix) / (numerics.quadform(ch.h_jb, mix) + sigma)


def objective_no_csi_m1(ch: ChannelRealization, s: JammerStrategy, sigma: float) -> float:
    """No-CSI normalized objective for single-antenna Bob: d over the mean
    squared leakage plus sigma. Requires equal power fractions (xi = 1/d)."""
    _require_m1(ch)
    _check_sigma(sigma)
    d = s.d
    if np.max(np.abs(s.xi - 1.0 / d)) > 1e-9:
        raise ValueError("no-CSI objective requires equal power fractions")
    b = s.V.conj().T @ ch.h_jb
    return d / (float(np.sum(np.abs(b) ** 2)) / d + sigma)


def objective_filtered(ch: ChannelRealization, s: JammerStrategy, c: ReceiveFilter, sigma: float) -> float:
    """General normalized objective for a (strategy, filter) pair:
    (AN gain at Willie) |c^H h_ab|^2 / (c^H (H Sigma~ H^H + sigma I) c)."""
    _check_sigma(sigma)
    mix = s.mixing()
    num = numerics.quadform(ch.h_jw, mix) * abs(c.c.conj() @ ch.h_ab) ** 2
    hmh = ch.H_jb @ mix @ ch.H_jb.conj().T
    den = numerics.quadform(c.c, hmh) + sigma  # ||c|| = 1 by construction
    return num / den


def jammer_full_csi_m1(ch: ChannelRealization, sigma: float) -> JammerStrategy:
    """Optimal full-CSI strategy at M=1: all power on the dominant direction
    of (h_jb h_jb^H + sigma I)^{-1} h_jw h_jw^H."""
    _require_m1(ch)
    _check_sigma(sigma)
    h_jb = ch.h_jb
    b = np.outer(h_jb, h_jb.conj()) + sigma * np.eye(ch.N)
    return single_beam(numerics.top_gen_eig_rank1(ch.h_jw, b))


def _null_of_vector(h: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the directions with zero Hermitian inner product
    against h (i.e. {x : h^H x = 0})."""
    return numerics.nullspace_basis(h.conj()[None, :])


def jammer_no_csi_m1(ch: ChannelRealization, sigma: float) -> JammerStrategy:
    """No-CSI strategy at M=1: equal power on Bob's null space (d = N-1) or
    isotropic over all N directions, whichever scores higher.

    The two candidate objectives are compared directly instead of using a
    printed magnitude threshold; ties go to the null-space strategy.
    """
    _require_m1(ch)
    _check_sigma(sigma)
    if ch.N < 2:
        raise ValueError("no-CSI strategy selection needs N >= 2")
    q = _null_of_vector(ch.h_jb)
    s_null = make_strategy(q, np.ones(ch.N - 1))
    s_full = jammer_no_csi_isotropic(ch.N)
    if objective_no_csi_m1(ch, s_full, sigma) > objective_no_csi_m1(ch, s_null, sigma):
        return s_full
    return s_null


def jammer_given_filter(ch: ChannelRealization, c: ReceiveFilter, sigma: float) -> JammerStrategy:
    """Optimal single beam when Bob's filter is fixed: dominant direction of
    (h~ h~^H + sigma ||c||^2 I)^{-1} h_jw h_jw^H with h~ = H_jb^H c."""
    _check_sigma(sigma)
    h_eff = ch.H_jb.conj().T @ c.c
    # ||c|| = 1, so the shift is sigma exactly
    v = numerics.normalize_phase(numerics.rank1_shift_solve(h_eff, sigma, ch.h_jw))
    return single_beam(v)


def filter_given_direction(ch: ChannelRealization, s: JammerStrategy, sigma: float) -> ReceiveFilter:
    """Optimal filter when the jammer's strategy is fixed: dominant direction
    of (H Sigma~ H^H + sigma I)^{-1} h_ab h_ab^H.

    Single-direction strategies use the rank-one closed form; multi-direction
    ones (needed against the no-CSI strategies) fall back to a dense solve of
    the same B matrix.
    """
    _check_sigma(sigma)
    if s.d == 1:
        u = ch.H_jb @ s.V[:, 0]
        c = numerics.rank1_shift_solve(u, sigma, ch.h_ab)
        return ReceiveFilter(c)
    b = ch.H_jb @ s.mixing() @ ch.H_jb.conj().T + sigma * np.eye(ch.M)
    return ReceiveFilter(np.linalg.solve(b, ch.h_ab))


def scheme_c_mrc(ch: ChannelRealization, sigma: float) -> SchemeResult:
    """Bob fixes MRC against his own noise (c along h_ab); the jammer
    optimizes."""
    c = ReceiveFilter(ch.h_ab)
    s = jammer_given_filter(ch, c, sigma)
    value = objective_filtered(ch, s, c, sigma)
    return SchemeResult(s, c, SnrEvaluation(value, s, c, "c-mrc"))


def scheme_v_willie(ch: ChannelRealization, sigma: float) -> SchemeResult:
    """The jammer beams straight at Willie; Bob optimizes his filter."""
    s = single_beam(ch.h_jw)
    c = filter_given_direction(ch, s, sigma)
    value = objective_filtered(ch, s, c, sigma)
    return SchemeResult(s, c, SnrEvaluation(value, s, c, "v-willie"))


def scheme_bob_cancels(ch: ChannelRealization, sigma: float) -> SchemeResult:
    """Bob zero-forces the AN (c in the left null space of H_jb, as close to
    h_ab as the constraint allows); the jammer then beams at Willie.

    Needs M > N so that {c : c^H H_jb = 0} is nonempty.
    """
    if ch.M <= ch.N:
        raise SchemeNotApplicableError(f"bob-cancels needs M > N, got M={ch.M}, N={ch.N}")
    q = numerics.nullspace_basis(ch.H_jb.conj().T)
    c = ReceiveFilter(numerics.project_unit(ch.h_ab, q))
    s = single_beam(ch.h_jw)
    value = objective_filtered(ch, s, c, sigma)
    return SchemeResult(s, c, SnrEvaluation(value, s, c, "bob-cancels"))


def scheme_jammer_cancels(ch: ChannelRealization, sigma: float) -> SchemeResult:
    """The jammer zero-forces himself at Bob (beam in the null space of H_jb,
    as close to Willie as the constraint allows); Bob does plain MRC.

    Needs N > M so that {v : H_jb v = 0} is nonempty.
    """
    if ch.N <= ch.M:
        raise SchemeNotApplicableError(f"jammer-cancels needs N > M, got M={ch.M}, N={ch.N}")
    q = numerics.nullspace_basis(ch.H_jb)
    s = single_beam(numerics.project_unit(ch.h_jw, q))
    c = ReceiveFilter(ch.h_ab)
    value = objective_filtered(ch, s, c, sigma)
    return SchemeResult(s, c, SnrEvaluation(value, s, c, "jammer-cancels"))


def jammer_no_csi_isotropic(N: int) -> JammerStrategy:
    """Equal power over all N canonical directions (Sigma = P_j I / N)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return JammerStrategy(V=np.eye(N, dtype=complex), xi=np.full(N, 1.0 / N))


def jammer_no_csi_bob_mrc(ch: ChannelRealization, sigma: float) -> JammerStrategy:
    """No-CSI strategy when Bob commits to MRC: equal power on the null space
    of h~ = H_jb^H c (d = N-1) or over the full space including h~'s
    direction (d = N), decided by direct objective comparison.

    The comparison is invariant to the scale of c, so the unit MRC filter is
    used. Reduces to jammer_no_csi_m1's choice when M = 1.
    """
    _check_sigma(sigma)
    if ch.N < 2:
        raise ValueError("no-CSI strategy selection needs N >= 2")
    c = ReceiveFilter(ch.h_ab)
    h_eff = ch.H_jb.conj().T @ c.c
    norm2 = float(np.sum(np.abs(h_eff) ** 2))
    if norm2 <= 1e-24:
        # MRC already sees no AN; every direction is free (probability zero)
        return jammer_no_csi_isotropic(ch.N)
    q = _null_of_vector(h_eff)
    s_null = make_strategy(q, np.ones(ch.N - 1))
    val_null = (ch.N - 1) / sigma
    val_full = ch.N / (norm2 / ch.N + sigma)
    if val_full > val_null:
        v_full = np.concatenate([q, (h_eff / math.sqrt(norm2))[:, None]], axis=1)
        return make_strategy(v_full, np.ones(ch.N))
    return s_null


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _alternating_batch(h_ab, h_jw, h_jb, c0, sigma, tol, max_iter):
    """Alternating maximization over rows: each row carries one (channel,
    start) pair, iterated until its own objective change drops below tol, and
    retired from the working set when it does. Every half-step is an exact
    argmax, so the objective is nondecreasing within each run (checked).

    h_ab: (R, M), h_jw: (R, N), h_jb: (R, M, N), c0: (R, M). All arithmetic
    is row-independent, so retiring rows early never changes the survivors.
    """
    total = c0.shape[0]
    v_out = np.zeros_like(h_jw)
    c_out = np.zeros_like(h_ab)
    obj_out = np.zeros(total)
    conv_out = np.zeros(total, dtype=bool)

    idx = np.arange(total)
    a, w, h = h_ab, h_jw, h_jb
    hc = h.conj()
    c = _unit_rows(c0)
    obj = np.full(total, -np.inf)
    v = u = None
    for _ in range(max_iter):
        # jammer half-step: argmax_v for fixed c (Sherman-Morrison solve)
        h_eff = np.einsum("rmn,rm->rn", hc, c)
        scale = sigma + np.sum(np.abs(h_eff) ** 2, axis=-1)
        v = _unit_rows(w - h_eff * (np.einsum("rn,rn->r", h_eff.conj(), w) / scale)[:, None])
        u = np.einsum("rmn,rn->rm", h, v)
        num_w = np.abs(np.einsum("rn,rn->r", w.conj(), v)) ** 2
        gain_c = np.abs(np.einsum("rm,rm->r", c.conj(), a)) ** 2
        leak_c = np.abs(np.einsum("rm,rm->r", c.conj(), u)) ** 2
        obj_half = num_w * gain_c / (leak_c + sigma)
        _check_monotone(obj, obj_half)
        # filter half-step: argmax_c for fixed v
        scale = sigma + np.sum(np.abs(u) ** 2, axis=-1)
        c = _unit_rows(a - u * (np.einsum("rm,rm->r", u.conj(), a) / scale)[:, None])
        gain_c = np.abs(np.einsum("rm,rm->r", c.conj(), a)) ** 2
        leak_c = np.abs(np.einsum("rm,rm->r", c.conj(), u)) ** 2
        obj_new = num_w * gain_c / (leak_c + sigma)
        _check_monotone(obj_half, obj_new)
        done = np.abs(obj_new - obj) <= tol * np.maximum(1.0, np.abs(obj_new))
        obj = obj_new
        if np.any(done):
            retired = idx[done]
            v_out[retired], c_out[retired] = v[done], c[done]
            obj_out[retired], conv_out[retired] = obj[done], True
            if np.all(done):
                return v_out, c_out, obj_out, conv_out
            keep = ~done
            idx, obj, c, v = idx[keep], obj[keep], c[keep], v[keep]
            a, w, h, hc = a[keep], w[keep], h[keep], hc[keep]
    # max_iter exhausted: flush the still-active rows with converged=False
    v_out[idx], c_out[idx], obj_out[idx] = v, c, obj
    return v_out, c_out, obj_out, conv_out


def _check_monotone(before, after):
    slack = 1e-9 * np.maximum(1.0, np.abs(after))
    bad = after < np.where(np.isfinite(before), before, -np.inf) - slack
    if np.any(bad):
        drop = float(np.max(before[bad] - after[bad]))
        raise RuntimeError(f"alternating objective decreased by {drop:.3e}")


def alternating_trajectory(ch: ChannelRealization, sigma: float, c0, tol: float = 1e-9, max_iter: int = 500):
    """Objective value after every half-step of one alternating run started
    at filter c0. Exposed so the nondecreasing property can be inspected
    directly; _alternating_batch additionally enforces it on every call.
    """
    _check_sigma(sigma)
    c = np.asarray(c0, dtype=complex)
    c = c / np.linalg.norm(c)
    traj = []
    prev = -np.inf
    for _ in range(max_iter):
        h_eff = ch.H_jb.conj().T @ c
        v = ch.h_jw - h_eff * (h_eff.conj() @ ch.h_jw) / (sigma + np.sum(np.abs(h_eff) ** 2))
        v = v / np.linalg.norm(v)
        u = ch.H_jb @ v
        num = abs(ch.h_jw.conj() @ v) ** 2
        traj.append(num * abs(c.conj() @ ch.h_ab) ** 2 / (abs(c.conj() @ u) ** 2 + sigma))
        c = ch.h_ab - u * (u.conj() @ ch.h_ab) / (sigma + np.sum(np.abs(u) ** 2))
        c = c / np.linalg.norm(c)
        traj.append(num * abs(c.conj() @ ch.h_ab) ** 2 / (abs(c.conj() @ u) ** 2 + sigma))
        if abs(traj[-1] - prev) <= tol * max(1.0, abs(traj[-1])):
            break
        prev = traj[-1]
    return [float(t) for t in traj]


def _start_filters(h_ab, h_jw, h_jb, sigma, restarts, seed):
    """Initial filters per draw: MRC first, then the filter induced by the
    beam-at-Willie strategy, then the zero-forcing filter when M > N, then
    random unit filters. Starting from a scheme's filter makes the optimizer
    dominate that scheme on every realization, because the first half-step
    is an exact argmax against it.
    """
    batch, m = h_ab.shape
    n = h_jw.shape[1]
    starts = [h_ab]
    u = np.einsum("bmn,bn->bm", h_jb, _unit_rows(h_jw))
    scale = sigma + np.sum(np.abs(u) ** 2, axis=-1, keepdims=True)
    starts.append(h_ab - u * (np.einsum("bm,bm->b", u.conj(), h_ab) / scale[:, 0])[:, None])
    if m > n:
        gram = np.einsum("bmn,bmk->bnk", h_jb.conj(), h_jb)
        coef = np.linalg.solve(gram, np.einsum("bmn,bm->bn", h_jb.conj(), h_ab)[..., None])[..., 0]
        starts.append(h_ab - np.einsum("bmn,bn->bm", h_jb, coef))
    rng = derive_rng(seed, 0x6F70)
    while len(starts) < restarts:
        starts.append(complex_gaussian(rng, (batch, m)))
    return [_unit_rows(s) for s in starts[:restarts]]


def global_opt_alternating(
    ch: ChannelRealization,
    sigma: float,
    restarts: int = 8,
    tol: float = 1e-9,
    max_iter: int = 500,
    seed: int = 0,
) -> GlobalOptResult:
    """Approximate solution of the coupled (v, c) problem by alternating the
    two closed-form argmax half-steps from several starts.

    The strategy is restricted to a single direction (optimal for the full
    problem), and the best (v, c) over all starts is returned. When no start
    meets the tolerance within max_iter, the best iterate so far is returned
    with converged=False.
    """
    _check_sigma(sigma)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    v, c, value, converged = global_opt_alternating_batch(
        ch.h_ab[None, :],
        ch.h_jw[None, :],
        ch.H_jb[None, :, :],
        sigma,
        restarts=restarts,
        tol=tol,
        max_iter=max_iter,
        seed=seed,
    )
    s = single_beam(numerics.normalize_phase(v[0]))
    filt = ReceiveFilter(c[0])
    value = objective_filtered(ch, s, filt, sigma)
    return GlobalOptResult(s, filt, SnrEvaluation(value, s, filt, "global"), bool(converged[0]))


def global_opt_alternating_batch(
    h_ab: np.ndarray,
    h_jw: np.ndarray,
    h_jb: np.ndarray,
    sigma: float,
    restarts: int = 8,
    tol: float = 1e-9,
    max_iter: int = 500,
    seed: int = 0,
):
    """Vectorized alternating optimizer over a batch of channel draws.

    h_ab: (B, M), h_jw: (B, N), h_jb: (B, M, N). Returns (v, c, value,
    converged) arrays of shapes (B, N), (B, M), (B,), (B,); deterministic
    given (seed, restarts) and independent of batch partitioning only when
    the caller derives per-batch seeds itself.
    """
    batch, m = h_ab.shape
    starts = _start_filters(h_ab, h_jw, h_jb, sigma, restarts, seed)
    r = len(starts)
    c0 = np.stack(starts, axis=1).reshape(batch * r, m)
    v, c, obj, conv = _alternating_batch(
        np.repeat(h_ab, r, axis=0), np.repeat(h_jw, r, axis=0), np.repeat(h_jb, r, axis=0),
        c0, sigma, tol, max_iter,
    )
    obj = obj.reshape(batch, r)
    best = np.argmax(obj, axis=1)
    pick = np.arange(batch) * r + best
    return v[pick], c[pick], obj[np.arange(batch), best], conv[pick]


def scheme_values_batch(h_ab, h_jw, h_jb, sigma: float) -> dict:
    """Closed-form objective values of every applicable suboptimal scheme on
    a batch of draws; keys are scheme tags, values are (B,) arrays.

    Matches scheme_c_mrc / scheme_v_willie / scheme_*_cancels evaluated per
    draw (the scalar functions are the reference; this is the sweep engine).
    """
    _check_sigma(sigma)
    batch, m = h_ab.shape
    n = h_jw.shape[1]
    out = {}

    # c-mrc: c = h_ab direction, then the optimal beam via Sherman-Morrison
    c = _unit_rows(h_ab)
    h_eff = np.einsum("bmn,bm->bn", h_jb.conj(), c)
    scale = sigma + np.sum(np.abs(h_eff) ** 2, axis=-1)
    v = _unit_rows(h_jw - h_eff * (np.einsum("bn,bn->b", h_eff.conj(), h_jw) / scale)[:, None])
    u = np.einsum("bmn,bn->bm", h_jb, v)
    out["c-mrc"] = (
        np.abs(np.einsum("bn,bn->b", h_jw.conj(), v)) ** 2
        * np.abs(np.einsum("bm,bm->b", c.conj(), h_ab)) ** 2
        / (np.abs(np.einsum("bm,bm->b", c.conj(), u)) ** 2 + sigma)
    )

    # v-willie: v = h_jw direction; best filter value is h_ab^H B^{-1} h_ab
    u = np.einsum("bmn,bn->bm", h_jb, _unit_rows(h_jw))
    w2 = np.sum(np.abs(h_jw) ** 2, axis=-1)
    cross = np.abs(np.einsum("bm,bm->b", u.conj(), h_ab)) ** 2
    best_filter_gain = (
        np.sum(np.abs(h_ab) ** 2, axis=-1) - cross / (sigma + np.sum(np.abs(u) ** 2, axis=-1))
    ) / sigma
    out["v-willie"] = w2 * best_filter_gain

    if m > n:
        # bob-cancels: c is the projection of h_ab onto the left null space
        gram = np.einsum("bmn,bmk->bnk", h_jb.conj(), h_jb)
        coef = np.linalg.solve(gram, np.einsum("bmn,bm->bn", h_jb.conj(), h_ab)[..., None])[..., 0]
        resid = h_ab - np.einsum("bmn,bn->bm", h_jb, coef)
        out["bob-cancels"] = w2 * np.sum(np.abs(resid) ** 2, axis=-1) / sigma
    elif n > m:
        # jammer-cancels: v is the projection of h_jw onto the null space
        gram = np.einsum("bmn,bkn->bmk", h_jb, h_jb.conj())
        coef = np.linalg.solve(gram, np.einsum("bmn,bn->bm", h_jb, h_jw)[..., None])[..., 0]
        resid = h_jw - np.einsum("bmn,bm->bn", h_jb.conj(), coef)
        out["jammer-cancels"] = (
            np.sum(np.abs(resid) ** 2, axis=-1) * np.sum(np.abs(h_ab) ** 2, axis=-1) / sigma
        )
    return out


def raw_snr_m1(value: float, ch: ChannelRealization, params: SystemParams, p_j: float) -> float:
    """Undo the M=1 full-CSI normalization: multiply back
    C P_max / P_j with C = epsilon |h_ab|^2 / 4|h_aw|^2."""
    c_const = params.epsilon * abs(ch.h_ab[0]) ** 2 / (4.0 * abs(ch.h_aw) ** 2)
    return value * c_const * params.p_max / p_j


def raw_snr_filtered(value: float, ch: ChannelRealization, params: SystemParams, p_j: float) -> float:
    """Undo the filtered-objective normalization: multiply back
    C2 P_max / P_j with C2 = epsilon / 4|h_aw|^2."""
    return value * params.epsilon / (4.0 * abs(ch.h_aw) ** 2) * params.p_max / p_j


def raw_snr_no_csi_m1(value: float, ch: ChannelRealization, params: SystemParams, p_j: float) -> float:
    """Undo the no-CSI M=1 normalization: multiply back C1 P_max / P_j with
    C1 = epsilon^2 |h_ab|^2 / (72 e ln(6/epsilon))."""
    c1 = params.epsilon**2 * abs(ch.h_ab[0]) ** 2 / (72.0 * math.e * math.log(6.0 / params.epsilon))
    return value * c1 * params.p_max / p_j
