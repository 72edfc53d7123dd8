"""Exact discrete trajectory engine over the reduced variable z.

The conditional state after m photocounts and dimensionless time tau is
the diagonal filter

    p(z, m, tau)  ~  z^(2m) exp(-z^2 tau) p0(z),

so a photocount multiplies every weight by z^2 and a no-count interval
multiplies it by exp(-z^2 dtau); both are diagonal and commute, and the
state is fully determined by the totals (m, tau).  Weights are kept in
log domain; the trajectory runner uses an equivalent linear-domain inner
loop with periodic renormalization and support pruning for speed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .distributions import AtomNumberDistribution, moment
from .errors import CountContradictionError, StepSizeError
from .records import TrajectoryRecord, as_generator

#: runner halves dtau whenever the predicted step probability exceeds this
DEFAULT_PROB_CAP = 0.1

#: log-weight window retained by support pruning
PRUNE_LOG_CUT = 400.0


@dataclass
class ExactEngineState:
    """Conditional distribution plus the photocount/time bookkeeping."""

    dist: AtomNumberDistribution
    m: int = 0
    tau: float = 0.0
    C: complex = 1.0 + 0.0j


def apply_count(state: ExactEngineState) -> ExactEngineState:
    """Register one photocount: weights gain a factor z^2, m increments.

    The weight at z = 0 becomes exactly zero (a detected photon is
    incompatible with a non-scattering configuration).  Raises
    :class:`CountContradictionError` if the state has no scattering
    component at all.
    """
    z = state.dist.support
    with np.errstate(divide="ignore"):
        log_gain = 2.0 * np.log(np.abs(z).astype(float))
    logw = state.dist.log_weights + log_gain
    if np.all(np.isinf(logw) & (logw < 0)):
        raise CountContradictionError(
            "photocount applied to a state supported only at z = 0"
        )
    dist = AtomNumberDistribution(z.copy(), logw, state.dist.mode)
    return replace(state, dist=dist, m=state.m + 1)


def apply_no_count(state: ExactEngineState, dtau: float) -> ExactEngineState:
    """No-count evolution over an interval dtau: weights decay as exp(-z^2 dtau)."""
    if dtau < 0:
        raise ValueError(f"interval must be nonnegative, got dtau={dtau}")
    z2 = state.dist.support.astype(float) ** 2
    logw = state.dist.log_weights - z2 * dtau
    dist = AtomNumberDistribution(state.dist.support.copy(), logw, state.dist.mode)
    return replace(state, dist=dist, tau=state.tau + dtau)


def photon_expectation(state: ExactEngineState) -> float:
    """Conditional cavity photon number |C|^2 <z^2>."""
    return abs(state.C) ** 2 * moment(state.dist, 2)


def step_probability(state: ExactEngineState, dtau: float) -> float:
    """Probability of the next photocount within dtau: <z^2> dtau."""
    return moment(state.dist, 2) * dtau


def step(
    state: ExactEngineState, dtau: float, epsilon: float
) -> tuple[ExactEngineState, bool]:
    """One Monte Carlo step against a pre-drawn uniform epsilon in (0, 1).

    The next-count probability P = <z^2> dtau is compared with epsilon;
    on a count the jump is applied before the interval's no-count decay.
    P must stay well below one for the first-order rule to make sense;
    P >= 1 raises :class:`StepSizeError`.
    """
    P = step_probability(state, dtau)
    if P >= 1.0:
        raise StepSizeError(f"step probability P={P:.3g} >= 1; shrink dtau")
    counted = P > epsilon
    if counted:
        state = apply_count(state)
    state = apply_no_count(state, dtau)
    return state, counted


def conditional_distribution(
    init: AtomNumberDistribution, m: int, tau: float
) -> AtomNumberDistribution:
    """Closed-form conditional distribution at totals (m, tau).

    Because count and no-count updates are commuting diagonal factors,
    this equals any step-by-step history with the same totals.
    """
    z = init.support.astype(float)
    with np.errstate(divide="ignore"):
        log_gain = 2.0 * m * np.log(np.abs(z)) if m else np.zeros_like(z)
    logw = init.log_weights + log_gain - z * z * tau
    return AtomNumberDistribution(init.support.copy(), logw, init.mode)


def run_trajectory(
    init: AtomNumberDistribution,
    C: complex = 1.0 + 0.0j,
    tau_max: float = 1.0,
    dtau: float = 1e-3,
    seed=0,
    snapshot_every: int = 0,
    prob_cap: float = DEFAULT_PROB_CAP,
    record_steps: bool = True,
    prune_every: int = 128,
) -> TrajectoryRecord:
    """Run one seeded quantum trajectory up to tau_max.

    Parameters
    ----------
    init : AtomNumberDistribution
        Initial distribution p0(z); left untouched.
    C : complex
        Scattering coefficient, only used to report photon expectations.
    tau_max, dtau : float
        Horizon and initial step in dimensionless time.  The runner
        halves dtau (persistently) whenever the predicted step
        probability exceeds ``prob_cap``; the final step is truncated to
        land exactly on tau_max.
    seed : int or numpy.random.Generator
        Uniform deviates come from a Philox stream (one per step).
    snapshot_every : int
        If positive, attach the conditional distribution every that many
        steps (reconstructed in log domain on the full initial support).
    record_steps : bool
        When False, only jump times and the final state are kept, which
        avoids per-step bookkeeping in large ensembles.

    Returns
    -------
    TrajectoryRecord
    """
    if tau_max < 0:
        raise ValueError(f"tau_max must be nonnegative, got {tau_max}")
    if dtau <= 0:
        raise ValueError(f"dtau must be positive, got {dtau}")
    rng = as_generator(seed)
    c2 = abs(C) ** 2

    base = init.prune(PRUNE_LOG_CUT)
    z = base.support.astype(float)
    z2 = z * z
    u = np.exp(base.log_weights - base.log_weights.max())
    u /= u.sum()
    decay = np.exp(-z2 * dtau)

    tau = 0.0
    m = 0
    jump_times: list[float] = []
    taus: list[float] = []
    ms: list[int] = []
    pes: list[float] = []
    snapshots: list[tuple[float, int, AtomNumberDistribution]] = []
    step_index = 0
    tiny = 1e-12 * max(tau_max, dtau)

    def snapshot():
        snap = conditional_distribution(init, m, tau)
        snapshots.append((tau, m, snap))

    if snapshot_every > 0:
        snapshot()
    while tau < tau_max - tiny:
        s = u.sum()
        if not (1e-100 < s < 1e100):
            u /= s
            s = 1.0
        mom2 = (u @ z2) / s
        # adapt the step before drawing, so the draw order is reproducible
        dtau_step = min(dtau, tau_max - tau)
        while mom2 * dtau > prob_cap:
            dtau *= 0.5
            decay = np.exp(-z2 * dtau)
            dtau_step = min(dtau, tau_max - tau)
        P = mom2 * dtau_step
        epsilon = rng.random()
        if record_steps:
            taus.append(tau)
            ms.append(m)
            pes.append(c2 * mom2)
        if P > epsilon:
            u *= z2
            m += 1
            jump_times.append(tau)
        if dtau_step == dtau:
            u *= decay
        else:
            u *= np.exp(-z2 * dtau_step)
        tau += dtau_step
        step_index += 1
        if prune_every and step_index % prune_every == 0:
            umax = u.max()
            keep = u > umax * 1.9e-174  # exp(-400) relative cut
            if not keep.all():
                z, z2, u = z[keep], z2[keep], u[keep]
                decay = np.exp(-z2 * dtau)
            u /= umax
        if snapshot_every > 0 and step_index % snapshot_every == 0:
            snapshot()

    final_dist = conditional_distribution(init, m, tau)
    if record_steps:
        taus.append(tau)
        ms.append(m)
        pes.append(c2 * moment(final_dist, 2))
    return TrajectoryRecord(
        seed=-1 if isinstance(seed, np.random.Generator) else int(seed),
        index=-1,
        engine="exact",
        taus=np.asarray(taus),
        ms=np.asarray(ms, dtype=np.int64),
        photon_expectations=np.asarray(pes),
        jump_times=np.asarray(jump_times),
        final_m=m,
        final_tau=tau,
        snapshots=snapshots,
        final_dist=final_dist,
    )
