"""Small-lattice reference engine over explicit atomic configurations.

Keeps the full entangled light-matter conditional state: every occupation
vector q = (q_1, ..., q_M) carries a complex matter amplitude and the
coherent light amplitude alpha_q it drags along,

    alpha_q = (eta - i U10 a0 D10(q)) / (i (U11 D11(q) - delta_p) + kappa),

the steady state of the driven damped cavity mode for that frozen
configuration.  A photocount multiplies each branch by alpha_q (coherent
states are annihilation-operator eigenstates); between counts each branch
accumulates the complex exponent

    Phi_q(dt) = -|alpha_q|^2 kappa dt
                + (eta alpha_q* - i U10 a0 D10(q) alpha_q* - c.c.) dt / 2,

whose second term is purely imaginary (a phase).  Amplitude bookkeeping
is done through accumulated complex log-exponents, so long histories
never underflow.

This engine scales as the number of configurations C(N+M-1, M-1) and is
a validation referee for the reduced-variable engines, not a production
path; enumeration is capped accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln, logsumexp

from .distributions import MODE_MAXIMUM, MODE_MINIMUM, AtomNumberDistribution
from .errors import CountContradictionError
from .model import CavityParams, ModeFunctions
from .records import TrajectoryRecord, as_generator

#: refuse to enumerate bases larger than this
BASIS_CAP = 100_000


def count_configurations(N: int, M: int) -> int:
    """Number of occupation vectors of N atoms on M sites."""
    return math.comb(N + M - 1, M - 1)


def enumerate_configurations(N: int, M: int, cap: int = BASIS_CAP) -> np.ndarray:
    """All occupation vectors q with sum(q) = N, lexicographically ordered."""
    total = count_configurations(N, M)
    if total > cap:
        raise ValueError(
            f"basis of {total} configurations exceeds the referee cap {cap} "
            f"(N={N}, M={M})"
        )
    out = np.zeros((total, M), dtype=np.int64)
    row = 0

    def fill(prefix, remaining, site):
        nonlocal row
        if site == M - 1:
            out[row, :site] = prefix
            out[row, site] = remaining
            row += 1
            return
        for k in range(remaining + 1):
            fill(prefix + [k], remaining - k, site + 1)

    fill([], N, 0)
    return out


@dataclass(frozen=True)
class ConfigurationBasis:
    """Complete configuration enumeration with a lookup index."""

    N: int
    M: int
    configs: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    @classmethod
    def build(cls, N: int, M: int, cap: int = BASIS_CAP) -> "ConfigurationBasis":
        configs = enumerate_configurations(N, M, cap)
        index = {tuple(int(x) for x in q): i for i, q in enumerate(configs)}
        return cls(N=N, M=M, configs=configs, index=index)

    def __len__(self) -> int:
        return len(self.configs)


def superfluid_amplitudes(basis: ConfigurationBasis) -> np.ndarray:
    """Initial amplitudes of the superfluid: every atom spread over all sites.

    c_q = sqrt(N! / prod_j q_j!) M^(-N/2); the squared moduli are the
    uniform multinomial weights.
    """
    logw = gammaln(basis.N + 1) - gammaln(basis.configs + 1).sum(axis=1)
    logw -= basis.N * math.log(basis.M)
    return np.exp(0.5 * logw).astype(complex)


def alpha_of(
    q, params: CavityParams, modes: ModeFunctions, K: int, u11: float | None = None
) -> complex:
    """Steady-state cavity amplitude attached to one configuration.

    ``u11`` pins the dispersive-shift coefficient; the default uses the
    physical ``params.U11``.  Pinning it to 0 realizes the idealized
    in-phase regime where the amplitude is exactly proportional to the
    illuminated atom number (the regime the reduced engines assume).
    """
    prod = modes.site_products()[:K]
    D10 = complex(np.sum(prod * np.asarray(q)[:K]))
    u1 = modes.u1[:K]
    D11 = complex(np.sum(np.conj(u1) * u1 * np.asarray(q)[:K]))
    if u11 is None:
        u11 = params.U11
    num = params.eta - 1j * params.U10 * params.a0 * D10
    den = 1j * (u11 * D11 - params.delta_p) + params.kappa
    return num / den


def phi_of(q, alpha_q: complex, params: CavityParams, modes: ModeFunctions,
           K: int, t: float) -> complex:
    """Accumulated complex exponent of one branch over a no-count interval."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got t={t}")
    prod = modes.site_products()[:K]
    D10 = complex(np.sum(prod * np.asarray(q)[:K]))
    drive = params.eta * np.conj(alpha_q) - 1j * params.U10 * params.a0 * D10 * np.conj(alpha_q)
    return -abs(alpha_q) ** 2 * params.kappa * t + (drive - np.conj(drive)) * t / 2.0


@dataclass
class ConditionalSuperposition:
    """Conditional light-matter state over a configuration basis.

    ``c0`` are the initial matter amplitudes, ``alpha`` the per-branch
    coherent amplitudes (constant in time under fixed drive), and
    ``gamma_log`` the accumulated complex exponent (m log alpha_q plus the
    no-count exponents).  The physical amplitude of branch q is
    c0_q exp(gamma_log_q) up to one global normalization.
    """

    basis: ConfigurationBasis
    c0: np.ndarray
    alpha: np.ndarray
    modes: ModeFunctions | None = None
    params: CavityParams | None = None
    K: int = 0
    gamma_log: np.ndarray | None = None
    m: int = 0
    t: float = 0.0

    def __post_init__(self):
        self.c0 = np.asarray(self.c0, dtype=complex)
        self.alpha = np.asarray(self.alpha, dtype=complex)
        n = len(self.basis)
        if self.c0.shape != (n,) or self.alpha.shape != (n,):
            raise ValueError("amplitude arrays must match the basis size")
        if self.gamma_log is None:
            self.gamma_log = np.zeros(n, dtype=complex)
        if self._log_norm() == -np.inf:
            raise ValueError("state has no weight anywhere")

    @classmethod
    def superfluid(
        cls,
        basis: ConfigurationBasis,
        params: CavityParams,
        modes: ModeFunctions,
        K: int,
        u11: float | None = None,
    ) -> "ConditionalSuperposition":
        """Superfluid initial state with drive-determined branch amplitudes.

        ``u11`` optionally pins the dispersive-shift coefficient (see
        :func:`alpha_of`); the amplitudes stay frozen afterwards.
        """
        alpha = np.array(
            [alpha_of(q, params, modes, K, u11) for q in basis.configs],
            dtype=complex,
        )
        return cls(
            basis=basis,
            c0=superfluid_amplitudes(basis),
            alpha=alpha,
            modes=modes,
            params=params,
            K=K,
        )

    # -- weights ---------------------------------------------------------

    def _log_weights(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            log_c0 = np.log(np.abs(self.c0))
        return 2.0 * (log_c0 + np.real(self.gamma_log))

    def _log_norm(self) -> float:
        return float(logsumexp(self._log_weights()))

    def probabilities(self) -> np.ndarray:
        logw = self._log_weights()
        return np.exp(logw - logsumexp(logw))

    def amplitudes(self) -> np.ndarray:
        """Normalized complex branch amplitudes (sum |c|^2 = 1)."""
        shift = np.max(np.real(self.gamma_log))
        raw = self.c0 * np.exp(self.gamma_log - shift)
        norm = np.sqrt(np.sum(np.abs(raw) ** 2))
        return raw / norm

    # -- dynamics --------------------------------------------------------

    def apply_jump(self) -> "ConditionalSuperposition":
        """Photocount: every branch picks up its own coherent amplitude."""
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = self.gamma_log + np.log(self.alpha)
            log_c0 = np.log(np.abs(self.c0))
        logw = 2.0 * (log_c0 + np.real(gamma))
        logw[np.isnan(logw)] = -np.inf
        if logsumexp(logw) == -np.inf:
            raise CountContradictionError(
                "photocount applied to a state with no scattering branch"
            )
        return replace(self, gamma_log=gamma, m=self.m + 1)

    def evolve_no_count(self, dt: float) -> "ConditionalSuperposition":
        """No-count interval: each branch accumulates its complex exponent."""
        if dt < 0:
            raise ValueError(f"interval must be nonnegative, got dt={dt}")
        if self.params is None or self.modes is None:
            raise ValueError(
                "state carries no drive parameters; build it via superfluid() "
                "(or supply modes/params) before evolving"
            )
        drive = (
            self.params.eta * np.conj(self.alpha)
            - 1j * self.params.U10 * self.params.a0 * self._D10 * np.conj(self.alpha)
        )
        phi = (
            -np.abs(self.alpha) ** 2 * self.params.kappa * dt
            + (drive - np.conj(drive)) * dt / 2.0
        )
        return replace(self, gamma_log=self.gamma_log + phi, t=self.t + dt)

    @property
    def _D10(self) -> np.ndarray:
        prod = self.modes.site_products()[: self.K]
        return self.basis.configs[:, : self.K] @ prod

    def photon_expectation(self) -> float:
        """Conditional cavity photon number sum_q p_q |alpha_q|^2."""
        return float(self.probabilities() @ np.abs(self.alpha) ** 2)

    # -- reductions ------------------------------------------------------

    def reduce_to_z(self, mode: str) -> AtomNumberDistribution:
        """Marginal over the mode's statistical variable z.

        Region mode: z is the atom number on the illuminated sites 1..K.
        Difference mode: z is the signed alternating site sum over all
        sites (even-site minus odd-site atom number).
        """
        if mode == MODE_MAXIMUM:
            zvals = self.basis.configs[:, : self.K].sum(axis=1)
        elif mode == MODE_MINIMUM:
            signs = np.array([(-1) ** j for j in range(1, self.basis.M + 1)])
            zvals = self.basis.configs @ signs
        else:
            raise ValueError(f"unknown mode {mode!r}")
        logw = self._log_weights()
        support = np.unique(zvals)
        grouped = np.array(
            [logsumexp(logw[zvals == z]) for z in support]
        )
        return AtomNumberDistribution(support, grouped, mode)

    def atomic_density_matrix(self) -> np.ndarray:
        """Matter density matrix after tracing out the light.

        rho_{qq'} = c_q c_q'* exp(-|a_q|^2/2 - |a_q'|^2/2 + a_q a_q'*)
        with normalized branch amplitudes c; the exponential factor is the
        coherent-state overlap <alpha_q' | alpha_q>.
        """
        c = self.amplitudes()
        a = self.alpha
        a2 = np.abs(a) ** 2
        overlap = np.exp(
            -0.5 * a2[:, None] - 0.5 * a2[None, :] + a[:, None] * np.conj(a)[None, :]
        )
        return np.outer(c, np.conj(c)) * overlap


def density_matrix_to_json(rho: np.ndarray, path, labels=None) -> None:
    """Serialize a dense complex density matrix to JSON.

    Entries are written as [real, imag] pairs; ``labels`` optionally names
    the basis states (e.g. the occupation tuples).  Meant for the small
    referee bases only.
    """
    import json

    rho = np.asarray(rho, dtype=complex)
    payload = {
        "dimension": int(rho.shape[0]),
        "labels": [list(map(int, l)) for l in labels] if labels is not None else None,
        "entries": [
            [[float(x.real), float(x.imag)] for x in row] for row in rho
        ],
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def density_matrix_from_json(path) -> np.ndarray:
    import json

    with open(path) as fh:
        payload = json.load(fh)
    return np.array(
        [[complex(re, im) for re, im in row] for row in payload["entries"]]
    )


def run_trajectory_full(
    state: ConditionalSuperposition,
    scales,
    tau_max: float,
    dtau: float,
    seed=0,
    prob_cap: float = 0.1,
    record_steps: bool = True,
) -> tuple[TrajectoryRecord, ConditionalSuperposition]:
    """Trajectory loop on the full state, clocked in dimensionless tau.

    ``scales`` provides tau_rate = 2 |C|^2 kappa to convert tau steps to
    wall time for the no-count exponents.
    """
    if scales.tau_rate <= 0:
        raise ValueError("tau_rate must be positive to clock the full engine")
    rng = as_generator(seed)
    tau = 0.0
    m0 = state.m
    jump_times, taus, ms, pes = [], [], [], []
    tiny = 1e-12 * max(tau_max, dtau)
    while tau < tau_max - tiny:
        pe = state.photon_expectation()
        # dimensionless step probability: 2 kappa <adag a> dt = pe * dtau / |C|^2
        prob_unit = pe * 2.0 * state.params.kappa / scales.tau_rate
        dtau_step = min(dtau, tau_max - tau)
        while prob_unit * dtau > prob_cap:
            dtau *= 0.5
            dtau_step = min(dtau, tau_max - tau)
        P = prob_unit * dtau_step
        epsilon = rng.random()
        if record_steps:
            taus.append(tau)
            ms.append(state.m - m0)
            pes.append(pe)
        if P > epsilon:
            state = state.apply_jump()
            jump_times.append(tau)
        state = state.evolve_no_count(dtau_step / scales.tau_rate)
        tau += dtau_step
    if record_steps:
        taus.append(tau)
        ms.append(state.m - m0)
        pes.append(state.photon_expectation())
    record = TrajectoryRecord(
        seed=-1 if isinstance(seed, np.random.Generator) else int(seed),
        index=-1,
        engine="full",
        taus=np.asarray(taus),
        ms=np.asarray(ms, dtype=np.int64),
        photon_expectations=np.asarray(pes),
        jump_times=np.asarray(jump_times),
        final_m=state.m - m0,
        final_tau=tau,
        snapshots=[],
        final_dist=None,
    )
    return record, state
