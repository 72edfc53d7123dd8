"""Physical parameters, mode functions and configuration-coupling sums.

Everything here is immutable after construction and shared by all engines.
Frequencies are expressed in units of the cavity decay rate (``kappa = 1``
is the conventional choice); only ratios enter the observables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeGeometry:
    """Atom and site counts of the illuminated lattice.

    Parameters
    ----------
    N : int
        Total atom number, >= 1.
    M : int
        Total number of lattice sites, >= 1.
    K : int
        Number of illuminated sites (the region the probe addresses),
        1 <= K <= M.  The illuminated region is sites ``1..K``.
    Q : int, optional
        Number of sites carrying one sign of the alternating mode product
        in the difference geometry.  Defaults to ``M // 2``; for even M
        this is the only supported value.
    """

    N: int
    M: int
    K: int
    Q: int = -1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"need at least one atom, got N={self.N}")
        if self.M < 1:
            raise ValueError(f"need at least one site, got M={self.M}")
        if not 1 <= self.K <= self.M:
            raise ValueError(f"illuminated sites K={self.K} outside 1..M={self.M}")
        if self.Q == -1:
            object.__setattr__(self, "Q", self.M // 2)
        if self.Q > self.M:
            raise ValueError(f"Q={self.Q} exceeds M={self.M}")

    @property
    def fill_fraction(self) -> float:
        """Illuminated fraction K/M."""
        return self.K / self.M


@dataclass(frozen=True)
class CavityParams:
    """Couplings, detunings, decay and drive amplitudes of the cavity mode.

    ``g0`` and ``g1`` are the atom-light coupling constants of the probe
    and cavity modes, ``delta_a`` the cavity-atom detuning, ``delta_p``
    the probe-cavity detuning, ``kappa`` the cavity decay rate, ``eta``
    the amplitude of the probe injected through the mirror and ``a0`` the
    transverse probe amplitude.  Dispersive shifts are ``U(l, m) =
    g_l * g_m / delta_a``, so ``delta_a`` must be nonzero.
    """

    g0: float
    g1: float
    delta_a: float
    delta_p: float
    kappa: float = 1.0
    eta: float = 0.0
    a0: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError(f"cavity decay rate must be positive, got kappa={self.kappa}")
        if self.delta_a == 0:
            raise ValueError("delta_a = 0 makes the dispersive coupling U divergent")

    def U(self, l: int, m: int) -> float:
        """Dispersive coupling U_lm = g_l g_m / delta_a for l, m in {0, 1}."""
        g = (self.g0, self.g1)
        return g[l] * g[m] / self.delta_a

    @property
    def U10(self) -> float:
        return self.U(1, 0)

    @property
    def U11(self) -> float:
        return self.U(1, 1)


@dataclass(frozen=True)
class ModeFunctions:
    """Per-site complex values of the probe (u0) and cavity (u1) modes."""

    u0: np.ndarray
    u1: np.ndarray

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=complex)
        u1 = np.asarray(self.u1, dtype=complex)
        if u0.shape != u1.shape or u0.ndim != 1:
            raise ValueError("mode arrays must be 1-d and equally long")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "u1", u1)

    def __len__(self) -> int:
        return len(self.u0)

    @classmethod
    def diffraction_maximum(cls, M: int) -> "ModeFunctions":
        """All illuminated sites scatter in phase: u0* u1 = 1 everywhere."""
        ones = np.ones(M, dtype=complex)
        return cls(ones, ones.copy())

    @classmethod
    def diffraction_minimum(cls, M: int) -> "ModeFunctions":
        """Alternating-sign geometry: u0* u1 = (-1)^j with sites j = 1..M."""
        signs = np.array([(-1.0) ** j for j in range(1, M + 1)], dtype=complex)
        return cls(np.ones(M, dtype=complex), signs)

    def site_products(self) -> np.ndarray:
        """The per-site products u0*(r_j) u1(r_j)."""
        return np.conj(self.u0) * self.u1


def derive_C(params: CavityParams) -> complex:
    """Scattering coefficient of the probe into the damped cavity mode.

    This is the steady-state cavity amplitude per unit source strength,
    ``C = i U10 a0 / (i delta_p - kappa)``; the amplitude attached to a
    configuration scattering with strength z is then ``C * z`` in the
    in-phase geometry.
    """
    U10 = params.U(1, 0)
    return 1j * U10 * params.a0 / (1j * params.delta_p - params.kappa)


@dataclass(frozen=True)
class ScatteringScales:
    """The complex scattering coefficient and the dimensionless clock.

    ``tau_rate`` is d(tau)/dt = 2 |C|^2 kappa, the rate at which the
    dimensionless measurement time accumulates.
    """

    C: complex
    kappa: float
    tau_rate: float = field(init=False)

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        object.__setattr__(self, "tau_rate", 2.0 * abs(self.C) ** 2 * self.kappa)

    @classmethod
    def from_params(cls, params: CavityParams) -> "ScatteringScales":
        return cls(derive_C(params), params.kappa)


def tau_of_t(t: float, scales: ScatteringScales) -> float:
    """Dimensionless measurement time tau = 2 |C|^2 kappa t."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got t={t}")
    return scales.tau_rate * t


def coupling_D(q, modes: ModeFunctions, l: int, m: int, K: int) -> complex:
    """Configuration-coupling sum over the illuminated region.

    Sums ``u_l*(r_j) u_m(r_j) q_j`` over the first K sites, where ``q``
    holds the atom number per site.  For the in-phase geometry with unit
    mode products this is just the atom number inside the illuminated
    region; for the alternating geometry it is the signed site sum.
    """
    q = np.asarray(q)
    if len(q) != len(modes):
        raise ValueError(f"configuration has {len(q)} sites, modes have {len(modes)}")
    if not 0 <= K <= len(q):
        raise ValueError(f"K={K} outside 0..{len(q)}")
    ul = (modes.u0, modes.u1)[l]
    um = (modes.u0, modes.u1)[m]
    return complex(np.sum(np.conj(ul[:K]) * um[:K] * q[:K]))
