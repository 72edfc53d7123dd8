"""Atom-number distributions of the superfluid initial state.

The measured statistical variable z is either the atom number inside the
illuminated region (in-phase, "maximum" geometry, 0 <= z <= N) or the
odd-even atom number difference (alternating, "minimum" geometry,
-N <= z <= N stepping by 2).  Both start binomial for a superfluid and
become Gaussian in the large-N limit.

All weights live in log domain so that factors like ``z^(2m) e^(-z^2 tau)``
spanning hundreds of orders of magnitude never underflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp
from scipy.stats import binom

from .model import LatticeGeometry

MODE_MINIMUM = "minimum"
MODE_MAXIMUM = "maximum"


@dataclass
class AtomNumberDistribution:
    """Discrete distribution over z with log-domain weights.

    ``support`` is strictly increasing; ``log_weights`` are aligned
    log-probabilities (normalized so that sum(exp(log_weights)) == 1).
    """

    support: np.ndarray
    log_weights: np.ndarray
    mode: str = MODE_MAXIMUM
    _normalized: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.log_weights = np.asarray(self.log_weights, dtype=float)
        if self.support.shape != self.log_weights.shape:
            raise ValueError("support and log_weights must be aligned")
        if self.support.size == 0:
            raise ValueError("empty support")
        if np.any(np.diff(self.support) <= 0):
            raise ValueError("support must be strictly increasing")
        if not self._normalized:
            self.normalize()

    def normalize(self) -> "AtomNumberDistribution":
        """Rescale weights in place so the probabilities sum to one."""
        total = logsumexp(self.log_weights)
        if total == -np.inf:
            raise ValueError("all weights vanished; nothing to normalize")
        self.log_weights = self.log_weights - total
        self._normalized = True
        return self

    def copy(self) -> "AtomNumberDistribution":
        return AtomNumberDistribution(
            self.support.copy(), self.log_weights.copy(), self.mode, _normalized=True
        )

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def prune(self, log_cut: float = 400.0) -> "AtomNumberDistribution":
        """Drop support points more than ``log_cut`` below the peak weight.

        exp(-400) ~ 1e-174, far below double precision resolution of the
        retained probabilities, so results are unaffected.
        """
        keep = self.log_weights >= self.log_weights.max() - log_cut
        if keep.all():
            return self
        return AtomNumberDistribution(
            self.support[keep], self.log_weights[keep], self.mode
        )

    def to_csv(self, path) -> None:
        """Write columns ``z, probability`` (LF endings, '.' decimals)."""
        p = self.probabilities
        with open(path, "w", newline="\n") as fh:
            fh.write("z,probability\n")
            for z, pz in zip(self.support, p):
                fh.write(f"{int(z)},{float(pz)!r}\n")


@dataclass(frozen=True)
class GaussianSpec:
    """Mean and width of the large-N Gaussian limit of the initial state."""

    z0: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def variance(self) -> float:
        return self.sigma**2


def binomial_minimum(geom: LatticeGeometry) -> AtomNumberDistribution:
    """Superfluid distribution of the odd-even atom number difference.

    Each atom sits on one sign class with probability Q/M; the difference
    z = 2*ztilde - N then runs over -N..N in steps of two, binomially
    weighted.  Only even M (Q = M/2) is supported.
    """
    if geom.M % 2 != 0:
        raise ValueError(f"difference geometry needs an even site count, got M={geom.M}")
    if geom.Q != geom.M // 2:
        raise ValueError(f"difference geometry needs Q = M/2, got Q={geom.Q}, M={geom.M}")
    ztilde = np.arange(geom.N + 1)
    logw = binom.logpmf(ztilde, geom.N, geom.Q / geom.M)
    z = 2 * ztilde - geom.N
    return AtomNumberDistribution(z, logw, MODE_MINIMUM)


def binomial_maximum(geom: LatticeGeometry) -> AtomNumberDistribution:
    """Superfluid distribution of the atom number in the illuminated region.

    z ~ Binomial(N, K/M) on 0..N.
    """
    z = np.arange(geom.N + 1)
    logw = binom.logpmf(z, geom.N, geom.K / geom.M)
    return AtomNumberDistribution(z, logw, MODE_MAXIMUM)


def gaussian_of(
    mode: str, geom: LatticeGeometry, min_atoms: int = 50
) -> GaussianSpec:
    """Gaussian parameters approximating the binomial initial state.

    Valid for large atom number; ``min_atoms`` guards against using the
    approximation far outside its regime.  The in-phase geometry with
    K = M is rejected: all atoms are illuminated, the atom number does
    not fluctuate and the Gaussian degenerates.
    """
    if geom.N < min_atoms:
        raise ValueError(
            f"Gaussian limit needs a large atom number (N >= {min_atoms}), got N={geom.N}"
        )
    if mode == MODE_MINIMUM:
        return GaussianSpec(0.0, float(np.sqrt(geom.N)))
    if mode == MODE_MAXIMUM:
        f = geom.fill_fraction
        if geom.K == geom.M:
            raise ValueError(
                "K = M leaves no atom-number fluctuations; "
                "the Gaussian engine does not apply (use the exact engine)"
            )
        return GaussianSpec(geom.N * f, float(np.sqrt(geom.N * f * (1.0 - f))))
    raise ValueError(f"unknown mode {mode!r}")


def discretized_gaussian(
    spec: GaussianSpec, mode: str, N: int
) -> AtomNumberDistribution:
    """Gaussian weights sampled on the integer grid of the given mode.

    Used to compare the parametric Gaussian against the exact discrete
    representation (the grid keeps the parity/stride of the binomial).
    """
    if mode == MODE_MINIMUM:
        z = 2 * np.arange(N + 1) - N
    elif mode == MODE_MAXIMUM:
        z = np.arange(N + 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    logw = -((z - spec.z0) ** 2) / (2.0 * spec.variance)
    return AtomNumberDistribution(z, logw, mode)


def moment(dist: AtomNumberDistribution, order: int) -> float:
    """Raw moment sum_z z^order p(z) of a normalized distribution."""
    p = dist.probabilities
    return float(p @ (dist.support.astype(float) ** order))


def total_variation(a: AtomNumberDistribution, b: AtomNumberDistribution) -> float:
    """Total-variation distance between two distributions over z.

    Supports need not coincide; missing points count with probability 0.
    """
    za = dict(zip(a.support.tolist(), a.probabilities.tolist()))
    zb = dict(zip(b.support.tolist(), b.probabilities.tolist()))
    keys = set(za) | set(zb)
    return 0.5 * sum(abs(za.get(k, 0.0) - zb.get(k, 0.0)) for k in keys)
