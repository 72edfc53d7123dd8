"""Two-branch macroscopic superposition states and their light-traced purity.

After the measurement collapses the atom number onto two values z1, z2,
the joint state is (|z1>|alpha e^(i phi)> + |z2>|alpha e^(-i phi)>)/sqrt(2)
up to branch phases: two Fock states, each tagged by a coherent light
state of common modulus and opposite phase.  Tracing out the light (no
further detection) leaves a 2x2 matter density matrix whose off-diagonal
element is suppressed by the coherent-state overlap, giving

    purity = 1/2 (1 + exp(-4 |alpha|^2 sin^2 phi)).

The branches are optically distinguishable (quadrature uncertainty 1/2)
once |alpha| sin(phi) > 1/4; at that threshold the purity is
(1 + e^(-1/4))/2 ~ 0.889.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

#: quadrature-resolution threshold on |alpha| sin(phi)
DISTINGUISHABILITY_THRESHOLD = 0.25


@dataclass(frozen=True)
class CatState:
    """Equal-weight superposition of two atom numbers with opposite-phase light.

    ``alpha_abs`` is the common modulus of the branch light amplitudes,
    ``phi`` half their phase difference, ``gamma`` the matter branch phase.
    """

    z1: int
    z2: int
    alpha_abs: float
    phi: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.alpha_abs < 0:
            raise ValueError(f"|alpha| must be nonnegative, got {self.alpha_abs}")


def coherent_overlap_factor(alpha_abs: float, phi: float) -> complex:
    """Overlap <alpha e^(i phi) | alpha e^(-i phi)> = exp(|alpha|^2 (e^(-2i phi) - 1)).

    Equals the photon-Fock-basis series sum_n |alpha|^(2n)/n! e^(-|alpha|^2)
    e^(-2 i n phi); modulus exp(-2 |alpha|^2 sin^2 phi) <= 1.
    """
    if alpha_abs < 0:
        raise ValueError(f"|alpha| must be nonnegative, got {alpha_abs}")
    return cmath.exp(alpha_abs**2 * (cmath.exp(-2j * phi) - 1.0))


def cat_density_matrix(cat: CatState) -> np.ndarray:
    """Matter density matrix over {|z1>, |z2>} after tracing out the light."""
    off = 0.5 * cmath.exp(cat.alpha_abs**2 * (cmath.exp(2j * cat.phi) - 1.0)) * cmath.exp(
        2j * cat.gamma
    )
    return np.array([[0.5, off], [np.conj(off), 0.5]], dtype=complex)


def purity(cat: CatState) -> float:
    """Tr(rho^2) of the light-traced two-branch state, in [1/2, 1]."""
    return 0.5 * (1.0 + math.exp(-4.0 * cat.alpha_abs**2 * math.sin(cat.phi) ** 2))


def distinguishability_ok(cat: CatState) -> bool:
    """Whether the two light branches are resolvable: |alpha| |sin phi| > 1/4.

    Strict inequality; sin^2 is pi-periodic so any phase convention works.
    """
    return cat.alpha_abs * abs(math.sin(cat.phi)) > DISTINGUISHABILITY_THRESHOLD


def purity_general(rho: np.ndarray, tol: float = 1e-9) -> float:
    """Tr(rho^2) for a general density matrix.

    Validates hermiticity and unit trace within ``tol``.  The floor is
    1/d for the d-dimensional maximally mixed state (1/2 only in the
    two-branch case).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError(f"density matrix trace {np.trace(rho)} is not 1")
    return float(np.sum(np.abs(rho) ** 2))


def threshold_purity() -> float:
    """Purity exactly at the distinguishability threshold: (1 + e^(-1/4))/2."""
    return 0.5 * (1.0 + math.exp(-0.25))


def purity_sweep(alpha_values, phi_values) -> list[tuple[float, float, float]]:
    """(|alpha|, phi, purity) table over a parameter grid.

    Rows where |alpha| sin(phi) crosses the distinguishability threshold
    are included explicitly (phi = arcsin(1/(4|alpha|)) where reachable),
    so the table always contains the threshold purity ~ 0.889.
    """
    rows = []
    for a in alpha_values:
        for phi in phi_values:
            rows.append((float(a), float(phi), purity(CatState(0, 1, a, phi))))
        if a * 1.0 >= DISTINGUISHABILITY_THRESHOLD and a > 0:
            phi_star = math.asin(DISTINGUISHABILITY_THRESHOLD / a)
            rows.append((float(a), phi_star, purity(CatState(0, 1, a, phi_star))))
    rows.sort()
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("alpha_abs,phi,purity\n")
        for a, phi, p in rows:
            fh.write(f"{a!r},{phi!r},{p!r}\n")
