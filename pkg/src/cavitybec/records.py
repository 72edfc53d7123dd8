"""Trajectory records and their file serialization.

A record stores the (tau, m, photon expectation) series of one seeded
trajectory plus the dimensionless times of the photocounts.  CSV columns
and the JSON sidecar schema are fixed (comma separator, '.' decimal
point, LF endings) so outputs are byte-reproducible across platforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .distributions import AtomNumberDistribution


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Per-trajectory random generator.

    Counter-based Philox (4x64) keyed by
    ``SeedSequence(entropy=master_seed, spawn_key=(index,))`` -- a
    documented, stable hash of (master seed, trajectory index), so
    ensembles are bit-reproducible for any worker count or scheduling.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    """Accept either an integer seed or a ready generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass
class TrajectoryRecord:
    """Time series of one quantum trajectory.

    ``taus``, ``ms`` and ``photon_expectations`` are aligned per-step
    arrays holding the state at the start of each step (plus one closing
    row at the final time); ``jump_times`` holds the tau of every
    photocount, so ``len(jump_times) == final_m``.
    """

    seed: int
    index: int
    engine: str
    taus: np.ndarray
    ms: np.ndarray
    photon_expectations: np.ndarray
    jump_times: np.ndarray
    final_m: int
    final_tau: float
    snapshots: list = field(default_factory=list)  # (tau, m, AtomNumberDistribution)
    final_dist: AtomNumberDistribution | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.jump_times) != self.final_m:
            raise ValueError(
                f"{len(self.jump_times)} jump times recorded for m={self.final_m}"
            )

    def m_at(self, tau_grid: np.ndarray) -> np.ndarray:
        """Photocount staircase m(tau) evaluated on an arbitrary grid.

        A count registered at step start t lands within (t, t + dtau], so
        m(tau) counts jumps with start strictly below tau.
        """
        return np.searchsorted(self.jump_times, tau_grid, side="left")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("tau,m,photon_expectation\n")
            for tau, m, pe in zip(self.taus, self.ms, self.photon_expectations):
                fh.write(f"{float(tau)!r},{int(m)},{float(pe)!r}\n")

    def header_dict(self) -> dict:
        return {
            "engine": self.engine,
            "seed": int(self.seed),
            "index": int(self.index),
            "final_m": int(self.final_m),
            "final_tau": float(self.final_tau),
            "jump_times": [float(t) for t in self.jump_times],
            "params": self.params,
        }

    def to_json(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(self.header_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
