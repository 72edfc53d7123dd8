"""Seeded ensemble execution and ensemble-level statistics.

Trajectories are independent and carry their own Philox stream derived
from (master_seed, index), so outputs are byte-identical for any worker
count.  Workers write per-trajectory files themselves; the manifest is
assembled afterwards in index order with content hashes.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .distributions import (
    MODE_MINIMUM,
    AtomNumberDistribution,
    binomial_maximum,
    binomial_minimum,
    gaussian_of,
)
from .exact_engine import run_trajectory
from .full_engine import ConfigurationBasis, ConditionalSuperposition, run_trajectory_full
from .gaussian_engine import run_trajectory_analytic
from .model import ModeFunctions, ScatteringScales, derive_C
from .records import TrajectoryRecord, trajectory_rng

SEED_DERIVATION = "Philox(SeedSequence(entropy=master_seed, spawn_key=(index,)))"


def run_one(cfg: RunConfig, index: int, record_steps: bool = True) -> TrajectoryRecord:
    """Run trajectory ``index`` of the configured ensemble."""
    rng = trajectory_rng(cfg.master_seed, index)
    geom = cfg.geometry()
    params = cfg.cavity()
    C = derive_C(params)
    if cfg.engine == "exact":
        init = (
            binomial_minimum(geom)
            if cfg.mode == MODE_MINIMUM
            else binomial_maximum(geom)
        )
        rec = run_trajectory(
            init,
            C=C,
            tau_max=cfg.tau_max,
            dtau=cfg.dtau,
            seed=rng,
            snapshot_every=cfg.snapshot_every,
            record_steps=record_steps,
        )
    elif cfg.engine == "gaussian":
        spec = gaussian_of(cfg.mode, geom)
        rec = run_trajectory_analytic(
            spec,
            cfg.mode,
            tau_max=cfg.tau_max,
            dtau=cfg.dtau,
            seed=rng,
            record_steps=record_steps,
            c2=abs(C) ** 2,
        )
    else:
        modes = (
            ModeFunctions.diffraction_minimum(cfg.M)
            if cfg.mode == MODE_MINIMUM
            else ModeFunctions.diffraction_maximum(cfg.M)
        )
        basis = ConfigurationBasis.build(cfg.N, cfg.M)
        state = ConditionalSuperposition.superfluid(basis, params, modes, cfg.K)
        scales = ScatteringScales.from_params(params)
        rec, _ = run_trajectory_full(
            state,
            scales,
            tau_max=cfg.tau_max,
            dtau=cfg.dtau,
            seed=rng,
            record_steps=record_steps,
        )
    rec.seed = int(cfg.master_seed)
    rec.index = index
    rec.params = cfg.to_dict(physics_only=True)
    return rec


def _write_record(rec: TrajectoryRecord, outdir: Path) -> list[str]:
    names = []
    base = f"traj_{rec.index:05d}"
    rec.to_csv(outdir / f"{base}.csv")
    names.append(f"{base}.csv")
    rec.to_json(outdir / f"{base}.json")
    names.append(f"{base}.json")
    for k, (tau, m, dist) in enumerate(rec.snapshots):
        snap_name = f"{base}_snap_{k:03d}.csv"
        with open(outdir / snap_name, "w", newline="\n") as fh:
            fh.write(f"# tau={tau!r} m={m}\n")
            fh.write("z,probability\n")
            for z, pz in zip(dist.support, dist.probabilities):
                fh.write(f"{int(z)},{float(pz)!r}\n")
        names.append(snap_name)
    return names


def _worker(args) -> list[str]:
    cfg_dict, index, outdir = args
    cfg = RunConfig(**cfg_dict)
    rec = run_one(cfg, index)
    return _write_record(rec, Path(outdir))


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def run_ensemble(cfg: RunConfig) -> Path:
    """Execute the configured ensemble and write the output manifest.

    Returns the output directory.  Deterministic for a fixed config and
    master seed regardless of worker count.
    """
    cfg.validate()
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    _warn_strong_scattering(cfg)

    file_names: list[str] = []
    if cfg.trajectories > 0:
        tasks = [
            (cfg.to_dict(), i, str(outdir)) for i in range(cfg.trajectories)
        ]
        if cfg.workers == 1:
            results = [_worker(t) for t in tasks]
        else:
            ctx = get_context("fork")
            with ProcessPoolExecutor(max_workers=cfg.workers, mp_context=ctx) as pool:
                results = list(pool.map(_worker, tasks))
        for names in results:
            file_names.extend(names)

    manifest = {
        "version": __version__,
        "config": cfg.to_dict(physics_only=True),
        "seed_derivation": SEED_DERIVATION,
        "files": [
            {"name": name, "sha256": _sha256(outdir / name)}
            for name in sorted(file_names)
        ],
    }
    with open(outdir / "manifest.json", "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return outdir


def _warn_strong_scattering(cfg: RunConfig) -> None:
    """Flag configurations outside the weak-scattering regime.

    The trajectory rule assumes at most order-one photons in the cavity;
    when the initial conditional photon number |C|^2 <z^2> is large the
    approximations behind the reduced dynamics degrade.
    """
    geom = cfg.geometry()
    C = derive_C(cfg.cavity())
    if cfg.mode == MODE_MINIMUM:
        mom2 = float(geom.N)  # variance of the initial difference
    else:
        f = geom.fill_fraction
        mom2 = (geom.N * f) ** 2 + geom.N * f * (1 - f)
    photon0 = abs(C) ** 2 * mom2
    if photon0 > 1.0:
        print(
            f"warning: initial conditional photon number {photon0:.3g} > 1; "
            "the weak-scattering trajectory rule is outside its regime",
            file=sys.stderr,
        )


# ----------------------------------------------------------------------
# ensemble statistics
# ----------------------------------------------------------------------

@dataclass
class EnsembleStats:
    """Count staircase moments on a common grid plus doublet-peak tracking."""

    tau_grid: np.ndarray
    m_mean: np.ndarray
    m_var: np.ndarray
    n_trajectories: int
    peaks: list  # rows (tau, m, peak_z, sqrt(m/tau))

    def rate_per_tau(self) -> float:
        """Empirical mean count rate dm/dtau over the whole window."""
        if self.tau_grid[-1] == 0:
            return 0.0
        return float(self.m_mean[-1] / self.tau_grid[-1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("tau,m_mean,m_var\n")
            for t, mm, mv in zip(self.tau_grid, self.m_mean, self.m_var):
                fh.write(f"{float(t)!r},{float(mm)!r},{float(mv)!r}\n")

    def peaks_to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("tau,m,peak_z,sqrt_m_over_tau\n")
            for tau, m, peak, pred in self.peaks:
                fh.write(f"{float(tau)!r},{int(m)},{float(peak)!r},{float(pred)!r}\n")


def ensemble_stats(
    records: list[TrajectoryRecord], grid_points: int = 101
) -> EnsembleStats:
    """Mean and variance of m(tau) on a common grid, plus doublet peaks.

    Peaks are extracted from whatever distribution snapshots the records
    carry: for each snapshot with at least one count, the location of the
    positive-z maximum is compared against sqrt(m/tau).
    """
    if not records:
        raise ValueError("need at least one trajectory record")
    tau_end = max(r.final_tau for r in records)
    grid = np.linspace(0.0, tau_end, grid_points)
    m_matrix = np.stack([r.m_at(grid) for r in records]).astype(float)
    peaks = []
    for rec in records:
        for tau, m, dist in rec.snapshots:
            if m < 1 or tau <= 0:
                continue
            pos = dist.support > 0
            if not np.any(pos):
                continue
            zpos = dist.support[pos]
            wpos = dist.log_weights[pos]
            peak = float(zpos[np.argmax(wpos)])
            peaks.append((float(tau), int(m), peak, math.sqrt(m / tau)))
    return EnsembleStats(
        tau_grid=grid,
        m_mean=m_matrix.mean(axis=0),
        m_var=m_matrix.var(axis=0),
        n_trajectories=len(records),
        peaks=peaks,
    )


def load_records(outdir) -> list[TrajectoryRecord]:
    """Rehydrate trajectory records (headers + snapshots) from a run directory."""
    outdir = Path(outdir)
    records = []
    for header in sorted(outdir.glob("traj_*.json")):
        with open(header) as fh:
            meta = json.load(fh)
        jump_times = np.asarray(meta["jump_times"], dtype=float)
        snapshots = []
        for snap in sorted(outdir.glob(header.stem + "_snap_*.csv")):
            with open(snap) as fh:
                first = fh.readline().strip()
                parts = dict(
                    item.split("=") for item in first.lstrip("# ").split(" ")
                )
                tau = float(parts["tau"])
                m = int(parts["m"])
                fh.readline()  # column header
                zs, ps = [], []
                for line in fh:
                    z_str, p_str = line.strip().split(",")
                    zs.append(int(z_str))
                    ps.append(float(p_str))
            with np.errstate(divide="ignore"):
                logw = np.log(np.asarray(ps))
            snapshots.append(
                (tau, m, AtomNumberDistribution(np.asarray(zs), logw))
            )
        records.append(
            TrajectoryRecord(
                seed=meta["seed"],
                index=meta["index"],
                engine=meta["engine"],
                taus=np.empty(0),
                ms=np.empty(0, dtype=np.int64),
                photon_expectations=np.empty(0),
                jump_times=jump_times,
                final_m=meta["final_m"],
                final_tau=meta["final_tau"],
                snapshots=snapshots,
                params=meta.get("params", {}),
            )
        )
    return records
