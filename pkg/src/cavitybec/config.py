"""Run configuration: YAML ingestion, validation, engine applicability.

A run is described by one human-editable YAML file with nested sections
(`geometry`, `cavity`, `run`); every field can be overridden from the
command line.  Numbers are parsed as plain decimals, no locale anywhere.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from .distributions import MODE_MAXIMUM, MODE_MINIMUM
from .errors import ConfigError
from .full_engine import BASIS_CAP, count_configurations
from .model import CavityParams, LatticeGeometry

ENGINES = ("exact", "gaussian", "full")

#: minimum atom number for the Gaussian engine (large-N regime guard)
GAUSSIAN_MIN_ATOMS = 50


@dataclass
class RunConfig:
    """Validated description of one ensemble run.

    The cavity defaults below are illustrative placeholders only -- the
    physics fixes no particular values, so real runs should set them
    explicitly in the config file.
    """

    mode: str = MODE_MINIMUM
    engine: str = "exact"
    N: int = 100
    M: int = 2
    K: int = 2
    Q: int = -1
    g0: float = 1.0
    g1: float = 1.0
    delta_a: float = 1000.0
    delta_p: float = 0.0
    kappa: float = 1.0
    eta: float = 0.0
    a0: float = 1.0
    tau_max: float = 1.0
    dtau: float = 1e-3
    master_seed: int = 0
    trajectories: int = 1
    snapshot_every: int = 0
    output_dir: str = "runs/out"
    workers: int = 1

    def geometry(self) -> LatticeGeometry:
        return LatticeGeometry(N=self.N, M=self.M, K=self.K, Q=self.Q)

    def cavity(self) -> CavityParams:
        return CavityParams(
            g0=self.g0,
            g1=self.g1,
            delta_a=self.delta_a,
            delta_p=self.delta_p,
            kappa=self.kappa,
            eta=self.eta,
            a0=self.a0,
        )

    def validate(self) -> "RunConfig":
        if self.mode not in (MODE_MINIMUM, MODE_MAXIMUM):
            raise ConfigError(f"mode must be minimum or maximum, got {self.mode!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        try:
            geom = self.geometry()
            self.cavity()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.mode == MODE_MINIMUM:
            if self.K != self.M:
                raise ConfigError(
                    f"difference mode illuminates the whole lattice: K={self.K} != M={self.M}"
                )
            if self.M % 2 != 0:
                raise ConfigError(f"difference mode needs even M, got M={self.M}")
            if geom.Q != self.M // 2:
                raise ConfigError(
                    f"difference mode needs Q = M/2, got Q={geom.Q}, M={self.M}"
                )
        if self.engine == "gaussian":
            if self.mode == MODE_MAXIMUM and self.K >= self.M:
                raise ConfigError(
                    "gaussian engine in region mode needs K < M "
                    "(K = M has no atom-number fluctuations)"
                )
            if self.N < GAUSSIAN_MIN_ATOMS:
                raise ConfigError(
                    f"gaussian engine needs N >= {GAUSSIAN_MIN_ATOMS}, got N={self.N}"
                )
        if self.engine == "full":
            n_cfg = count_configurations(self.N, self.M)
            if n_cfg > BASIS_CAP:
                raise ConfigError(
                    f"full engine basis {n_cfg} exceeds cap {BASIS_CAP} (N={self.N}, M={self.M})"
                )
        if self.tau_max < 0:
            raise ConfigError(f"tau_max must be nonnegative, got {self.tau_max}")
        if self.dtau <= 0:
            raise ConfigError(f"dtau must be positive, got {self.dtau}")
        if self.trajectories < 0:
            raise ConfigError(f"trajectories must be nonnegative, got {self.trajectories}")
        if self.snapshot_every < 0:
            raise ConfigError(f"snapshot_every must be nonnegative, got {self.snapshot_every}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not -(2**63) <= int(self.master_seed) < 2**64:
            raise ConfigError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        return self

    def to_dict(self, physics_only: bool = False) -> dict:
        """Full field dict; ``physics_only`` drops execution-layout fields
        (output location, worker count) that must not leak into outputs."""
        d = asdict(self)
        if physics_only:
            d.pop("output_dir")
            d.pop("workers")
        return d


_SECTIONS = {
    "geometry": ("N", "M", "K", "Q"),
    "cavity": ("g0", "g1", "delta_a", "delta_p", "kappa", "eta", "a0"),
    "run": (
        "tau_max",
        "dtau",
        "master_seed",
        "trajectories",
        "snapshot_every",
        "output_dir",
        "workers",
    ),
}


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from the nested YAML structure."""
    kwargs = {}
    data = dict(data or {})
    for key in ("mode", "engine"):
        if key in data:
            kwargs[key] = data.pop(key)
    for section, keys in _SECTIONS.items():
        block = data.pop(section, {}) or {}
        unknown = set(block) - set(keys)
        if unknown:
            raise ConfigError(f"unknown keys in section {section!r}: {sorted(unknown)}")
        kwargs.update(block)
    if data:
        raise ConfigError(f"unknown top-level config keys: {sorted(data)}")
    try:
        cfg = RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Read a YAML config file and apply flat field overrides."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    cfg = config_from_dict(data)
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config field {key!r}")
            setattr(cfg, key, value)
        cfg.validate()
    return cfg


def write_example_config(path) -> None:
    """Emit a commented starter config (values are illustrative only)."""
    text = """\
# Example run configuration.  The cavity numbers below are illustrative
# placeholders, not measured values; set them for your own setup.
mode: minimum          # minimum (odd-even difference) | maximum (region count)
engine: exact          # exact | gaussian | full
geometry:
  N: 100               # atoms
  M: 2                 # lattice sites
  K: 2                 # illuminated sites (difference mode needs K = M)
cavity:
  g0: 1.0
  g1: 1.0
  delta_a: 1000.0      # cavity-atom detuning (units of kappa)
  delta_p: 0.0         # probe-cavity detuning
  kappa: 1.0
  eta: 0.0             # mirror drive
  a0: 1.0              # transverse probe
run:
  tau_max: 1.0         # dimensionless horizon (tau = 2 |C|^2 kappa t)
  dtau: 0.0005
  master_seed: 20240601
  trajectories: 100
  snapshot_every: 0    # 0 disables distribution snapshots
  output_dir: runs/example
  workers: 1
"""
    Path(path).write_text(text)
