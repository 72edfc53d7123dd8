"""Photocount-conditioned dynamics of an ultracold lattice gas in a cavity.

Light scattered by the atoms into a damped cavity mode is entangled with
the atomic configuration, so detecting the leaked photons steers the
many-body state.  This package simulates that conditional dynamics over
the measured atom-number variable z:

* :mod:`cavitybec.exact_engine` -- exact discrete quantum-trajectory
  engine over z (weights z^(2m) e^(-z^2 tau) p0(z) in log domain);
* :mod:`cavitybec.gaussian_engine` -- closed-form engine for macroscopic
  Gaussian initial states, needing only the pair (m, tau) per step;
* :mod:`cavitybec.full_engine` -- configuration-basis referee carrying
  the full entangled light-matter state on small lattices;
* :mod:`cavitybec.purity` -- two-branch superposition states and the
  purity left after tracing out the light;
* :mod:`cavitybec.oracles` / :mod:`cavitybec.verify` -- independent
  brute-force routes validating every closed form;
* :mod:`cavitybec.ensemble` / :mod:`cavitybec.cli` -- seeded, worker-safe
  ensemble execution with deterministic file outputs.
"""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402,F401
    MODE_MAXIMUM,
    MODE_MINIMUM,
    AtomNumberDistribution,
    GaussianSpec,
    binomial_maximum,
    binomial_minimum,
    discretized_gaussian,
    gaussian_of,
    moment,
)
from .errors import ConfigError, CountContradictionError, StepSizeError  # noqa: F401
from .exact_engine import (  # noqa: F401
    ExactEngineState,
    apply_count,
    apply_no_count,
    conditional_distribution,
    photon_expectation,
    run_trajectory,
    step,
)
from .gaussian_engine import (  # noqa: F401
    GaussianEngineState,
    TiltedGaussianParams,
    conditional_moment_analytic,
    next_count_prob,
    next_count_prob_max,
    next_count_prob_min,
    run_trajectory_analytic,
)
from .full_engine import (  # noqa: F401
    ConfigurationBasis,
    ConditionalSuperposition,
    alpha_of,
    phi_of,
    run_trajectory_full,
)
from .model import (  # noqa: F401
    CavityParams,
    LatticeGeometry,
    ModeFunctions,
    ScatteringScales,
    coupling_D,
    derive_C,
    tau_of_t,
)
from .purity import (  # noqa: F401
    CatState,
    cat_density_matrix,
    coherent_overlap_factor,
    distinguishability_ok,
    purity,
    purity_general,
    threshold_purity,
)
from .records import TrajectoryRecord, trajectory_rng  # noqa: F401
