"""Probabilistic particle solver for the 1-D fast diffusion equation.

The PDE du/dt = d²(u^m)/dx² with 0 < m < 1 is represented by the law of a
zero-drift diffusion whose coefficient is a power of its own one-dimensional
density.  The package provides:

* :mod:`fastdiff.exact` — the closed-form self-similar solution, its
  constants, sampling, and reduced space-time integrals;
* :mod:`fastdiff.rng` — counter-based, step-indexed noise streams;
* :mod:`fastdiff.engine` — the Euler–Maruyama particle stepper;
* :mod:`fastdiff.kde` — truncated-Gaussian density estimation on grids;
* :mod:`fastdiff.mckean` — the self-consistent (estimate-as-coefficient)
  solver with floor and envelope-cap regularization;
* :mod:`fastdiff.analysis` — integrability verdicts, the small-time density
  concentration experiment, and initial-trace checks;
* :mod:`fastdiff.cli` — the ``fastdiff`` command: configured runs producing
  reproducible artifact directories, plus offline verification.
"""

__version__ = "0.1.0"

from .analysis import (
    GAMMA_CATALOG,
    DensityBoundFit,
    HypothesisReport,
    check_hypothesis_b2,
    fit_density_bound,
    initial_trace_test,
)
from .engine import (
    CoefficientSpec,
    NumericsError,
    ParticleCloud,
    SdeRun,
    euler_step,
    run_oracle_sde,
    run_point_start_sde,
)
from .exact import (
    FastDiffusionParams,
    SpaceTimeGrid,
    abar_coefficient,
    barenblatt_density,
    derive_params,
    diagnostic_integrals,
    diffusion_coefficient_phi,
    fourth_moment,
    mass_quadrature,
    sample_barenblatt,
    shifted_density,
    test_function_integral,
)
from .kde import BandwidthRule, DensityField, estimate_density, evaluate_density_at
from .mckean import (
    ErrorRecord,
    MassLeakError,
    McKeanConfig,
    McKeanRun,
    McKeanSnapshot,
    compare_to_exact,
    fokker_planck_residual,
    solve_mckean,
)

__all__ = [
    "__version__",
    "FastDiffusionParams",
    "SpaceTimeGrid",
    "derive_params",
    "barenblatt_density",
    "shifted_density",
    "diffusion_coefficient_phi",
    "abar_coefficient",
    "sample_barenblatt",
    "diagnostic_integrals",
    "fourth_moment",
    "test_function_integral",
    "mass_quadrature",
    "ParticleCloud",
    "CoefficientSpec",
    "SdeRun",
    "NumericsError",
    "euler_step",
    "run_oracle_sde",
    "run_point_start_sde",
    "BandwidthRule",
    "DensityField",
    "estimate_density",
    "evaluate_density_at",
    "McKeanConfig",
    "McKeanRun",
    "McKeanSnapshot",
    "ErrorRecord",
    "MassLeakError",
    "solve_mckean",
    "compare_to_exact",
    "fokker_planck_residual",
    "HypothesisReport",
    "DensityBoundFit",
    "check_hypothesis_b2",
    "fit_density_bound",
    "initial_trace_test",
    "GAMMA_CATALOG",
]
