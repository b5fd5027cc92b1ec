"""Self-consistent particle solver: the coefficient is the estimated density.

Each step estimates the one-dimensional density of the cloud by KDE, turns it
into a diffusion coefficient through phi(u) = u^((m-1)/2), and drives the next
Euler–Maruyama step with it.  Two regularizations keep the nonlinearity from
feeding noise back into itself:

* a density floor (phi blows up as u -> 0), and
* a pointwise cap at ``cap_margin`` times the exact envelope
  sqrt(abar(t, x)) of the shifted solution, applied both on the grid and at
  the particle positions, so no particle ever diffuses much faster than the
  solution it approximates.

The cloud starts from exact samples of U(kappa, .), so the target law at
solver time t is U(t + kappa, .) and every error record below compares
against that profile.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import rng
from .engine import CoefficientSpec, ParticleCloud, euler_step
from .exact import (
    FastDiffusionParams,
    SpaceTimeGrid,
    abar_coefficient,
    barenblatt_density,
    shifted_density,
)
from .kde import BandwidthRule, DensityField, estimate_density

__all__ = [
    "MassLeakError",
    "McKeanConfig",
    "ErrorRecord",
    "McKeanSnapshot",
    "McKeanRun",
    "solve_mckean",
    "compare_to_exact",
    "fokker_planck_residual",
]


class MassLeakError(RuntimeError):
    """Too much probability mass left the spatial window."""

    def __init__(self, message: str, step_index: int, mass: float):
        super().__init__(message)
        self.step_index = step_index
        self.mass = mass


@dataclasses.dataclass(frozen=True)
class McKeanConfig:
    """Everything a self-consistent run needs; validated on construction."""

    params: FastDiffusionParams
    n: int
    dt: float
    t_end: float
    grid: SpaceTimeGrid
    bandwidth: BandwidthRule
    kappa: float = 1.0
    density_floor: float | None = None  # None: 1e-4 * peak of the initial profile
    cap_margin: float = 1.2
    refresh_every: int = 1
    error_every: int = 50
    seed: int = 0
    mass_abort: float = 0.9

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 100:
            raise ValueError(f"n must be an integer >= 100, got {self.n!r}")
        if not self.dt > 0.0 or not math.isfinite(self.dt):
            raise ValueError(f"dt must be positive finite, got {self.dt!r}")
        if not self.t_end > 0.0 or not math.isfinite(self.t_end):
            raise ValueError(f"t_end must be positive finite, got {self.t_end!r}")
        if not self.kappa > 0.0 or not math.isfinite(self.kappa):
            raise ValueError(f"kappa must be positive finite, got {self.kappa!r}")
        if self.density_floor is not None and not self.density_floor > 0.0:
            raise ValueError(f"density_floor must be positive, got {self.density_floor!r}")
        if not self.cap_margin > 1.0:
            raise ValueError(f"cap_margin must exceed 1, got {self.cap_margin!r}")
        if not isinstance(self.refresh_every, int) or self.refresh_every < 1:
            raise ValueError(f"refresh_every must be an integer >= 1, got {self.refresh_every!r}")
        if not isinstance(self.error_every, int) or self.error_every < 1:
            raise ValueError(f"error_every must be an integer >= 1, got {self.error_every!r}")
        if not 0.0 < self.mass_abort < 1.0:
            raise ValueError(f"mass_abort must lie in (0, 1), got {self.mass_abort!r}")
        seen: dict[int, float] = {}
        for t in self.grid.t_grid:
            if t > self.t_end + 0.5 * self.dt:
                raise ValueError(f"snapshot time {t} exceeds t_end={self.t_end}")
            k = int(np.rint(t / self.dt))
            if k in seen:
                raise ValueError(
                    f"snapshot times {seen[k]:g} and {t:g} both round to step {k} "
                    f"at dt={self.dt:g}"
                )
            seen[k] = t

    @property
    def steps(self) -> int:
        return int(np.rint(self.t_end / self.dt))

    def resolved_floor(self) -> float:
        if self.density_floor is not None:
            return self.density_floor
        return 1e-4 * barenblatt_density(self.params, self.kappa, 0.0)


@dataclasses.dataclass(frozen=True)
class ErrorRecord:
    """Grid-based discrepancies of one density field against the target profile.

    ``l2`` is the span-normalized trapezoid L² distance
        sqrt( sum_i w_i (u_hat_i - v_i)^2 / (x_max - x_min) ),
    with trapezoid weights w_i, so a constant offset c scores exactly c and
    the number is comparable across windows.  ``mass`` is the trapezoid mass
    of the estimate itself.
    """

    time: float
    l2: float
    linf: float
    mass: float


def compare_to_exact(
    field: DensityField, params: FastDiffusionParams, kappa: float
) -> ErrorRecord:
    """Measure a density field against U(time + kappa, .) on its own grid."""
    xg = field.grid.x
    v = shifted_density(params, field.time, xg, kappa)
    diff = field.values - v
    w = np.full(xg.size, field.grid.dx)
    w[0] *= 0.5
    w[-1] *= 0.5
    span = field.grid.x_max - field.grid.x_min
    l2 = math.sqrt(float(np.sum(w * diff * diff)) / span)
    linf = float(np.max(np.abs(diff)))
    return ErrorRecord(time=field.time, l2=l2, linf=linf, mass=field.mass)


@dataclasses.dataclass(frozen=True)
class McKeanSnapshot:
    """One requested output time: the estimate, the target, and the coefficient."""

    field: DensityField
    exact: np.ndarray
    sigma_grid: np.ndarray  # phi-units coefficient used at this step
    errors: ErrorRecord


@dataclasses.dataclass(frozen=True)
class McKeanRun:
    config: McKeanConfig
    snapshots: tuple[McKeanSnapshot, ...]
    errors: tuple[ErrorRecord, ...]
    floor: float
    cap_fraction_max: float  # worst-step share of grid nodes hit by the envelope cap
    sigma_ratio_max: float  # max over steps of max(sigma_grid / envelope); <= 1 by design
    final_cloud: ParticleCloud


def _sigma_grid(
    cfg: McKeanConfig, field: DensityField, t: float, xg: np.ndarray, floor: float
) -> tuple[np.ndarray, float, float]:
    """Coefficient on the grid: phi(max(u_hat, floor)) capped by the envelope."""
    m = cfg.params.m
    u = np.maximum(field.values, floor)
    raw = u ** ((m - 1.0) / 2.0)
    env = cfg.cap_margin * np.sqrt(abar_coefficient(cfg.params, t, xg, cfg.kappa))
    sig = np.minimum(raw, env)
    capped = float(np.mean(raw > env))
    ratio = float(np.max(sig / env))
    return sig, capped, ratio


def solve_mckean(cfg: McKeanConfig) -> McKeanRun:
    """Run the self-consistent particle scheme described in the module header.

    Raises :class:`MassLeakError` if the trapezoid mass of the estimate on the
    window drops below ``cfg.mass_abort``, and propagates
    :class:`~fastdiff.engine.NumericsError` from the stepper.
    """
    params, grid = cfg.params, cfg.grid
    xg = grid.x
    floor = cfg.resolved_floor()
    total = cfg.steps
    snap_steps: dict[int, float] = {}
    for t in grid.t_grid:
        snap_steps[int(np.rint(t / cfg.dt))] = t
    error_steps = set(range(0, total + 1, cfg.error_every)) | set(snap_steps) | {0, total}

    init = rng.init_generator(cfg.seed)
    from .exact import sample_barenblatt

    cloud = ParticleCloud.at_start(
        sample_barenblatt(params, cfg.kappa, cfg.n, init), t_start=0.0, seed=cfg.seed
    )

    snapshots: list[McKeanSnapshot] = []
    errors: list[ErrorRecord] = []
    cap_max = 0.0
    ratio_max = 0.0
    field: DensityField | None = None
    sig_g: np.ndarray | None = None

    for k in range(total + 1):
        need_field = (k % cfg.refresh_every == 0) or (k in error_steps)
        if need_field:
            field = estimate_density(cloud, grid, cfg.bandwidth)
            if field.mass < cfg.mass_abort:
                raise MassLeakError(
                    f"estimated mass {field.mass:.4f} on [{grid.x_min}, {grid.x_max}] fell "
                    f"below {cfg.mass_abort} at step {k} (t={cloud.time:g}); widen the window "
                    f"or shorten the horizon",
                    step_index=k,
                    mass=field.mass,
                )
            sig_g, capped, ratio = _sigma_grid(cfg, field, cloud.time, xg, floor)
            cap_max = max(cap_max, capped)
            ratio_max = max(ratio_max, ratio)
        assert field is not None and sig_g is not None
        if k in error_steps:
            errors.append(compare_to_exact(field, params, cfg.kappa))
        if k in snap_steps:
            exact = shifted_density(params, cloud.time, xg, cfg.kappa)
            snapshots.append(
                McKeanSnapshot(
                    field=field,
                    exact=exact,
                    sigma_grid=sig_g.copy(),
                    errors=compare_to_exact(field, params, cfg.kappa),
                )
            )
        if k == total:
            break

        sig_on_grid = sig_g  # capture current field for this step's coefficient

        def sigma(t: float, x: np.ndarray) -> np.ndarray:
            interp = np.interp(x, xg, sig_on_grid)
            env = cfg.cap_margin * np.sqrt(abar_coefficient(params, t, x, cfg.kappa))
            return np.minimum(interp, env)

        coeff = CoefficientSpec(kind="mckean_field", sigma=sigma)
        cloud = euler_step(cloud, coeff, cfg.dt)

    return McKeanRun(
        config=cfg,
        snapshots=tuple(snapshots),
        errors=tuple(errors),
        floor=floor,
        cap_fraction_max=cap_max,
        sigma_ratio_max=ratio_max,
        final_cloud=cloud,
    )


def fokker_planck_residual(
    snapshots: "tuple[McKeanSnapshot, ...] | list[McKeanSnapshot]",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Discrete residual of du/dt = d²(a u)/dx² along a run's snapshots.

    Uses centered differences in both time (across snapshot triples) and
    space, with a = sigma_grid² (the engine applies sqrt(2), so the generator
    of a particle with phi-units coefficient sigma is d²(sigma² u)/dx²).
    Returns (times, x_interior, residual matrix of shape (len(times), nx-2)).
    """
    if len(snapshots) < 3:
        raise ValueError("need at least 3 snapshots for a centered time difference")
    grid = snapshots[0].field.grid
    dx = grid.dx
    times = []
    rows = []
    for prev, cur, nxt in zip(snapshots[:-2], snapshots[1:-1], snapshots[2:]):
        dt2 = nxt.field.time - prev.field.time
        dud = (nxt.field.values - prev.field.values) / dt2
        au = cur.sigma_grid**2 * cur.field.values
        lap = (au[2:] - 2.0 * au[1:-1] + au[:-2]) / (dx * dx)
        rows.append(dud[1:-1] - lap)
        times.append(cur.field.time)
    return np.asarray(times), grid.x[1:-1], np.asarray(rows)
