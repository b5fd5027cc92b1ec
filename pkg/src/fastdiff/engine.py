"""Euler–Maruyama particle engine for zero-drift scalar diffusions.

The update rule is

    X_{k+1} = X_k + sqrt(2 * dt) * sigma(t_k, X_k) * xi_k,

with ``sigma`` in "phi units": a particle system driven with
``sigma = sqrt(abar)`` has one-dimensional marginals governed by
du/dt = d²(abar·u)/dx².  The sqrt(2) lives in the engine so coefficient
callables can be compared directly against sqrt of a diffusivity.

Noise comes from the counter-based streams in :mod:`fastdiff.rng`; step k of a
run with seed s always consumes block k of stream 0, so two runs that take the
same steps see the same noise even if one of them pauses, snapshots, or
re-evaluates coefficients along the way.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from .exact import FastDiffusionParams, abar_coefficient
from .rng import init_generator, step_normals

__all__ = [
    "NumericsError",
    "ParticleCloud",
    "CoefficientSpec",
    "SdeRun",
    "euler_step",
    "run_oracle_sde",
    "run_point_start_sde",
]


class NumericsError(RuntimeError):
    """A particle left the representable range (NaN/inf positions)."""

    def __init__(self, message: str, step_index: int, bad_count: int):
        super().__init__(message)
        self.step_index = step_index
        self.bad_count = bad_count


@dataclasses.dataclass(frozen=True)
class ParticleCloud:
    """Immutable snapshot of the particle system.

    ``time`` is always ``t_start + step_index * dt`` of the run that produced
    the cloud; positions are a read-only float64 vector so downstream code
    cannot silently mutate a snapshot that other records reference.
    """

    positions: np.ndarray
    time: float
    seed: int
    step_index: int
    t_start: float = 0.0

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 1 or pos.size == 0:
            raise ValueError(f"positions must be a non-empty 1-D array, got shape {pos.shape}")
        pos = pos.copy() if pos.flags.writeable else pos
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        if not math.isfinite(self.time) or not math.isfinite(self.t_start):
            raise ValueError("cloud times must be finite")
        if self.step_index < 0:
            raise ValueError(f"step_index must be >= 0, got {self.step_index!r}")

    @classmethod
    def at_start(cls, positions: np.ndarray, t_start: float, seed: int) -> "ParticleCloud":
        return cls(positions=positions, time=t_start, seed=seed, step_index=0, t_start=t_start)

    @property
    def n(self) -> int:
        return self.positions.size


@dataclasses.dataclass(frozen=True, eq=False)
class CoefficientSpec:
    """Diffusion coefficient sigma(t, x) in phi units, with an optional cap.

    ``sigma`` receives the cloud time and the position vector and must return
    a broadcastable array of non-negative values; ``clip_max`` (if set) is
    applied by the engine after evaluation.
    """

    kind: str
    sigma: Callable[[float, np.ndarray], np.ndarray]
    clip_max: float | None = None

    def __post_init__(self) -> None:
        if self.clip_max is not None and not self.clip_max > 0.0:
            raise ValueError(f"clip_max must be positive when given, got {self.clip_max!r}")

    @classmethod
    def constant(cls, value: float) -> "CoefficientSpec":
        if not value >= 0.0:
            raise ValueError(f"constant coefficient must be >= 0, got {value!r}")
        return cls(kind=f"constant({value:g})", sigma=lambda t, x: np.full_like(x, value))

    @classmethod
    def oracle_barenblatt(cls, params: FastDiffusionParams, kappa: float) -> "CoefficientSpec":
        """sqrt(abar(t, x)): the exact shifted-solution coefficient."""
        if kappa <= 0.0:
            raise ValueError(f"oracle coefficient needs kappa > 0, got {kappa!r}")

        def sigma(t: float, x: np.ndarray) -> np.ndarray:
            return np.sqrt(abar_coefficient(params, t, x, kappa))

        return cls(kind=f"oracle_barenblatt(m={params.m:g}, kappa={kappa:g})", sigma=sigma)


def euler_step(
    cloud: ParticleCloud,
    coeff: CoefficientSpec,
    dt: float,
    normals: np.ndarray | None = None,
) -> ParticleCloud:
    """Advance the cloud by one Euler–Maruyama step of size dt.

    ``normals`` overrides the stream draw (coupling experiments); its length
    must match the cloud.  Raises :class:`NumericsError` if any updated
    position is non-finite.
    """
    if not dt > 0.0 or not math.isfinite(dt):
        raise ValueError(f"dt must be positive and finite, got {dt!r}")
    pos = cloud.positions
    sig = np.asarray(coeff.sigma(cloud.time, pos), dtype=np.float64)
    if sig.ndim == 0:
        sig = np.full(pos.shape, float(sig))
    if sig.shape != pos.shape:
        raise ValueError(
            f"coefficient returned shape {sig.shape}, expected {pos.shape} (kind={coeff.kind})"
        )
    if coeff.clip_max is not None:
        sig = np.minimum(sig, coeff.clip_max)
    if normals is None:
        xi = step_normals(cloud.seed, cloud.step_index, pos.size)
    else:
        xi = np.asarray(normals, dtype=np.float64)
        if xi.shape != pos.shape:
            raise ValueError(f"injected normals have shape {xi.shape}, expected {pos.shape}")
    new_pos = pos + math.sqrt(2.0 * dt) * sig * xi
    if not np.all(np.isfinite(new_pos)):
        bad = int(np.size(new_pos) - np.isfinite(new_pos).sum())
        raise NumericsError(
            f"{bad} particle position(s) became non-finite during step "
            f"{cloud.step_index} (t={cloud.time:g}); the coefficient "
            f"(kind={coeff.kind}) is likely unbounded on the current cloud",
            step_index=cloud.step_index,
            bad_count=bad,
        )
    new_step = cloud.step_index + 1
    return ParticleCloud(
        positions=new_pos,
        time=cloud.t_start + new_step * dt,
        seed=cloud.seed,
        step_index=new_step,
        t_start=cloud.t_start,
    )


@dataclasses.dataclass(frozen=True)
class SdeRun:
    """Snapshots of one particle trajectory run (shared noise, shared paths)."""

    clouds: tuple[ParticleCloud, ...]
    requested_times: tuple[float, ...]
    coeff_kind: str
    dt: float
    seed: int

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(c.time for c in self.clouds)


def _snapshot_steps(t_grid: Sequence[float], dt: float) -> dict[int, float]:
    """Map requested times to their nearest completed step (ties round to even).

    Two requested times landing on the same step would make the cloud-to-time
    association ambiguous, so that is rejected rather than silently collapsed.
    """
    steps: dict[int, float] = {}
    for t in t_grid:
        if t < 0.0 or not math.isfinite(t):
            raise ValueError(f"snapshot times must be finite and >= 0, got {t!r}")
        k = int(np.rint(t / dt))
        if k in steps:
            raise ValueError(
                f"snapshot times {steps[k]:g} and {t:g} both round to step {k} at dt={dt:g}"
            )
        steps[k] = float(t)
    return steps


def _run_snapshots(
    start: ParticleCloud, coeff: CoefficientSpec, dt: float, t_grid: Sequence[float]
) -> SdeRun:
    snap = _snapshot_steps(t_grid, dt)
    if not snap:
        raise ValueError("at least one snapshot time is required")
    last = max(snap)
    by_step: dict[int, ParticleCloud] = {}
    cloud = start
    for k in range(last + 1):
        if k in snap:
            by_step[k] = cloud
        if k < last:
            cloud = euler_step(cloud, coeff, dt)
    # emit clouds in the order the times were requested, not in step order
    clouds = tuple(by_step[int(np.rint(t / dt))] for t in t_grid)
    return SdeRun(
        clouds=clouds,
        requested_times=tuple(float(t) for t in t_grid),
        coeff_kind=coeff.kind,
        dt=float(dt),
        seed=start.seed,
    )


def run_oracle_sde(
    params: FastDiffusionParams,
    kappa: float,
    n: int,
    dt: float,
    t_grid: Sequence[float],
    seed: int,
) -> SdeRun:
    """Drive particles with the exact coefficient sqrt(abar(t, x)).

    Initial positions are drawn from U(kappa, .), so the cloud at solver time
    t is distributed as U(t + kappa, .); this run doubles as the reference
    sampler for K-point law checks since all snapshots share particle paths.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    from .exact import sample_barenblatt  # local import keeps module load light

    init = sample_barenblatt(params, kappa, n, init_generator(seed))
    start = ParticleCloud.at_start(init, t_start=0.0, seed=seed)
    coeff = CoefficientSpec.oracle_barenblatt(params, kappa)
    return _run_snapshots(start, coeff, dt, t_grid)


def run_point_start_sde(
    coeff: CoefficientSpec,
    x0: float,
    n: int,
    dt: float,
    s_grid: Sequence[float],
    seed: int,
) -> SdeRun:
    """Drive n particles all started at the point x0 (small-time law probes)."""
    if not math.isfinite(x0):
        raise ValueError(f"x0 must be finite, got {x0!r}")
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    start = ParticleCloud.at_start(np.full(n, float(x0)), t_start=0.0, seed=seed)
    return _run_snapshots(start, coeff, dt, s_grid)
