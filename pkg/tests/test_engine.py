"""Stepper and noise-stream behavior: determinism, exact update algebra,
snapshot bookkeeping, and the convergence properties expected of an
Euler–Maruyama discretization of dX = sqrt(2) sigma(t, X) dW."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.special import ndtri

from fastdiff.engine import (
    CoefficientSpec,
    NumericsError,
    ParticleCloud,
    euler_step,
    run_oracle_sde,
    run_point_start_sde,
)
from fastdiff.exact import abar_coefficient, sample_barenblatt
from fastdiff.rng import (
    STREAM_INIT,
    STREAM_STEPS,
    init_generator,
    open_uniforms,
    philox_generator,
    step_normals,
)


class TestNoiseStreams:
    def test_uniforms_strictly_inside_unit_interval(self):
        u = open_uniforms(0, STREAM_STEPS, 100_000)
        assert u.min() > 0.0 and u.max() < 1.0

    def test_streams_are_deterministic(self):
        a = open_uniforms(42, STREAM_STEPS, 1000, block=7)
        b = open_uniforms(42, STREAM_STEPS, 1000, block=7)
        assert np.array_equal(a, b)

    def test_prefix_consistency(self):
        # the i-th variate of a block does not depend on how many are drawn
        short = open_uniforms(3, STREAM_STEPS, 50, block=2)
        long = open_uniforms(3, STREAM_STEPS, 100, block=2)
        assert np.array_equal(short, long[:50])

    def test_blocks_streams_and_seeds_decorrelate(self):
        base = open_uniforms(5, STREAM_STEPS, 64, block=0)
        assert not np.array_equal(base, open_uniforms(5, STREAM_STEPS, 64, block=1))
        assert not np.array_equal(base, open_uniforms(5, STREAM_INIT, 64, block=0))
        assert not np.array_equal(base, open_uniforms(6, STREAM_STEPS, 64, block=0))

    def test_step_normals_are_inverse_cdf_of_their_block(self):
        want = ndtri(open_uniforms(9, STREAM_STEPS, 8, block=3))
        assert np.array_equal(step_normals(9, 3, 8), want)

    @pytest.mark.parametrize(
        "bad", [-1, 2**63, 1.5, True, "7"], ids=["negative", "too-big", "float", "bool", "str"]
    )
    def test_bad_seeds_rejected(self, bad):
        with pytest.raises(ValueError):
            philox_generator(bad, STREAM_STEPS)

    def test_bad_stream_and_block_rejected(self):
        with pytest.raises(ValueError):
            philox_generator(0, -1)
        with pytest.raises(ValueError):
            philox_generator(0, 0, block=-1)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**63 - 1), step=st.integers(0, 10_000))
    def test_step_noise_is_pure_function_of_key(self, seed, step):
        a = step_normals(seed, step, 4)
        assert np.array_equal(a, step_normals(seed, step, 4))
        assert not np.array_equal(a, step_normals(seed, step + 1, 4))


class TestParticleCloud:
    def test_positions_are_read_only(self):
        cloud = ParticleCloud.at_start(np.zeros(4), t_start=0.0, seed=0)
        with pytest.raises(ValueError):
            cloud.positions[0] = 1.0

    def test_input_array_is_copied(self):
        arr = np.ones(3)
        cloud = ParticleCloud.at_start(arr, t_start=0.0, seed=0)
        arr[0] = 99.0
        assert cloud.positions[0] == 1.0

    def test_invalid_shapes_and_fields_rejected(self):
        with pytest.raises(ValueError):
            ParticleCloud.at_start(np.zeros(0), t_start=0.0, seed=0)
        with pytest.raises(ValueError):
            ParticleCloud.at_start(np.zeros((2, 2)), t_start=0.0, seed=0)
        with pytest.raises(ValueError):
            ParticleCloud.at_start(np.zeros(2), t_start=math.nan, seed=0)
        with pytest.raises(ValueError):
            ParticleCloud(positions=np.zeros(2), time=0.0, seed=0, step_index=-1)

    def test_at_start_fields(self):
        cloud = ParticleCloud.at_start(np.arange(5.0), t_start=0.25, seed=7)
        assert cloud.n == 5
        assert cloud.time == 0.25 and cloud.t_start == 0.25
        assert cloud.step_index == 0 and cloud.seed == 7


class TestCoefficientSpec:
    def test_constant_rejects_negative(self):
        with pytest.raises(ValueError):
            CoefficientSpec.constant(-0.1)

    def test_clip_must_be_positive(self):
        with pytest.raises(ValueError):
            CoefficientSpec(kind="x", sigma=lambda t, x: x, clip_max=0.0)

    def test_oracle_requires_positive_shift(self, params_half):
        with pytest.raises(ValueError):
            CoefficientSpec.oracle_barenblatt(params_half, 0.0)

    def test_oracle_is_sqrt_of_diffusivity(self, params_half):
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        x = np.linspace(-4.0, 4.0, 33)
        want = np.sqrt(abar_coefficient(params_half, 0.3, x, 1.0))
        assert np.array_equal(coeff.sigma(0.3, x), want)


class TestEulerStep:
    def test_zero_coefficient_moves_nothing(self):
        cloud = ParticleCloud.at_start(np.linspace(-1, 1, 8), t_start=0.0, seed=1)
        stepped = euler_step(cloud, CoefficientSpec.constant(0.0), dt=0.05)
        assert np.array_equal(stepped.positions, cloud.positions)
        assert stepped.step_index == 1

    def test_single_step_matches_update_formula_exactly(self):
        pos = philox_generator(99, 5).standard_normal(64)
        cloud = ParticleCloud.at_start(pos, t_start=0.0, seed=12)
        dt, c = 0.02, 0.7
        stepped = euler_step(cloud, CoefficientSpec.constant(c), dt)
        want = pos + math.sqrt(2.0 * dt) * c * step_normals(12, 0, 64)
        assert np.array_equal(stepped.positions, want)

    def test_injected_normals_reproduce_stream_draw(self, params_half):
        cloud = ParticleCloud.at_start(np.linspace(-2, 2, 32), t_start=0.0, seed=4)
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        auto = euler_step(cloud, coeff, 0.01)
        manual = euler_step(cloud, coeff, 0.01, normals=step_normals(4, 0, 32))
        assert np.array_equal(auto.positions, manual.positions)

    def test_scalar_coefficient_broadcasts(self):
        cloud = ParticleCloud.at_start(np.zeros(16), t_start=0.0, seed=2)
        spec = CoefficientSpec(kind="scalar", sigma=lambda t, x: np.float64(0.5))
        want = euler_step(cloud, CoefficientSpec.constant(0.5), 0.01)
        assert np.array_equal(euler_step(cloud, spec, 0.01).positions, want.positions)

    def test_wrong_coefficient_shape_rejected(self):
        cloud = ParticleCloud.at_start(np.zeros(8), t_start=0.0, seed=2)
        spec = CoefficientSpec(kind="truncated", sigma=lambda t, x: np.ones(3))
        with pytest.raises(ValueError, match="truncated"):
            euler_step(cloud, spec, 0.01)

    def test_clip_cap_is_applied(self):
        cloud = ParticleCloud.at_start(np.zeros(16), t_start=0.0, seed=8)
        spec = CoefficientSpec(kind="hot", sigma=lambda t, x: np.full_like(x, 10.0), clip_max=0.5)
        want = np.zeros(16) + math.sqrt(2.0 * 0.01) * 0.5 * step_normals(8, 0, 16)
        assert np.array_equal(euler_step(cloud, spec, 0.01).positions, want)

    def test_nonfinite_update_raises_numerics_error(self):
        cloud = ParticleCloud.at_start(np.zeros(6), t_start=0.0, seed=3)
        spec = CoefficientSpec(kind="blowup", sigma=lambda t, x: np.full_like(x, np.inf))
        with pytest.raises(NumericsError) as info:
            euler_step(cloud, spec, 0.01)
        assert info.value.step_index == 0
        assert info.value.bad_count == 6

    @pytest.mark.parametrize("dt", [0.0, -0.1, math.inf, math.nan])
    def test_bad_dt_rejected(self, dt):
        cloud = ParticleCloud.at_start(np.zeros(2), t_start=0.0, seed=0)
        with pytest.raises(ValueError):
            euler_step(cloud, CoefficientSpec.constant(1.0), dt)

    def test_time_arithmetic_is_start_plus_steps(self):
        cloud = ParticleCloud.at_start(np.zeros(4), t_start=0.25, seed=9)
        for _ in range(3):
            cloud = euler_step(cloud, CoefficientSpec.constant(1.0), 0.1)
        assert cloud.step_index == 3
        assert cloud.time == 0.25 + 3 * 0.1  # exactly the same expression
        assert cloud.t_start == 0.25 and cloud.seed == 9

    def test_constant_coefficient_reduces_to_scaled_random_walk(self):
        n, dt, c, seed = 128, 0.01, 0.8, 21
        cloud = ParticleCloud.at_start(np.zeros(n), t_start=0.0, seed=seed)
        want = np.zeros(n)
        for k in range(5):
            cloud = euler_step(cloud, CoefficientSpec.constant(c), dt)
            want = want + math.sqrt(2.0 * dt) * c * step_normals(seed, k, n)
        assert np.array_equal(cloud.positions, want)

    def test_random_walk_variance_matches_2_sigma_squared_t(self):
        # var(X_T) for constant sigma must be 2 c^2 T; 4-sigma sampling band
        n, dt, c, steps = 200_000, 0.01, 0.8, 10
        cloud = ParticleCloud.at_start(np.zeros(n), t_start=0.0, seed=17)
        for _ in range(steps):
            cloud = euler_step(cloud, CoefficientSpec.constant(c), dt)
        want = 2.0 * c * c * steps * dt
        got = float(np.var(cloud.positions))
        assert abs(got - want) < 4.0 * want * math.sqrt(2.0 / n)
        assert abs(float(np.mean(cloud.positions))) < 4.0 * math.sqrt(want / n)


class TestSnapshotRuns:
    def test_snapshot_times_round_to_nearest_step(self, params_half):
        run = run_oracle_sde(params_half, 1.0, 100, 0.01, [0.1000000001], seed=1)
        (cloud,) = run.clouds
        assert cloud.step_index == 10
        assert cloud.time == pytest.approx(0.1, abs=1e-12)

    def test_exact_tie_rounds_to_even_step(self, params_half):
        # 0.375/0.25 is exactly 1.5 in binary; banker's rounding sends it to 2
        run = run_oracle_sde(params_half, 1.0, 100, 0.25, [0.375], seed=1)
        assert run.clouds[0].step_index == 2

    def test_requested_order_is_preserved(self, params_half):
        run = run_oracle_sde(params_half, 1.0, 100, 0.01, [0.2, 0.1], seed=1)
        assert run.requested_times == (0.2, 0.1)
        assert [c.step_index for c in run.clouds] == [20, 10]
        assert run.times == tuple(c.time for c in run.clouds)

    def test_colliding_snapshot_times_rejected(self, params_half):
        with pytest.raises(ValueError, match="both round to step"):
            run_oracle_sde(params_half, 1.0, 100, 0.01, [0.001, 0.002], seed=1)

    def test_empty_time_grid_rejected(self, params_half):
        with pytest.raises(ValueError):
            run_oracle_sde(params_half, 1.0, 100, 0.01, [], seed=1)

    def test_snapshots_share_one_noise_path(self, params_half):
        run = run_oracle_sde(params_half, 1.0, 200, 0.01, [0.02, 0.05], seed=6)
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        init = sample_barenblatt(params_half, 1.0, 200, init_generator(6))
        cloud = ParticleCloud.at_start(init, t_start=0.0, seed=6)
        for k in range(5):
            if k == 2:
                assert np.array_equal(run.clouds[0].positions, cloud.positions)
            cloud = euler_step(cloud, coeff, 0.01)
        assert np.array_equal(run.clouds[1].positions, cloud.positions)

    def test_runs_are_bitwise_reproducible(self, params_half):
        a = run_oracle_sde(params_half, 1.0, 500, 0.01, [0.0, 0.1], seed=123)
        b = run_oracle_sde(params_half, 1.0, 500, 0.01, [0.0, 0.1], seed=123)
        for ca, cb in zip(a.clouds, b.clouds):
            assert np.array_equal(ca.positions, cb.positions)


class TestOracleRun:
    def test_initial_cloud_is_the_reference_sample(self, params_half):
        run = run_oracle_sde(params_half, 1.0, 1000, 0.01, [0.0], seed=44)
        want = sample_barenblatt(params_half, 1.0, 1000, init_generator(44))
        assert np.array_equal(run.clouds[0].positions, want)

    def test_marginal_law_matches_exact_density(self, params_half):
        # after 100 steps the cloud must still follow the shifted closed form;
        # KS ≈ 0.005 measured (sampling band 1.628/sqrt(n) ≈ 0.0115 at 1%)
        kappa, horizon = 1.0, 0.2
        run = run_oracle_sde(params_half, kappa, 20_000, 2e-3, [horizon], seed=11)
        nu = (1 + params_half.m) / (1 - params_half.m)
        c = (horizon + kappa) ** params_half.alpha * params_half.scale / math.sqrt(nu)
        ks = stats.kstest(run.clouds[0].positions, lambda v: stats.t.cdf(v / c, df=nu))
        assert ks.statistic < 1.628 / math.sqrt(20_000)

    def test_increment_third_moment_scales_like_power_three_halves(self, params_for):
        # E|X_{s+d} - X_s|^3 ~ d^1.5 along shared paths (measured 1.52-1.54;
        # m=0.7 keeps the third moment of the marginal finite)
        p = params_for(0.7)
        s0, deltas = 0.25, [0.05, 0.1, 0.2, 0.4, 0.8]
        run = run_oracle_sde(p, 1.0, 50_000, 1e-3, [s0] + [s0 + d for d in deltas], seed=31)
        base = run.clouds[0].positions
        m3 = [float(np.mean(np.abs(c.positions - base) ** 3)) for c in run.clouds[1:]]
        slope = np.polyfit(np.log(deltas), np.log(m3), 1)[0]
        assert 1.35 <= slope <= 1.65

    def test_strong_refinement_ratio_matches_order_one_half(self, params_half):
        # coupled refinement: E|X^(2h) - X^(h)| should shrink by ~sqrt(2) per
        # halving for a strong-order-1/2 scheme (measured ratio 1.39)
        n, horizon, fine_steps = 20_000, 0.5, 200
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        fine = philox_generator(77, 9).standard_normal((fine_steps, n))

        def drive(group: int) -> np.ndarray:
            steps = fine_steps // group
            dt = horizon / steps
            xi = fine.reshape(steps, group, n).sum(axis=1) / math.sqrt(group)
            cloud = ParticleCloud.at_start(np.zeros(n), t_start=0.0, seed=77)
            for k in range(steps):
                cloud = euler_step(cloud, coeff, dt, normals=xi[k])
            return cloud.positions

        coarse, mid, fine_pos = drive(4), drive(2), drive(1)
        ratio = np.mean(np.abs(coarse - mid)) / np.mean(np.abs(mid - fine_pos))
        assert 1.2 <= ratio <= 1.7


class TestPointStartRun:
    def test_validation(self, params_half):
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        with pytest.raises(ValueError):
            run_point_start_sde(coeff, math.inf, 10, 0.01, [0.1], seed=0)
        with pytest.raises(ValueError):
            run_point_start_sde(coeff, 0.0, 0, 0.01, [0.1], seed=0)
        with pytest.raises(ValueError):
            run_point_start_sde(coeff, 0.0, 10, 0.0, [0.1], seed=0)
        with pytest.raises(ValueError):
            run_point_start_sde(coeff, 0.0, 10, 0.01, [], seed=0)

    def test_time_zero_snapshot_is_all_at_origin_point(self, params_half):
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        run = run_point_start_sde(coeff, 2.0, 50, 0.01, [0.0, 0.05], seed=1)
        assert np.all(run.clouds[0].positions == 2.0)
        assert not np.all(run.clouds[1].positions == 2.0)

    def test_small_time_spread_follows_local_coefficient(self, params_half):
        # for s -> 0 the cloud is ~ N(x0, 2 abar(0, x0) s); measured offsets
        # stay under 1% at s <= 1e-3
        coeff = CoefficientSpec.oracle_barenblatt(params_half, 1.0)
        x0 = 2.0
        run = run_point_start_sde(coeff, x0, 20_000, 5e-5, [2e-4, 5e-4, 1e-3], seed=5)
        for cloud, s in zip(run.clouds, run.requested_times):
            pred = math.sqrt(2.0 * abar_coefficient(params_half, 0.0, x0, 1.0) * s)
            got = float(np.std(cloud.positions - x0))
            assert got == pytest.approx(pred, rel=0.05)
            assert abs(float(np.mean(cloud.positions)) - x0) < 5.0 * pred / math.sqrt(20_000)
