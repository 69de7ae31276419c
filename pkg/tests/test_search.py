"""Optimizer mechanics: buffer maintenance, weighting, termination, baselines."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ris_sic.backend import SimulatedBackend
from ris_sic.channel import si_magnitude_db
from ris_sic.model import RisConfig, SiReading
from ris_sic.search import (
    EXHAUSTIVE_LIMIT,
    ConvergenceTrace,
    EvaluationError,
    GreedyOptimizer,
    exhaustive_search,
    greedy_optimize,
    random_search,
    sample_config,
    weighted_activation_ratio,
)

from conftest import synthetic_scene
from fuzz_tools import FailingBackend, FlatBackend, HashBackend, fuzz_optimizer_run


class TestWeightedActivationRatio:
    def test_two_member_example(self):
        # best = all ON (weight 2), worst = all OFF (weight 1), norm = 3
        buf = [RisConfig.all_on(2, 2), RisConfig.all_off(2, 2)]
        np.testing.assert_allclose(weighted_activation_ratio(buf), 2.0 / 3.0)

    def test_three_member_hand_computation(self):
        a = RisConfig(np.array([[True, False]]))
        b = RisConfig(np.array([[True, True]]))
        c = RisConfig(np.array([[False, True]]))
        # weights 3, 2, 1; norm = 6
        ratio = weighted_activation_ratio([a, b, c])
        np.testing.assert_allclose(ratio, [[(3 + 2) / 6, (2 + 1) / 6]])

    def test_unanimous_columns_hit_extremes_exactly(self):
        buf = [RisConfig(np.array([[True, False]])) for _ in range(5)]
        ratio = weighted_activation_ratio(buf)
        assert ratio[0, 0] == 1.0
        assert ratio[0, 1] == 0.0

    def test_rejects_empty_and_mismatched(self):
        with pytest.raises(ValueError):
            weighted_activation_ratio([])
        with pytest.raises(ValueError):
            weighted_activation_ratio([RisConfig.all_on(2, 2), RisConfig.all_on(3, 3)])

    @given(st.integers(1, 12), st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**6))
    @settings(max_examples=80)
    def test_matches_direct_sum_fuzz(self, b, nx, ny, seed):
        rng = np.random.default_rng(seed)
        buf = [RisConfig(rng.random((nx, ny)) < 0.5) for _ in range(b)]
        expected = np.zeros(nx * ny)
        for k, c in enumerate(buf):
            expected += (b - k) * c.flat()
        expected /= (b * b + b) / 2.0
        ratio = weighted_activation_ratio(buf)
        np.testing.assert_allclose(ratio.reshape(-1), expected, rtol=0, atol=1e-12)
        assert np.all(ratio >= 0.0) and np.all(ratio <= 1.0)


class TestSampleConfig:
    def test_extremes_are_deterministic(self):
        rng = np.random.default_rng(0)
        ones = sample_config(np.ones((3, 3)), rng)
        zeros = sample_config(np.zeros((3, 3)), rng)
        assert int(ones.states.sum()) == 9
        assert int(zeros.states.sum()) == 0

    def test_rejects_out_of_range(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_config(np.full((2, 2), 1.5), rng)
        with pytest.raises(ValueError):
            sample_config(np.full((2, 2), -0.1), rng)
        with pytest.raises(ValueError):
            sample_config(np.full(4, 0.5), rng)

    def test_seeded_reproducibility(self):
        ratio = np.full((4, 4), 0.5)
        a = sample_config(ratio, np.random.default_rng(42))
        b = sample_config(ratio, np.random.default_rng(42))
        assert a == b


class TestGreedyOptimizer:
    def test_warm_up_fills_buffer(self):
        opt = GreedyOptimizer(HashBackend(3, 3), buffer_size=8, stall_limit=10,
                              rng=np.random.default_rng(1))
        assert opt.iteration == 8
        assert opt.buffer_readings.size == 8
        assert np.all(np.diff(opt.buffer_readings) >= 0.0)

    def test_flat_objective_terminates_after_exactly_buffer_plus_stall(self):
        backend = FlatBackend()
        tr = greedy_optimize(backend, 12, 37, np.random.default_rng(3))
        assert tr.iterations_total == 12 + 37
        assert backend.calls == 12 + 37
        assert np.all(tr.evaluated == -44.0)
        assert np.all(tr.cumulative == -44.0)

    def test_stall_counter_resets_only_on_strict_improvement(self):
        opt = GreedyOptimizer(HashBackend(3, 3, salt=7), buffer_size=5, stall_limit=50,
                              rng=np.random.default_rng(7))
        while not opt.finished and opt.iteration < 200:
            best_before = opt.best_reading.magnitude_db
            count_before = opt.termination_count
            value = opt.step()
            if value < best_before:
                assert opt.termination_count == 0
            else:
                assert opt.termination_count == count_before + 1

    def test_replacement_is_strict(self):
        # quantized objective forces ties; equal-to-worst must never displace
        opt = GreedyOptimizer(HashBackend(2, 2, levels=2), buffer_size=4, stall_limit=30,
                              rng=np.random.default_rng(5))
        for _ in range(60):
            if opt.finished:
                break
            worst_before = opt.buffer_readings[-1]
            value = opt.step()
            if value >= worst_before:
                assert opt.buffer_readings[-1] == worst_before

    def test_run_honors_max_evaluations(self):
        opt = GreedyOptimizer(HashBackend(4, 4), buffer_size=10, stall_limit=10_000,
                              rng=np.random.default_rng(0))
        tr = opt.run(max_evaluations=25)
        assert tr.iterations_total == 25

    def test_seeded_runs_are_identical(self):
        scene = synthetic_scene(3, 3, points=3, seed=1)
        t1 = greedy_optimize(SimulatedBackend(scene), 10, 40, np.random.default_rng(11))
        t2 = greedy_optimize(SimulatedBackend(scene), 10, 40, np.random.default_rng(11))
        np.testing.assert_array_equal(t1.evaluated, t2.evaluated)
        np.testing.assert_array_equal(t1.cumulative, t2.cumulative)
        assert t1.best_config == t2.best_config
        assert t1.iterations_total == t2.iterations_total

    def test_different_seeds_diverge(self):
        scene = synthetic_scene(3, 3, points=3, seed=1)
        t1 = greedy_optimize(SimulatedBackend(scene), 10, 40, np.random.default_rng(1))
        t2 = greedy_optimize(SimulatedBackend(scene), 10, 40, np.random.default_rng(2))
        assert not np.array_equal(t1.evaluated, t2.evaluated)

    def test_best_config_reproduces_best_reading(self):
        scene = synthetic_scene(3, 3, points=5, seed=6)
        backend = SimulatedBackend(scene)
        tr = greedy_optimize(backend, 10, 60, np.random.default_rng(2))
        assert si_magnitude_db(scene, tr.best_config) == tr.best_reading
        assert tr.best_reading.magnitude_db == tr.cumulative[-1]

    def test_constructor_validation(self):
        backend = HashBackend(2, 2)
        with pytest.raises(ValueError):
            GreedyOptimizer(backend, buffer_size=1, stall_limit=10)
        with pytest.raises(ValueError):
            GreedyOptimizer(backend, buffer_size=4, stall_limit=0)

    def test_trace_metadata(self):
        tr = greedy_optimize(FlatBackend(), 6, 9, np.random.default_rng(0))
        assert tr.algorithm == "greedy"
        assert tr.buffer_size == 6
        assert tr.stall_limit == 9
        assert tr.wall_time_s >= 0.0

    def test_evaluation_error_during_warmup(self):
        with pytest.raises(EvaluationError) as exc_info:
            GreedyOptimizer(FailingBackend(3, 3, fail_at=4), 8, 10,
                            np.random.default_rng(0))
        assert exc_info.value.iteration == 3  # evaluations completed before the fault
        assert "injected hardware fault" in str(exc_info.value)

    def test_evaluation_error_during_steps(self):
        opt = GreedyOptimizer(FailingBackend(3, 3, fail_at=12), 8, 100,
                              np.random.default_rng(0))
        with pytest.raises(EvaluationError):
            opt.run()
        assert opt.iteration == 11


class TestInvariantFuzz:
    """Randomized structural checking; the acceptance gate reruns this harness
    at larger scale."""

    @pytest.mark.parametrize("seed", range(8))
    def test_fuzzed_runs_hold_invariants(self, seed):
        outcome = fuzz_optimizer_run(seed)
        assert outcome.assertions > 0
        assert outcome.evaluations >= 6

    @pytest.mark.parametrize("seed", range(4))
    def test_fuzzed_runs_with_ties(self, seed):
        assert fuzz_optimizer_run(seed, levels=3, steps=50).assertions > 0


class TestRandomSearch:
    def test_budget_and_running_min(self):
        tr = random_search(HashBackend(3, 3), 50, np.random.default_rng(9))
        assert tr.algorithm == "random"
        assert tr.iterations_total == 50
        assert tr.evaluated.size == 50
        np.testing.assert_array_equal(tr.cumulative, np.minimum.accumulate(tr.evaluated))
        assert tr.buffer_size is None and tr.stall_limit is None

    def test_rejects_empty_budget(self):
        with pytest.raises(ValueError):
            random_search(HashBackend(2, 2), 0)

    def test_seeded_reproducibility(self):
        t1 = random_search(HashBackend(3, 3), 30, np.random.default_rng(4))
        t2 = random_search(HashBackend(3, 3), 30, np.random.default_rng(4))
        np.testing.assert_array_equal(t1.evaluated, t2.evaluated)
        assert t1.best_config == t2.best_config

    def test_error_carries_index(self):
        with pytest.raises(EvaluationError):
            random_search(FailingBackend(3, 3, fail_at=5), 20, np.random.default_rng(0))


class TestExhaustiveSearch:
    def test_matches_independent_enumeration(self):
        scene = synthetic_scene(2, 2, points=3, seed=13)
        backend = SimulatedBackend(scene)
        best_config, best_si = exhaustive_search(backend)

        values = []
        configs = []
        for code in range(16):
            bits = [(code >> (3 - j)) & 1 for j in range(4)]
            c = RisConfig(np.array(bits, dtype=bool).reshape(2, 2))
            configs.append(c)
            values.append(backend.evaluate(c).magnitude_db)
        idx = int(np.argmin(values))  # argmin returns the first minimum
        assert best_si.magnitude_db == values[idx]
        assert best_config == configs[idx]

    def test_greedy_never_beats_exhaustive(self):
        scene = synthetic_scene(2, 2, points=3, seed=21)
        backend = SimulatedBackend(scene)
        _, best_si = exhaustive_search(backend)
        for seed in range(5):
            tr = greedy_optimize(backend, 6, 40, np.random.default_rng(seed))
            assert tr.best_reading.magnitude_db >= best_si.magnitude_db

    def test_tie_break_keeps_lexicographically_smallest(self):
        class ParityBackend:
            """Reading depends only on the ON-element parity: huge tie classes."""

            def evaluate(self, config):
                value = -50.0 if int(config.states.sum()) % 2 == 0 else -40.0
                return SiReading.from_per_point([value])

            def dims(self):
                return (2, 2)

            def grid(self):
                from ris_sic.model import FrequencyGrid

                return FrequencyGrid.narrowband(5.385e9)

        best_config, best_si = exhaustive_search(ParityBackend())
        assert best_si.magnitude_db == -50.0
        # code 0 (all OFF) is the first even-parity state enumerated
        assert best_config == RisConfig.all_off(2, 2)

    def test_size_guard(self):
        with pytest.raises(ValueError, match=str(EXHAUSTIVE_LIMIT)):
            exhaustive_search(HashBackend(3, 7))

    def test_limit_is_twenty(self):
        assert EXHAUSTIVE_LIMIT == 20
        exhaustive_search(SimulatedBackend(synthetic_scene(1, 2, points=1)))  # well under


class TestConvergenceTrace:
    def _ok_kwargs(self):
        ev = np.array([-40.0, -42.0, -41.0, -45.0])
        return dict(
            algorithm="greedy",
            evaluated=ev,
            cumulative=np.minimum.accumulate(ev),
            best_config=RisConfig.all_off(2, 2),
            best_reading=SiReading.from_per_point([-45.0]),
            iterations_total=4,
        )

    def test_valid_roundtrip(self):
        tr = ConvergenceTrace(**self._ok_kwargs())
        assert tr.cumulative[-1] == -45.0

    def test_rejects_tampered_cumulative(self):
        kw = self._ok_kwargs()
        kw["cumulative"] = np.array([-40.0, -42.0, -42.0, -44.0])
        with pytest.raises(ValueError, match="running minimum"):
            ConvergenceTrace(**kw)

    def test_rejects_nan(self):
        kw = self._ok_kwargs()
        kw["evaluated"] = np.array([-40.0, np.nan, -41.0, -45.0])
        with pytest.raises(ValueError):
            ConvergenceTrace(**kw)

    def test_rejects_length_mismatch(self):
        kw = self._ok_kwargs()
        kw["iterations_total"] = 7
        with pytest.raises(ValueError):
            ConvergenceTrace(**kw)

    def test_rejects_best_mismatch(self):
        kw = self._ok_kwargs()
        kw["best_reading"] = SiReading.from_per_point([-44.0])
        with pytest.raises(ValueError):
            ConvergenceTrace(**kw)

    def test_arrays_frozen(self):
        tr = ConvergenceTrace(**self._ok_kwargs())
        with pytest.raises(ValueError):
            tr.evaluated[0] = 0.0
