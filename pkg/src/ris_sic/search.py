"""Configuration search: buffer-weighted stochastic descent plus baselines.

The main optimizer keeps a small buffer of the best configurations seen so
far, ranked by reading.  Each iteration it turns the buffer into a per-element
activation ratio (better-ranked members weigh more), samples a fresh candidate
from that ratio, and lets the candidate displace the buffer's worst member on
strict improvement.  A stall counter terminates the run once the best reading
has not strictly improved for ``stall_limit`` consecutive evaluations.

Baselines: uniform random sampling over the same evaluation budget, and exact
exhaustive enumeration for small surfaces.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .backend import EvaluationBackend
from .model import RisConfig, SiReading


class EvaluationError(RuntimeError):
    """A backend evaluation failed mid-search; carries the evaluation index."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"evaluation {iteration} failed: {message}")
        self.iteration = iteration


@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    """Per-evaluation history of one search run.

    ``evaluated[i]`` is the reading of the i-th evaluated configuration and
    ``cumulative[i]`` the best reading after i+1 evaluations; ``cumulative``
    is exactly the running minimum of ``evaluated``.
    """

    algorithm: str
    evaluated: np.ndarray
    cumulative: np.ndarray
    best_config: RisConfig
    best_reading: SiReading
    iterations_total: int
    buffer_size: Optional[int] = None
    stall_limit: Optional[int] = None
    wall_time_s: float = 0.0

    def __post_init__(self):
        ev = np.array(self.evaluated, dtype=np.float64)
        cu = np.array(self.cumulative, dtype=np.float64)
        if ev.ndim != 1 or ev.size < 1 or cu.shape != ev.shape:
            raise ValueError("evaluated/cumulative must be equal-length 1-D, non-empty")
        if np.any(np.isnan(ev)):
            raise ValueError("trace readings must not contain NaN")
        if not np.array_equal(cu, np.minimum.accumulate(ev)):
            raise ValueError("cumulative column is not the running minimum of evaluated")
        if self.iterations_total != ev.size:
            raise ValueError(
                f"iterations_total ({self.iterations_total}) != trace length ({ev.size})"
            )
        if self.best_reading.magnitude_db != cu[-1]:
            raise ValueError("best_reading does not match the final cumulative value")
        ev.setflags(write=False)
        cu.setflags(write=False)
        object.__setattr__(self, "evaluated", ev)
        object.__setattr__(self, "cumulative", cu)


def weighted_activation_ratio(configs: Sequence[RisConfig]) -> np.ndarray:
    """Rank-weighted per-element ON ratio of a best-first buffer.

    Rank k (0 = best) carries weight B - k; the weighted sum of the 0/1 state
    matrices is normalized by (B**2 + B)/2 so every entry lies in [0, 1], with
    the extremes attained exactly when a column is unanimous.
    """
    if len(configs) < 1:
        raise ValueError("need at least one buffered configuration")
    nx, ny = configs[0].nx, configs[0].ny
    for c in configs:
        if (c.nx, c.ny) != (nx, ny):
            raise ValueError("buffered configurations disagree on surface dimensions")
    matrix = np.stack([c.flat() for c in configs]).astype(np.float64)
    return _ratio_from_matrix(matrix).reshape(nx, ny)


def _ratio_from_matrix(matrix: np.ndarray) -> np.ndarray:
    b = matrix.shape[0]
    weights = np.arange(b, 0, -1, dtype=np.float64)
    return (weights @ matrix) / ((b * b + b) / 2.0)


def sample_config(ratio: np.ndarray, rng: np.random.Generator) -> RisConfig:
    """Draw a configuration with independent per-element Bernoulli(ratio)."""
    ratio = np.asarray(ratio, dtype=np.float64)
    if ratio.ndim != 2:
        raise ValueError(f"ratio must be a 2-D matrix, got ndim={ratio.ndim}")
    if np.any(ratio < 0.0) or np.any(ratio > 1.0):
        raise ValueError("activation ratios must lie in [0, 1]")
    return RisConfig(rng.random(ratio.shape) < ratio)


class GreedyOptimizer:
    """Stepwise buffer-weighted stochastic search over one backend.

    The constructor performs the ``buffer_size`` uniform warm-up evaluations,
    so the buffer invariants (full, sorted ascending by reading) hold from the
    start.  Call :meth:`step` to advance one evaluation or :meth:`run` to
    iterate to termination.
    """

    def __init__(
        self,
        backend: EvaluationBackend,
        buffer_size: int = 100,
        stall_limit: int = 500,
        rng: Optional[np.random.Generator] = None,
    ):
        if buffer_size < 2:
            raise ValueError(f"buffer_size must be >= 2, got {buffer_size}")
        if stall_limit < 1:
            raise ValueError(f"stall_limit must be >= 1, got {stall_limit}")
        self.backend = backend
        self.buffer_size = buffer_size
        self.stall_limit = stall_limit
        self.rng = rng if rng is not None else np.random.default_rng()
        self._nx, self._ny = backend.dims()
        self._t0 = time.perf_counter()
        self._evaluated: list[float] = []
        self._cumulative: list[float] = []
        self.iteration = 0
        self.termination_count = 0

        half = np.full((self._nx, self._ny), 0.5)
        warm_readings = []
        warm_configs = []
        for _ in range(buffer_size):
            cand = sample_config(half, self.rng)
            reading, _ = self._evaluate(cand)
            warm_readings.append(reading.magnitude_db)
            warm_configs.append(cand)
        order = np.argsort(np.asarray(warm_readings), kind="stable")
        self._readings = np.asarray(warm_readings, dtype=np.float64)[order]
        self._configs = [warm_configs[i] for i in order]
        self._matrix = np.stack([c.flat() for c in self._configs]).astype(np.float64)

    def _evaluate(self, config: RisConfig) -> tuple[SiReading, bool]:
        """Score one configuration, extend the trace, track the running best.

        Returns the reading and whether it strictly improved on the incumbent
        (ties keep the earlier configuration).
        """
        try:
            reading = self.backend.evaluate(config)
        except Exception as exc:  # noqa: BLE001 - re-raise with run context
            raise EvaluationError(self.iteration, str(exc)) from exc
        self.iteration += 1
        value = reading.magnitude_db
        self._evaluated.append(value)
        improved = not self._cumulative or value < self._cumulative[-1]
        if improved:
            self._cumulative.append(value)
            self._best_si = reading
            self._best_config = config
        else:
            self._cumulative.append(self._cumulative[-1])
        return reading, improved

    # -- inspection ---------------------------------------------------------

    @property
    def buffer_readings(self) -> np.ndarray:
        return self._readings.copy()

    @property
    def buffer_configs(self) -> tuple[RisConfig, ...]:
        return tuple(self._configs)

    @property
    def best_reading(self) -> SiReading:
        return self._best_si

    @property
    def best_config(self) -> RisConfig:
        return self._best_config

    @property
    def finished(self) -> bool:
        return self.termination_count >= self.stall_limit

    def activation_ratio(self) -> np.ndarray:
        """Current rank-weighted ON ratio the next candidate is drawn from."""
        return _ratio_from_matrix(self._matrix).reshape(self._nx, self._ny)

    # -- advancement --------------------------------------------------------

    def step(self) -> float:
        """One evaluation: sample from the buffer, score, update. Returns the reading."""
        cand = sample_config(self.activation_ratio(), self.rng)
        reading, improved = self._evaluate(cand)
        value = reading.magnitude_db
        if improved:
            # strict improvement on the incumbent: reset the stall counter
            self.termination_count = 0
        else:
            self.termination_count += 1
        if value < self._readings[-1]:
            self._readings[-1] = value
            self._configs[-1] = cand
            self._matrix[-1] = cand.flat().astype(np.float64)
            order = np.argsort(self._readings, kind="stable")
            self._readings = self._readings[order]
            self._configs = [self._configs[i] for i in order]
            self._matrix = self._matrix[order]
        return value

    def run(self, max_evaluations: Optional[int] = None) -> ConvergenceTrace:
        """Step until the stall counter hits the limit (or an optional cap)."""
        while not self.finished:
            if max_evaluations is not None and self.iteration >= max_evaluations:
                break
            self.step()
        return self.trace()

    def trace(self) -> ConvergenceTrace:
        return ConvergenceTrace(
            algorithm="greedy",
            evaluated=np.asarray(self._evaluated),
            cumulative=np.asarray(self._cumulative),
            best_config=self._best_config,
            best_reading=self._best_si,
            iterations_total=self.iteration,
            buffer_size=self.buffer_size,
            stall_limit=self.stall_limit,
            wall_time_s=time.perf_counter() - self._t0,
        )


def greedy_optimize(
    backend: EvaluationBackend,
    buffer_size: int = 100,
    stall_limit: int = 500,
    rng: Optional[np.random.Generator] = None,
) -> ConvergenceTrace:
    """Run the buffer-weighted search to stall-based termination."""
    return GreedyOptimizer(backend, buffer_size, stall_limit, rng).run()


def random_search(
    backend: EvaluationBackend,
    iterations: int,
    rng: Optional[np.random.Generator] = None,
) -> ConvergenceTrace:
    """Uniform Bernoulli(0.5) sampling baseline over a fixed budget."""
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    rng = rng if rng is not None else np.random.default_rng()
    t0 = time.perf_counter()
    nx, ny = backend.dims()
    half = np.full((nx, ny), 0.5)
    evaluated: list[float] = []
    cumulative: list[float] = []
    best_si: Optional[SiReading] = None
    best_config: Optional[RisConfig] = None
    for i in range(iterations):
        cand = sample_config(half, rng)
        try:
            reading = backend.evaluate(cand)
        except Exception as exc:  # noqa: BLE001
            raise EvaluationError(i, str(exc)) from exc
        value = reading.magnitude_db
        evaluated.append(value)
        if best_si is None or value < best_si.magnitude_db:
            best_si = reading
            best_config = cand
        cumulative.append(best_si.magnitude_db)
    return ConvergenceTrace(
        algorithm="random",
        evaluated=np.asarray(evaluated),
        cumulative=np.asarray(cumulative),
        best_config=best_config,
        best_reading=best_si,
        iterations_total=iterations,
        wall_time_s=time.perf_counter() - t0,
    )


EXHAUSTIVE_LIMIT = 20


def exhaustive_search(backend: EvaluationBackend) -> tuple[RisConfig, SiReading]:
    """Exact optimum by full enumeration; surfaces capped at 2**20 states.

    States are visited in lexicographic order of the row-major bit string
    (element (0, 0) most significant); ties keep the earliest, i.e. the
    lexicographically smallest optimum.
    """
    nx, ny = backend.dims()
    n = nx * ny
    if n > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive search limited to {EXHAUSTIVE_LIMIT} elements, got {n}"
        )
    shifts = np.arange(n - 1, -1, -1)
    best_config: Optional[RisConfig] = None
    best_si: Optional[SiReading] = None
    for code in range(2**n):
        bits = (code >> shifts) & 1
        cand = RisConfig(bits.astype(bool).reshape(nx, ny))
        reading = backend.evaluate(cand)
        if best_si is None or reading.magnitude_db < best_si.magnitude_db:
            best_si = reading
            best_config = cand
    return best_config, best_si
