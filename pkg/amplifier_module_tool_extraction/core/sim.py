"""
Monte Carlo engine.

Simulates the uncontrolled price X⁰ (drifted Brownian motion plus two-sided
compound Poisson jumps), applies barrier strategies, accumulates the
discounted profit and simulates the stopping payoff.

Every path owns a counter-based Philox stream keyed by (seed, path_index), so
a path is the same no matter which worker draws it. Chunks come back in
path order and are reduced over one array, which keeps estimates
bit-identical for any worker count.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import ValidationError
from .model import ModelParams, sample_jumps

logger = logging.getLogger(__name__)

DEFAULT_DT_FACTOR = 1e-3
DEFAULT_DISCOUNT_FLOOR = 1e-9
DEFAULT_CHUNK_SIZE = 2000


@dataclass(frozen=True)
class PathConfig:
    dt: float
    horizon: float
    seed: int = 42
    paths: int = 200_000
    bridge_max: bool = False

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if not self.horizon > 0.0:
            raise ValidationError(f"horizon must be positive, got {self.horizon!r}")
        if int(self.paths) < 1:
            raise ValidationError(f"paths must be at least 1, got {self.paths!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @classmethod
    def for_params(
        cls,
        params: ModelParams,
        dt_factor: float = DEFAULT_DT_FACTOR,
        discount_floor: float = DEFAULT_DISCOUNT_FLOOR,
        **overrides,
    ) -> "PathConfig":
        """dt = dt_factor/ρ and T such that e^{−ρT} = discount_floor, unless overridden."""
        settings = {
            "dt": dt_factor / params.rho,
            "horizon": -math.log(discount_floor) / params.rho,
        }
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)

    @property
    def steps(self) -> int:
        return max(1, math.ceil(self.horizon / self.dt - 1e-9))

    def to_dict(self) -> dict[str, Any]:
        return {
            "dt": self.dt,
            "horizon": self.horizon,
            "seed": int(self.seed),
            "paths": int(self.paths),
            "bridge_max": self.bridge_max,
        }


@dataclass
class SimEstimate:
    mean: float
    stderr: float
    paths: int
    config: PathConfig
    truncated_fraction: float = 0.0
    diagnostics: dict[str, float] = field(default_factory=dict)
    samples: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "paths": self.paths,
            "dt": self.config.dt,
            "T": self.config.horizon,
            "seed": int(self.config.seed),
            "bridge_max": self.config.bridge_max,
            "truncated_fraction": self.truncated_fraction,
            "diagnostics": dict(self.diagnostics),
        }


@dataclass
class PathRecord:
    """
    One path of X⁰ on a grid refined to contain every jump time.

    values are right-continuous (post-jump); segment_max[i] is the maximum of
    the continuous part over (t_{i−1}, t_i] before the jump at t_i.
    """

    times: np.ndarray
    values: np.ndarray
    jumps: np.ndarray
    segment_max: np.ndarray

    @property
    def x0(self) -> float:
        return float(self.values[0])

    @property
    def pre_jump(self) -> np.ndarray:
        return self.values - self.jumps


@dataclass
class ControlledPath:
    """Selling events of a barrier strategy along one path."""

    path: PathRecord
    barrier: float
    y0: float
    initial_lump: float
    continuous: np.ndarray
    lumps: np.ndarray
    lump_prices: np.ndarray
    xi: np.ndarray
    alpha: float

    @property
    def controlled_values(self) -> np.ndarray:
        """X_t = X⁰_t − α·ξ_t."""
        return self.path.values - self.alpha * self.xi

    @property
    def exhausted(self) -> bool:
        return bool(self.xi[-1] >= self.y0)


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Independent counter-based stream for one path."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.Philox(sequence))


def _arrivals(rng: np.random.Generator, intensity: float, horizon: float) -> np.ndarray:
    if intensity <= 0.0:
        return np.empty(0)
    count = rng.poisson(intensity * horizon)
    return np.sort(rng.uniform(0.0, horizon, size=count))


def simulate_path(params: ModelParams, x0: float, config: PathConfig, path_index: int) -> PathRecord:
    """Simulate X⁰ on [0, T]; deterministic given (config.seed, path_index)."""
    rng = path_rng(config.seed, path_index)
    horizon = config.horizon

    times_n = _arrivals(rng, params.lambda_n, horizon)
    sizes_n = sample_jumps(params.mix_n, rng.random(len(times_n)), rng.random(len(times_n))) if len(times_n) else np.empty(0)
    times_p = _arrivals(rng, params.lambda_p, horizon)
    sizes_p = sample_jumps(params.mix_p, rng.random(len(times_p)), rng.random(len(times_p))) if len(times_p) else np.empty(0)

    grid = np.linspace(0.0, horizon, config.steps + 1)
    times = np.union1d(grid, np.concatenate((times_n, times_p)))
    jumps = np.zeros_like(times)
    np.add.at(jumps, np.searchsorted(times, times_n), -sizes_n)
    np.add.at(jumps, np.searchsorted(times, times_p), sizes_p)

    h = np.diff(times)
    increments = params.mu * h + params.sigma * np.sqrt(h) * rng.standard_normal(len(h))
    continuous = x0 + np.concatenate(([0.0], np.cumsum(increments)))
    values = continuous + np.cumsum(jumps)
    start = values[:-1]
    end = values[1:] - jumps[1:]
    if config.bridge_max:
        u = rng.random(len(h))
        spread = np.sqrt((end - start) ** 2 - 2.0 * params.sigma ** 2 * h * np.log(u))
        inner = 0.5 * (start + end + spread)
    else:
        inner = np.maximum(start, end)
    segment_max = np.concatenate(([x0], inner))
    return PathRecord(times=times, values=values, jumps=jumps, segment_max=segment_max)


def apply_barrier(params: ModelParams, b: float, y0: float, path: PathRecord) -> ControlledPath:
    """
    Apply ξ_t = min(y0, sup_{s≤t}(X⁰_s − b)⁺/α) along a path.

    The running maximum is updated twice per step: by the continuous segment
    (sales at the pinned price b) and then by the jump at the step end (a lump
    sold at the post-jump pre-impact price).
    """
    if not b > 0.0:
        raise ValidationError(f"Barrier must be positive, got {b!r}")
    if not y0 > 0.0:
        raise ValidationError(f"Initial inventory must be positive, got {y0!r}")
    a = params.alpha

    interleaved = np.empty(2 * len(path.values) - 1)
    interleaved[0] = path.values[0]
    interleaved[1::2] = path.segment_max[1:]
    interleaved[2::2] = path.values[1:]
    level = np.maximum.accumulate(interleaved)

    def capped(x):
        return np.minimum(y0, np.maximum(x - b, 0.0) / a)

    xi = capped(level[0::2])
    xi_continuous = capped(level[1::2])
    continuous = xi_continuous - xi[:-1]
    lumps = xi[1:] - xi_continuous
    lump_prices = path.values[1:] - a * xi_continuous

    sold = lumps > 0.0
    if np.any(lump_prices[sold] < b - 1e-9 * max(1.0, abs(b))):
        raise AssertionError("lump sale below the barrier")

    return ControlledPath(
        path=path,
        barrier=b,
        y0=y0,
        initial_lump=float(xi[0]),
        continuous=continuous,
        lumps=lumps,
        lump_prices=lump_prices,
        xi=xi,
        alpha=a,
    )


def discounted_profit(params: ModelParams, controlled: ControlledPath) -> float:
    """Realized discounted profit of one controlled path."""
    a, c, rho = params.alpha, params.c, params.rho
    times = controlled.path.times
    total = (controlled.path.x0 - c) * controlled.initial_lump - 0.5 * a * controlled.initial_lump ** 2
    if controlled.initial_lump >= controlled.y0:
        return total
    midpoints = 0.5 * (times[:-1] + times[1:])
    total += (controlled.barrier - c) * float(np.sum(np.exp(-rho * midpoints) * controlled.continuous))
    lumps = controlled.lumps
    total += float(np.sum(
        np.exp(-rho * times[1:]) * ((controlled.lump_prices - c) * lumps - 0.5 * a * lumps ** 2)
    ))
    return total


def _chunks(paths: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(start, min(start + chunk_size, paths)) for start in range(0, paths, chunk_size)]


def _value_chunk(task) -> tuple[np.ndarray, np.ndarray]:
    params, x0, y0, barriers, config, start, stop = task
    samples = np.empty((stop - start, len(barriers)))
    truncated = np.zeros((stop - start, len(barriers)), dtype=bool)
    for row, index in enumerate(range(start, stop)):
        path = simulate_path(params, x0, config, index)
        for col, b in enumerate(barriers):
            controlled = apply_barrier(params, b, y0, path)
            samples[row, col] = discounted_profit(params, controlled)
            truncated[row, col] = not controlled.exhausted
    return samples, truncated


def _stopping_chunk(task) -> np.ndarray:
    params, x0, bstar, config, start, stop = task
    out = np.zeros((stop - start, 3))
    for row, index in enumerate(range(start, stop)):
        out[row] = _stopping_payoff(params, simulate_path(params, x0, config, index), bstar, config)
    return out


def _stopping_payoff(params: ModelParams, path: PathRecord, bstar: float, config: PathConfig) -> tuple[float, float, float]:
    """(discounted payoff, hit flag, overshoot-by-jump flag)."""
    x0 = path.x0
    if x0 >= bstar:
        return x0 - params.c, 1.0, 0.0
    crossed = np.flatnonzero(path.segment_max[1:] >= bstar)
    jumped = np.flatnonzero(path.values[1:] >= bstar)
    first_cross = crossed[0] if len(crossed) else np.inf
    first_jump = jumped[0] if len(jumped) else np.inf
    if first_cross == np.inf and first_jump == np.inf:
        return 0.0, 0.0, 0.0
    if first_cross <= first_jump:
        i = int(first_cross) + 1
        if config.bridge_max:
            when = 0.5 * (path.times[i - 1] + path.times[i])
            level = bstar
        else:
            when = path.times[i]
            level = path.segment_max[i]
        return math.exp(-params.rho * when) * (level - params.c), 1.0, 0.0
    i = int(first_jump) + 1
    return math.exp(-params.rho * path.times[i]) * (path.values[i] - params.c), 1.0, 1.0


def _map(worker, tasks, executor: Executor | None):
    if executor is None:
        return list(map(worker, tasks))
    return list(executor.map(worker, tasks))


def _estimate(samples: np.ndarray) -> tuple[float, float]:
    n = len(samples)
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def mc_barrier_sweep(
    params: ModelParams,
    x0: float,
    y0: float,
    barriers,
    config: PathConfig,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    keep_samples: bool = False,
    reference: float | None = None,
) -> list[SimEstimate]:
    """
    Estimates for several barriers driven by the same paths (common random numbers).

    With a reference barrier, every estimate also carries the paired difference
    against it (`paired_diff`, `paired_stderr` in its diagnostics).
    """
    barriers = tuple(float(b) for b in barriers)
    if reference is not None and float(reference) not in barriers:
        barriers = barriers + (float(reference),)
    tasks = [(params, x0, y0, barriers, config, start, stop) for start, stop in _chunks(int(config.paths), chunk_size)]
    logger.debug(f"Dispatching {len(tasks)} value chunks for barriers {barriers}")
    results = _map(_value_chunk, tasks, executor)
    samples = np.concatenate([r[0] for r in results], axis=0)
    truncated = np.concatenate([r[1] for r in results], axis=0)
    estimates = []
    for col, b in enumerate(barriers):
        mean, stderr = _estimate(samples[:, col])
        estimates.append(SimEstimate(
            mean=mean,
            stderr=stderr,
            paths=len(samples),
            config=config,
            truncated_fraction=float(np.mean(truncated[:, col])),
            diagnostics={"barrier": b, "x0": x0, "y0": y0},
            samples=samples[:, col].copy() if keep_samples else None,
        ))
        if estimates[-1].truncated_fraction > 0.01:
            logger.warning(
                f"{estimates[-1].truncated_fraction:.2%} of paths still hold inventory at T for b={b!r}"
            )
    if reference is not None:
        base = samples[:, barriers.index(float(reference))]
        for col, estimate in enumerate(estimates):
            diff_mean, diff_stderr = _estimate(samples[:, col] - base)
            estimate.diagnostics["paired_diff"] = diff_mean
            estimate.diagnostics["paired_stderr"] = diff_stderr
    return estimates


def mc_value(
    params: ModelParams,
    x0: float,
    y0: float,
    b: float,
    config: PathConfig,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    keep_samples: bool = False,
) -> SimEstimate:
    """Monte Carlo estimate of the discounted profit of the barrier strategy at b."""
    estimate = mc_barrier_sweep(params, x0, y0, (b,), config, executor, chunk_size, keep_samples)[0]
    logger.info(f"mc_value b={b!r}: mean={estimate.mean!r} stderr={estimate.stderr!r} paths={estimate.paths}")
    return estimate


def paired_difference(estimate: SimEstimate, reference: SimEstimate) -> tuple[float, float]:
    """Mean and stderr of the per-path difference of two CRN estimates."""
    if estimate.samples is None or reference.samples is None:
        raise ValidationError("paired_difference needs estimates that kept their samples")
    diff = estimate.samples - reference.samples
    return _estimate(diff)


def mc_stopping(
    params: ModelParams,
    x0: float,
    bstar: float,
    config: PathConfig,
    executor: Executor | None = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    keep_samples: bool = False,
) -> SimEstimate:
    """Estimate E[e^{−ρτ}(X_τ − c)] with τ the first entrance of X⁰ into [b*, ∞)."""
    tasks = [(params, x0, bstar, config, start, stop) for start, stop in _chunks(int(config.paths), chunk_size)]
    out = np.concatenate(_map(_stopping_chunk, tasks, executor), axis=0)
    mean, stderr = _estimate(out[:, 0])
    hits = out[:, 1]
    hit_count = float(np.sum(hits))
    estimate = SimEstimate(
        mean=mean,
        stderr=stderr,
        paths=len(out),
        config=config,
        truncated_fraction=float(1.0 - np.mean(hits)),
        diagnostics={
            "bstar": bstar,
            "x0": x0,
            "hit_fraction": float(np.mean(hits)),
            "overshoot_fraction": float(np.sum(out[:, 2]) / hit_count) if hit_count else 0.0,
        },
        samples=out[:, 0].copy() if keep_samples else None,
    )
    logger.info(f"mc_stopping x0={x0!r}: mean={mean!r} stderr={stderr!r}")
    return estimate


def moment_check(params: ModelParams, x0: float, t: float, config: PathConfig) -> dict[str, float]:
    """Sample mean and variance of X⁰_t against the compound-Poisson moments."""
    short = PathConfig(dt=min(config.dt, t), horizon=t, seed=config.seed, paths=config.paths)
    finals = np.array([simulate_path(params, x0, short, i).values[-1] for i in range(int(short.paths))])
    n = len(finals)
    mean = float(np.mean(finals))
    var = float(np.var(finals, ddof=1))
    centered = finals - mean
    fourth = float(np.mean(centered ** 4))
    expected_mean = x0 + t * (params.mu - params.lambda_n * params.mix_n.mean() + params.lambda_p * params.mix_p.mean())
    expected_var = t * (
        params.sigma ** 2
        + params.lambda_n * params.mix_n.second_moment()
        + params.lambda_p * params.mix_p.second_moment()
    )
    return {
        "mean": mean,
        "mean_stderr": math.sqrt(var / n),
        "expected_mean": expected_mean,
        "variance": var,
        "variance_stderr": math.sqrt(max(fourth - var ** 2, 0.0) / n),
        "expected_variance": expected_var,
    }
