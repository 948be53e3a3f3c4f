"""Exploration noise: epsilon annealing, Gaussian and Ornstein-Uhlenbeck
processes, and the distance-driven adaptive perturbation scale."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EpsilonSchedule:
    m_eps: int = 100
    eps_min: float = 0.01

    def __post_init__(self):
        if self.m_eps < 1:
            raise ValueError("m_eps must be >= 1")
        if not 0.0 < self.eps_min < 1.0:
            raise ValueError("eps_min must lie in (0, 1)")


def epsilon(schedule: EpsilonSchedule, i: int) -> float:
    """Linear decay from 1 at episode 0 to ``eps_min`` at episode ``m_eps``."""
    if i < 0:
        raise ValueError("episode index must be >= 0")
    if i >= schedule.m_eps:
        # the linear term can round to just above eps_min at the cutoff
        return schedule.eps_min
    return max((schedule.eps_min - 1.0) / schedule.m_eps * i + 1.0, schedule.eps_min)


@dataclass(frozen=True)
class GaussianNoise:
    mean: float = 0.0
    std: float = 0.1

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("std must be non-negative")


def gaussian_sample(noise: GaussianNoise, rng: np.random.Generator, size=None):
    if noise.std == 0:
        return noise.mean if size is None else np.full(size, noise.mean, dtype=np.float64)
    return rng.normal(noise.mean, noise.std, size=size)


@dataclass
class OUProcess:
    """Euler-Maruyama discretisation of an Ornstein-Uhlenbeck process.

    ``x`` starts at ``mu`` unless given. The instance is mutated by
    :func:`ou_step`; give each worker its own process and generator.
    """

    theta: float = 0.15
    mu: float = 0.0
    sigma: float = 0.2
    dt: float = 1.0
    x: float | None = None

    def __post_init__(self):
        if self.theta < 0 or self.sigma < 0:
            raise ValueError("theta and sigma must be non-negative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.x is None:
            self.x = self.mu

    @property
    def stationary_variance(self) -> float:
        """Stationary variance of the discrete recursion (requires 0 < theta*dt < 2)."""
        rho = 1.0 - self.theta * self.dt
        if abs(rho) >= 1.0:
            return math.inf
        return self.sigma ** 2 * self.dt / (1.0 - rho * rho)


def ou_step(process: OUProcess, rng: np.random.Generator) -> float:
    z = rng.standard_normal()
    process.x = (process.x + process.theta * (process.mu - process.x) * process.dt
                 + process.sigma * math.sqrt(process.dt) * z)
    return process.x


def ou_path(process: OUProcess, n: int, rng: np.random.Generator) -> np.ndarray:
    """Run ``n`` steps of :func:`ou_step` and return the visited values.

    Draws all normals up front; the stream matches ``n`` single calls.
    """
    z = rng.standard_normal(n).tolist()
    out = np.empty(n)
    x, theta, mu, dt = process.x, process.theta, process.mu, process.dt
    diffusion = process.sigma * math.sqrt(dt)
    for k in range(n):
        x = x + theta * (mu - x) * dt + diffusion * z[k]
        out[k] = x
    process.x = x
    return out


def ou_reset(process: OUProcess) -> OUProcess:
    process.x = process.mu
    return process


@dataclass(frozen=True)
class AdaptiveSigma:
    sigma: float
    alpha: float = 1.01
    delta: float = 0.1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.alpha > 1:
            raise ValueError("alpha must be > 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def adaptive_sigma_update(a: AdaptiveSigma, distance: float) -> AdaptiveSigma:
    """Grow sigma by ``alpha`` while the perturbed policy stays within
    ``delta`` of the original, shrink it otherwise (including at ``delta``)."""
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance < a.delta:
        return dataclasses.replace(a, sigma=a.sigma * a.alpha)
    return dataclasses.replace(a, sigma=a.sigma / a.alpha)


def continuous_policy_distance(actions_a, actions_b) -> float:
    """Root-mean-square difference between two batches of actions."""
    a = np.asarray(actions_a, dtype=np.float64)
    b = np.asarray(actions_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"batch shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("batches must be non-empty")
    diff = np.abs(a - b)
    scale = diff.max()
    if scale == 0:
        return 0.0
    # normalise first so tiny or huge differences neither underflow nor overflow
    return float(scale * np.sqrt(np.mean((diff / scale) ** 2)))


def discrete_policy_distance(probs_a, probs_b, atol: float = 1e-9) -> float:
    """Mean total-variation distance between two batches of action distributions."""
    a = np.atleast_2d(np.asarray(probs_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(probs_b, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"batch shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("batches must be non-empty")
    for p in (a, b):
        if np.any(p < 0) or np.any(np.abs(p.sum(axis=-1) - 1.0) > atol):
            raise ValueError("each row must be a probability vector summing to 1")
    return float(np.mean(0.5 * np.abs(a - b).sum(axis=-1)))


@dataclass(frozen=True)
class OUStats:
    steps: int
    mean: float
    variance: float
    autocorr_lag1: float
    expected_variance: float
    expected_autocorr_lag1: float


def ou_monte_carlo(process: OUProcess, steps: int, rng: np.random.Generator) -> OUStats:
    """Sample mean, variance and lag-1 autocorrelation of an OU path,
    alongside the values the discrete AR(1) recursion predicts."""
    if steps < 3:
        raise ValueError("need at least 3 steps")
    path = ou_path(process, steps, rng)
    centred = path - path.mean()
    var = float(np.mean(centred * centred))
    acf = float(np.mean(centred[:-1] * centred[1:]) / var) if var > 0 else math.nan
    return OUStats(
        steps=steps,
        mean=float(path.mean()),
        variance=var,
        autocorr_lag1=acf,
        expected_variance=process.stationary_variance,
        expected_autocorr_lag1=1.0 - process.theta * process.dt,
    )
