"""TD-target formulas and a Monte Carlo estimate of max-operator bias.

All argmax operations break ties toward the lowest action index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TARGET_NOISE_STD = 0.2
DEFAULT_TARGET_NOISE_CLIP = 0.5
_BIAS_CHUNK = 1_000_000


@dataclass(frozen=True)
class TargetParams:
    reward: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not math.isfinite(self.reward):
            raise ValueError("reward must be finite")


class BiasEstimate(NamedTuple):
    bias: float
    std_err: float
    trials: int


def _row(q) -> np.ndarray:
    arr = np.asarray(q, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a Q row must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Q values must be finite")
    return arr


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Sum of ``gamma**k * rewards[k]``; zero for an empty sequence."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    total = 0.0
    discount = 1.0
    for r in rewards:
        total += discount * r
        discount *= gamma
    return total


def dqn_target(p: TargetParams, q_next) -> float:
    """``r + gamma * max_a Q(s', a)``: selection and evaluation on one row."""
    return p.reward + p.gamma * float(np.max(_row(q_next)))


def double_dqn_target(p: TargetParams, q_next_current, q_next_target) -> float:
    """Select the action with the current network, evaluate it with the target one."""
    cur = _row(q_next_current)
    tgt = _row(q_next_target)
    if cur.shape != tgt.shape:
        raise ValueError(f"Q rows differ in length: {cur.size} vs {tgt.size}")
    a_star = int(np.argmax(cur))
    return p.reward + p.gamma * float(tgt[a_star])


def twin_min_target(p: TargetParams, q1: float, q2: float) -> float:
    return p.reward + p.gamma * min(float(q1), float(q2))


def sarsamax_update(q: float, alpha: float, g: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return q + alpha * (g - q)


def smoothed_target_action(action, rng: np.random.Generator, low, high,
                           std: float = DEFAULT_TARGET_NOISE_STD,
                           clip: float = DEFAULT_TARGET_NOISE_CLIP) -> np.ndarray:
    """Add clipped Gaussian noise to a target action, then clamp to bounds.

    The noise is clipped to ``[-clip, clip]`` per component before being
    added, so smoothing never moves an action further than ``clip``.
    """
    a = np.asarray(action, dtype=np.float64)
    lo = np.broadcast_to(np.asarray(low, dtype=np.float64), a.shape)
    hi = np.broadcast_to(np.asarray(high, dtype=np.float64), a.shape)
    if std < 0 or clip < 0:
        raise ValueError("std and clip must be non-negative")
    if np.any(lo > hi) or np.any(a < lo) or np.any(a > hi):
        raise ValueError("action lies outside [low, high]")
    if std == 0:
        return a.copy()
    noise = np.clip(rng.normal(0.0, std, size=a.shape), -clip, clip)
    return np.clip(a + noise, lo, hi)


def overestimation_bias_experiment(n_actions: int, noise_std: float, true_q,
                                   trials: int, rng: np.random.Generator) -> BiasEstimate:
    """Estimate ``E[max_a (Q(a) + eps_a)] - max_a Q(a)`` with ``eps_a ~ N(0, noise_std^2)``.

    Samples are drawn in fixed-size chunks so memory stays bounded and the
    result depends only on the generator state, not on the machine.
    """
    q = _row(true_q)
    if n_actions < 1 or q.size != n_actions:
        raise ValueError("true_q must have exactly n_actions >= 1 entries")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")

    q_max = float(q.max())
    total = 0.0
    total_sq = 0.0
    remaining = trials
    while remaining:
        n = min(remaining, _BIAS_CHUNK)
        noisy = q + rng.normal(0.0, noise_std, size=(n, n_actions))
        excess = noisy.max(axis=1) - q_max
        total += float(excess.sum())
        total_sq += float(np.dot(excess, excess))
        remaining -= n

    mean = total / trials
    if trials > 1:
        var = max(total_sq - trials * mean * mean, 0.0) / (trials - 1)
        std_err = math.sqrt(var / trials)
    else:
        std_err = float("inf")
    return BiasEstimate(mean, std_err, trials)
