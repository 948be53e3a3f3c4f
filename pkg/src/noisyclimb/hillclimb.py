"""Hill-Climbing over the policy weight matrix with adaptive noise scaling.

Every episode evaluates one candidate matrix. When the candidate's
discounted return is at least the best seen so far it becomes the new best
and the noise scale shrinks by ``scale_factor``; otherwise the candidate is
discarded and the noise scale grows. The next candidate is always the best
matrix plus ``noise_scale`` times an elementwise uniform [0, 1) factor.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from noisyclimb import env_cartpole
from noisyclimb.env_cartpole import CartpoleConfig
from noisyclimb.policy import GreedyPolicy
from noisyclimb.td_targets import discounted_return

CSV_HEADER = ("episode", "score", "g0", "avg100", "noise_scale")


@dataclass(frozen=True)
class ClimbConfig:
    gamma: float = 1.0
    noise_init: float = 1e-2
    noise_min: float = 1e-3
    noise_max: float = 2.0
    scale_factor: float = 2.0
    max_episodes: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0.0 < self.noise_min <= self.noise_init <= self.noise_max:
            raise ValueError("need 0 < noise_min <= noise_init <= noise_max")
        if not self.scale_factor > 1.0:
            raise ValueError("scale_factor must be > 1")
        if int(self.max_episodes) != self.max_episodes or self.max_episodes < 0:
            raise ValueError("max_episodes must be a non-negative integer")
        object.__setattr__(self, "max_episodes", int(self.max_episodes))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ClimbConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown climb config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ClimbState:
    best_w: np.ndarray
    best_return: float
    noise_scale: float
    episode: int = 0


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    score: int
    g0: float
    avg100: float
    noise_scale: float


@dataclass
class TrainingLog:
    records: list[EpisodeRecord] = field(default_factory=list)
    solved_at: Optional[int] = None

    @property
    def solved(self) -> bool:
        return self.solved_at is not None

    @property
    def noise_trace(self) -> list[float]:
        return [r.noise_scale for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.records:
            # repr() is the shortest exact round-trip form of a float
            writer.writerow([r.episode, r.score, repr(r.g0), repr(r.avg100),
                             repr(r.noise_scale)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, solve_threshold: Optional[float] = None) -> "TrainingLog":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ValueError("missing or unexpected training log header")
        records = [
            EpisodeRecord(int(e), int(s), float(g), float(a), float(n))
            for e, s, g, a, n in rows[1:]
        ]
        solved_at = None
        if solve_threshold is not None:
            solved_at = next((r.episode for r in records
                              if r.episode >= env_cartpole.SOLVE_WINDOW
                              and r.avg100 >= solve_threshold), None)
        return cls(records, solved_at)


def perturb(best_w: np.ndarray, noise_scale: float, rng: np.random.Generator) -> np.ndarray:
    if noise_scale < 0:
        raise ValueError("noise_scale must be non-negative")
    return best_w + noise_scale * rng.random(best_w.shape)


def update(state: ClimbState, candidate_w: np.ndarray, candidate_return: float,
           config: ClimbConfig) -> ClimbState:
    if candidate_return >= state.best_return:
        return ClimbState(
            best_w=candidate_w,
            best_return=candidate_return,
            noise_scale=max(config.noise_min, state.noise_scale / config.scale_factor),
            episode=state.episode + 1,
        )
    return ClimbState(
        best_w=state.best_w,
        best_return=state.best_return,
        noise_scale=min(config.noise_max, state.noise_scale * config.scale_factor),
        episode=state.episode + 1,
    )


def initial_state(config: ClimbConfig, rng: np.random.Generator) -> ClimbState:
    w0 = config.noise_init * rng.random((4, 2))
    return ClimbState(best_w=w0, best_return=-math.inf, noise_scale=config.noise_init)


def run_episode(env_config: CartpoleConfig, w: np.ndarray,
                rng: np.random.Generator) -> list[float]:
    """Roll out the greedy policy for one episode and return its rewards."""
    policy = GreedyPolicy(w)
    state = env_cartpole.reset(env_config, rng)
    rewards = []
    for t in range(env_config.max_episode_steps):
        result = env_cartpole.step(env_config, state, policy(state), t)
        rewards.append(result.reward)
        state = result.state
        if result.done:
            break
    return rewards


def train(env_config: CartpoleConfig, climb_config: ClimbConfig) -> TrainingLog:
    rng = np.random.default_rng(climb_config.seed)
    log = TrainingLog()
    if climb_config.max_episodes == 0:
        return log

    state = initial_state(climb_config, rng)
    candidate = state.best_w
    window: deque[int] = deque(maxlen=env_cartpole.SOLVE_WINDOW)
    for episode in range(1, climb_config.max_episodes + 1):
        rewards = run_episode(env_config, candidate, rng)
        score = len(rewards)
        g0 = discounted_return(rewards, climb_config.gamma)
        state = update(state, candidate, g0, climb_config)

        window.append(score)
        avg = sum(window) / len(window)
        log.records.append(EpisodeRecord(episode, score, g0, avg, state.noise_scale))
        if env_cartpole.is_solved(window, env_config.solve_threshold):
            log.solved_at = episode
            break
        candidate = perturb(state.best_w, state.noise_scale, rng)
    return log


def config_document(env_config: CartpoleConfig, climb_config: ClimbConfig) -> dict:
    return {"env": env_config.to_dict(), "climb": climb_config.to_dict()}


def configs_from_document(doc: dict) -> tuple[CartpoleConfig, ClimbConfig]:
    return CartpoleConfig.from_dict(doc["env"]), ClimbConfig.from_dict(doc["climb"])


def dump_configs(env_config: CartpoleConfig, climb_config: ClimbConfig) -> str:
    return json.dumps(config_document(env_config, climb_config), indent=2)


def load_configs(text: str) -> tuple[CartpoleConfig, ClimbConfig]:
    return configs_from_document(json.loads(text))

