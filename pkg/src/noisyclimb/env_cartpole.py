"""Cart-pole simulator with deterministic dynamics and v0/v1 presets.

The physics follow the classic Barto, Sutton & Anderson formulation with
explicit Euler integration. Only the episode start is random.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

SOLVE_WINDOW = 100


class InvalidStateError(ValueError):
    """Raised when a state handed to :func:`step` is not finite."""


class Action(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


class Variant(str, enum.Enum):
    V0 = "v0"
    V1 = "v1"


class CartpoleState(NamedTuple):
    x: float
    x_dot: float
    theta: float
    theta_dot: float


class StepResult(NamedTuple):
    state: CartpoleState
    reward: float
    done: bool


@dataclass(frozen=True)
class CartpoleConfig:
    gravity: float = 9.8
    cart_mass: float = 1.0
    pole_mass: float = 0.1
    pole_half_length: float = 0.5
    force_mag: float = 10.0
    tau: float = 0.02
    angle_threshold: float = math.radians(15.0)
    position_threshold: float = 2.4
    max_episode_steps: int = 200
    solve_threshold: float = 195.0
    init_bound: float = 0.05

    def __post_init__(self):
        for name in ("gravity", "cart_mass", "pole_mass", "pole_half_length",
                     "force_mag", "tau", "position_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 < self.angle_threshold < math.pi / 2:
            raise ValueError("angle_threshold must lie in (0, pi/2) radians")
        if int(self.max_episode_steps) != self.max_episode_steps or self.max_episode_steps < 1:
            raise ValueError("max_episode_steps must be an integer >= 1")
        if self.init_bound < 0:
            raise ValueError("init_bound must be non-negative")
        object.__setattr__(self, "max_episode_steps", int(self.max_episode_steps))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CartpoleConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown cart-pole config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CartpoleConfig":
        return cls.from_dict(json.loads(text))


def preset(variant: Variant | str) -> CartpoleConfig:
    """Return the configuration for CartPole-v0 or CartPole-v1.

    The two variants share all physics and termination thresholds and differ
    only in episode length and the score needed to count as solved.
    """
    variant = Variant(variant.lower() if isinstance(variant, str) else variant)
    if variant is Variant.V0:
        return CartpoleConfig(max_episode_steps=200, solve_threshold=195.0)
    return CartpoleConfig(max_episode_steps=500, solve_threshold=475.0)


def reset(config: CartpoleConfig, rng: np.random.Generator) -> CartpoleState:
    b = config.init_bound
    x, x_dot, theta, theta_dot = rng.uniform(-b, b, size=4)
    return CartpoleState(float(x), float(x_dot), float(theta), float(theta_dot))


def step(config: CartpoleConfig, state: CartpoleState, action: Action | int,
         steps_taken: int) -> StepResult:
    """Advance the simulation by one Euler step of length ``config.tau``.

    ``steps_taken`` counts the steps already taken in this episode and is
    used for truncation at ``max_episode_steps``. Every step, including the
    terminating one, earns a reward of 1.
    """
    x, x_dot, theta, theta_dot = state
    if not (math.isfinite(x) and math.isfinite(x_dot)
            and math.isfinite(theta) and math.isfinite(theta_dot)):
        raise InvalidStateError(f"non-finite cart-pole state: {state!r}")
    if steps_taken >= config.max_episode_steps:
        raise ValueError("episode already reached max_episode_steps")

    force = config.force_mag if action == Action.RIGHT else -config.force_mag
    total_mass = config.cart_mass + config.pole_mass
    polemass_length = config.pole_mass * config.pole_half_length
    cos_th = math.cos(theta)
    sin_th = math.sin(theta)

    temp = (force + polemass_length * theta_dot * theta_dot * sin_th) / total_mass
    theta_acc = (config.gravity * sin_th - cos_th * temp) / (
        config.pole_half_length
        * (4.0 / 3.0 - config.pole_mass * cos_th * cos_th / total_mass)
    )
    x_acc = temp - polemass_length * theta_acc * cos_th / total_mass

    nxt = CartpoleState(
        x + config.tau * x_dot,
        x_dot + config.tau * x_acc,
        theta + config.tau * theta_dot,
        theta_dot + config.tau * theta_acc,
    )
    done = (
        abs(nxt.theta) > config.angle_threshold
        or abs(nxt.x) > config.position_threshold
        or steps_taken + 1 >= config.max_episode_steps
    )
    return StepResult(nxt, 1.0, bool(done))


def is_solved(scores: Sequence[float], solve_threshold: float) -> bool:
    """True once the mean of the last 100 scores reaches the threshold."""
    if len(scores) < SOLVE_WINDOW:
        return False
    return float(np.mean(list(scores)[-SOLVE_WINDOW:])) >= solve_threshold
