"""Linear softmax policy over a 4x2 weight matrix (no hidden layers, no bias)."""
from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np

from noisyclimb.env_cartpole import Action

N_INPUTS = 4
N_ACTIONS = 2


def as_weights(w) -> np.ndarray:
    """Validate and copy ``w`` into a float64 array of shape (4, 2)."""
    arr = np.array(w, dtype=np.float64)
    if arr.shape != (N_INPUTS, N_ACTIONS):
        raise ValueError(f"weight matrix must have shape (4, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("weight matrix entries must be finite")
    return arr


def _softmax_pair(l0: float, l1: float) -> tuple[float, float]:
    m = l0 if l0 >= l1 else l1
    e0 = math.exp(l0 - m)
    e1 = math.exp(l1 - m)
    total = e0 + e1
    return e0 / total, e1 / total


def _logits(rows, state: Sequence[float]) -> tuple[float, float]:
    l0 = 0.0
    l1 = 0.0
    for s, (w0, w1) in zip(state, rows):
        l0 += s * w0
        l1 += s * w1
    return l0, l1


def action_probabilities(w: np.ndarray, state: Sequence[float]) -> tuple[float, float]:
    """Softmax of ``state @ w``, stabilised by subtracting the larger logit."""
    rows = np.asarray(w, dtype=np.float64).tolist()
    return _softmax_pair(*_logits(rows, state))


def greedy(probs: tuple[float, float]) -> Action:
    # ties go to LEFT
    return Action.RIGHT if probs[1] > probs[0] else Action.LEFT


def act(w: np.ndarray, state: Sequence[float]) -> Action:
    return greedy(action_probabilities(w, state))


class GreedyPolicy:
    """Rollout helper that caches ``w`` as Python floats.

    Produces exactly the same actions as :func:`act`; it only avoids
    converting the numpy matrix on every step.
    """

    def __init__(self, w: np.ndarray):
        self.w = as_weights(w)
        self._rows = self.w.tolist()

    def __call__(self, state: Sequence[float]) -> Action:
        return greedy(_softmax_pair(*_logits(self._rows, state)))


def weights_to_json(w: np.ndarray) -> str:
    return json.dumps(as_weights(w).tolist())


def weights_from_json(text: str) -> np.ndarray:
    return as_weights(json.loads(text))
