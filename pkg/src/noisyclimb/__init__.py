"""Noise-driven reinforcement-learning mechanics: a CartPole simulator,
Hill-Climbing with adaptive noise scaling, exploration noise processes and
TD-target formulas."""
from noisyclimb.env_cartpole import Action, CartpoleConfig, CartpoleState, preset
from noisyclimb.hillclimb import ClimbConfig, TrainingLog, train

__all__ = ["Action", "CartpoleConfig", "CartpoleState", "ClimbConfig", "TrainingLog",
           "preset", "train"]
__version__ = "0.1.0"
