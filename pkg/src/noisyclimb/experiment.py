"""Single runs and multi-seed sweeps of the hill climber."""
from __future__ import annotations

import dataclasses
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from noisyclimb.env_cartpole import CartpoleConfig
from noisyclimb.hillclimb import ClimbConfig, TrainingLog, config_document, train


@dataclass(frozen=True)
class RunSummary:
    seed: int
    solved_at: Optional[int]
    final_avg100: Optional[float]
    episodes_run: int
    wall_time: float


@dataclass(frozen=True)
class SweepSummary:
    runs: list[RunSummary]
    median_solved_at: Optional[float]
    solve_rate: float

    def to_dict(self, include_timing: bool = True) -> dict:
        runs = [dataclasses.asdict(r) for r in self.runs]
        if not include_timing:
            for r in runs:
                r.pop("wall_time")
        return {"runs": runs, "median_solved_at": self.median_solved_at,
                "solve_rate": self.solve_rate}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_runs(cls, runs: list[RunSummary]) -> "SweepSummary":
        solved = [r.solved_at for r in runs if r.solved_at is not None]
        median = float(statistics.median(solved)) if solved else None
        rate = len(solved) / len(runs) if runs else 0.0
        return cls(list(runs), median, rate)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSummary":
        runs = [RunSummary(**{"wall_time": 0.0, **r}) for r in data["runs"]]
        return cls(runs, data["median_solved_at"], data["solve_rate"])


def run_one(env_config: CartpoleConfig, climb_config: ClimbConfig) -> tuple[RunSummary, TrainingLog]:
    start = time.perf_counter()
    log = train(env_config, climb_config)
    elapsed = time.perf_counter() - start
    summary = RunSummary(
        seed=climb_config.seed,
        solved_at=log.solved_at,
        final_avg100=log.records[-1].avg100 if log.records else None,
        episodes_run=len(log.records),
        wall_time=elapsed,
    )
    return summary, log


def _run_job(job):
    return run_one(*job)


def run_sweep(env_config: CartpoleConfig, climb_config: ClimbConfig, n_seeds: int,
              workers: int = 1) -> tuple[SweepSummary, list[TrainingLog]]:
    """Train with seeds ``climb_config.seed + i`` for ``i < n_seeds``.

    With ``workers > 1`` runs are spread over processes. Each run owns its
    generator, so results are the same as a serial sweep and are returned
    in seed order.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    jobs = [(env_config, dataclasses.replace(climb_config, seed=climb_config.seed + i))
            for i in range(n_seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]
    summaries = [s for s, _ in results]
    logs = [log for _, log in results]
    return SweepSummary.from_runs(summaries), logs


def run_manifest(env_config: CartpoleConfig, climb_config: ClimbConfig,
                 log: TrainingLog) -> dict:
    doc = config_document(env_config, climb_config)
    doc["seed"] = climb_config.seed
    doc["solved_at"] = log.solved_at
    doc["episodes_run"] = len(log.records)
    return doc
