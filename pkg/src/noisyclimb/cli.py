"""Command-line entry point: ``noisyclimb {train,sweep,schedule,demo-bias,ou-stats}``.

Exit codes: 0 solved (or success), 2 not solved within ``--max-episodes``,
1 usage error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from noisyclimb import env_cartpole, exploration, td_targets
from noisyclimb.experiment import run_manifest, run_one, run_sweep
from noisyclimb.hillclimb import ClimbConfig, configs_from_document

SEED_ENV_VAR = "NOISYCLIMB_SEED"
EXIT_SOLVED = 0
EXIT_USAGE = 1
EXIT_UNSOLVED = 2

_CLIMB_FLAGS = ("gamma", "noise_init", "noise_min", "noise_max", "scale_factor", "max_episodes")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(float(text))
    if value < 1 or value != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _count(text: str) -> int:
    value = int(float(text))
    if value < 0 or value != float(text):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _add_climb_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", choices=["v0", "v1"], default=None,
                   help="CartPole preset (default v0)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--noise-init", type=float)
    p.add_argument("--noise-min", type=float)
    p.add_argument("--noise-max", type=float)
    p.add_argument("--scale-factor", type=float)
    p.add_argument("--max-episodes", type=_count)
    p.add_argument("--angle-threshold-deg", type=float,
                   help="override the pole angle limit (default 15 degrees)")
    p.add_argument("--seed", type=int,
                   help=f"generator seed (default ${SEED_ENV_VAR}, else 0)")
    p.add_argument("--config", type=Path,
                   help="JSON config or run manifest to start from; flags override it")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _configs_from_args(args) -> tuple[env_cartpole.CartpoleConfig, ClimbConfig]:
    if args.config is not None:
        try:
            env_cfg, climb_cfg = configs_from_document(json.loads(args.config.read_text()))
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if args.env is not None:
            preset = env_cartpole.preset(args.env)
            env_cfg = dataclasses.replace(env_cfg, max_episode_steps=preset.max_episode_steps,
                                          solve_threshold=preset.solve_threshold)
    else:
        env_cfg = env_cartpole.preset(args.env or "v0")
        climb_cfg = ClimbConfig()

    if args.angle_threshold_deg is not None:
        env_cfg = dataclasses.replace(env_cfg,
                                      angle_threshold=math.radians(args.angle_threshold_deg))
    overrides = {name: getattr(args, name) for name in _CLIMB_FLAGS
                 if getattr(args, name) is not None}
    if args.seed is not None:
        overrides["seed"] = args.seed
    elif args.config is None:
        overrides["seed"] = _default_seed()
    return env_cfg, dataclasses.replace(climb_cfg, **overrides)


def cmd_train(args) -> int:
    env_cfg, climb_cfg = _configs_from_args(args)
    _, log = run_one(env_cfg, climb_cfg)
    out = Path(args.out)
    log.write_csv(out)
    manifest = Path(args.manifest) if args.manifest else out.with_suffix(".json")
    manifest.write_text(json.dumps(run_manifest(env_cfg, climb_cfg, log), indent=2) + "\n")
    status = f"solved at episode {log.solved_at}" if log.solved else "not solved"
    print(f"seed {climb_cfg.seed}: {status} after {len(log.records)} episodes; "
          f"log {out}, manifest {manifest}", file=sys.stderr)
    return EXIT_SOLVED if log.solved else EXIT_UNSOLVED


def cmd_sweep(args) -> int:
    env_cfg, climb_cfg = _configs_from_args(args)
    summary, logs = run_sweep(env_cfg, climb_cfg, args.seeds, workers=args.workers)
    if args.logs_dir is not None:
        args.logs_dir.mkdir(parents=True, exist_ok=True)
        for run, log in zip(summary.runs, logs):
            log.write_csv(args.logs_dir / f"seed_{run.seed}.csv")
    doc = summary.to_dict()
    doc["config"] = {"env": env_cfg.to_dict(), "climb": climb_cfg.to_dict()}
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"solve_rate {summary.solve_rate:.3f}, median_solved_at "
          f"{summary.median_solved_at}; summary {args.out}", file=sys.stderr)
    return 0


def cmd_schedule(args) -> int:
    try:
        schedule = exploration.EpsilonSchedule(args.m_eps, args.eps_min)
    except ValueError as exc:
        raise UsageError(str(exc))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["i", "epsilon"])
    for i in range(schedule.m_eps + args.extra + 1):
        writer.writerow([i, f"{exploration.epsilon(schedule, i):.12g}"])
    return 0


def cmd_demo_bias(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n_actions", "noise_std", "bias", "std_err", "trials"])
    for n in args.n:
        rng = np.random.default_rng([seed, n])
        est = td_targets.overestimation_bias_experiment(
            n, args.std, np.zeros(n), args.trials, rng)
        writer.writerow([n, repr(args.std), repr(est.bias), repr(est.std_err), est.trials])
    return 0


def cmd_ou_stats(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        process = exploration.OUProcess(theta=args.theta, mu=args.mu,
                                        sigma=args.sigma, dt=args.dt)
    except ValueError as exc:
        raise UsageError(str(exc))
    stats = exploration.ou_monte_carlo(process, args.steps, np.random.default_rng(seed))
    row = dataclasses.asdict(stats)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(list(row))
    writer.writerow([v if isinstance(v, int) else repr(v) for v in row.values()])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noisyclimb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run Hill-Climbing once and write the training log")
    _add_climb_flags(p)
    p.add_argument("--out", default="run.csv", help="training log CSV path")
    p.add_argument("--manifest", help="run manifest path (default: --out with .json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="train over consecutive seeds and summarise")
    _add_climb_flags(p)
    p.add_argument("--seeds", type=_positive_int, default=20, help="number of seeds")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", default="sweep.json", help="summary JSON path")
    p.add_argument("--logs-dir", type=Path, help="also write one CSV log per seed here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("schedule", help="print the epsilon annealing table as CSV")
    p.add_argument("--m-eps", type=_positive_int, default=100)
    p.add_argument("--eps-min", type=float, default=0.01)
    p.add_argument("--extra", type=_count, default=20,
                   help="rows to print past the cutoff episode")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("demo-bias", help="Monte Carlo overestimation bias of the max operator")
    p.add_argument("--n", type=_positive_int, nargs="+", default=[1, 2, 5, 10, 50],
                   help="numbers of actions to sweep")
    p.add_argument("--std", type=float, default=1.0)
    p.add_argument("--trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_demo_bias)

    p = sub.add_parser("ou-stats", help="Monte Carlo statistics of the OU process")
    p.add_argument("--theta", type=float, default=0.15)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--steps", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_ou_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        # invalid flag combinations surface as config validation errors
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
