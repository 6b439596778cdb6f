"""Command-line entry point: parse experiment configs, run, emit CSV/JSON.

The CSV carries one row per logged timestep with header
``t,mean_regret,min_regret,max_regret[,bound]``; timesteps are geometrically
thinned ({m * 10^d <= T} plus T itself) so log-scale plots stay dense early
without a hundred thousand rows. The JSON sidecar echoes the full config (it
can be fed back through --config to reproduce the CSV byte for byte), the
derived privacy report, and the master seed.
"""

import argparse
import json
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from . import bounds
from .accountant import PrivacySpec, calibrate_epsilon, total_privacy_closed, total_privacy_exact
from .harness import BanditInstance, ExperimentSummary, run_experiment
from .interval import SCHEDULE_VARIANTS, ReleaseSchedule
from .policies import VARIANTS, PolicyConfig

_EXP_PATTERN = re.compile(r"^exp\((-?\d+(?:\.\d+)?)\)$")


def parse_delta(text: str) -> float:
    """Parse a delta value given as a float literal or literally as exp(-k)."""
    match = _EXP_PATTERN.match(text.strip())
    if match:
        return math.exp(float(match.group(1)))
    return float(text)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: policy, instance, horizon, and output options."""

    algo: str
    arms: tuple[float, ...]
    horizon: int = 100_000
    runs: int = 100
    seed: int = 0
    epsilon: float | None = None
    target_epsilon: float | None = None
    target_delta: float = math.exp(-10)
    v: float = 1.1
    schedule: str = "simple"
    lambda0: float = 0.5
    out: str | None = None
    with_bound: bool = False
    workers: int = 1

    def mechanism_epsilon(self) -> float | None:
        """Per-mechanism epsilon actually handed to the policy."""
        if self.algo == "ucb":
            return None
        if self.algo == "dp-ucb-int" and self.target_epsilon is not None:
            return calibrate_epsilon(self.target_epsilon, self.target_delta, self.v)
        return self.epsilon

    def policy_config(self) -> PolicyConfig:
        if self.algo == "ucb":
            return PolicyConfig(kind="ucb")
        if self.algo == "dp-ucb-int":
            return PolicyConfig(kind="dp-ucb-int", epsilon=self.mechanism_epsilon(),
                                v=self.v, schedule=self.schedule)
        return PolicyConfig(kind=self.algo, epsilon=self.epsilon)

    def instance(self) -> BanditInstance:
        return BanditInstance(means=self.arms)

    def echo(self) -> dict:
        """Mapping sufficient to rerun this experiment exactly."""
        return asdict(self)


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Validate a key-value mapping (config file or echo) into a config.

    Raises ValueError messages that name the offending key.
    """
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "algo" not in mapping:
        raise ValueError("algo is required")
    algo = mapping["algo"]
    if algo not in VARIANTS:
        raise ValueError(f"algo must be one of {VARIANTS}, got {algo!r}")
    if "arms" not in mapping or mapping["arms"] is None:
        raise ValueError("arms is required")
    arms = mapping["arms"]
    if isinstance(arms, str):
        try:
            arms = tuple(float(x) for x in arms.split(","))
        except ValueError:
            raise ValueError(f"arms must be comma-separated floats, got {arms!r}") from None
    else:
        arms = tuple(float(x) for x in arms)
    if not arms or any(not 0.0 <= m <= 1.0 for m in arms):
        raise ValueError(f"arms must be nonempty with means in [0, 1], got {arms}")

    values = dict(mapping)
    values["algo"] = algo
    values["arms"] = arms
    if isinstance(values.get("target_delta"), str):
        values["target_delta"] = parse_delta(values["target_delta"])
    config = ExperimentConfig(**values)

    if config.horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {config.horizon}")
    if config.runs < 1:
        raise ValueError(f"runs must be >= 1, got {config.runs}")
    if config.seed < 0:
        raise ValueError(f"seed must be >= 0, got {config.seed}")
    if config.workers < 1:
        raise ValueError(f"workers must be >= 1, got {config.workers}")
    if not 0.0 < config.lambda0 < 1.0:
        raise ValueError(f"lambda0 must lie in (0, 1), got {config.lambda0}")
    if algo == "ucb":
        if config.epsilon is not None or config.target_epsilon is not None:
            raise ValueError("ucb takes neither epsilon nor target_epsilon")
    elif algo in ("dp-ucb", "dp-ucb-bound"):
        if config.target_epsilon is not None:
            raise ValueError(f"target_epsilon applies only to dp-ucb-int, not {algo}")
        if config.epsilon is None or not config.epsilon > 0:
            raise ValueError(f"{algo} needs a positive epsilon, got {config.epsilon}")
    else:  # dp-ucb-int
        if (config.epsilon is None) == (config.target_epsilon is None):
            raise ValueError(
                "dp-ucb-int needs exactly one of epsilon and target_epsilon")
        if config.epsilon is not None and not 0.0 < config.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1] for dp-ucb-int, got {config.epsilon}")
        if config.target_epsilon is not None and not 0.0 < config.target_epsilon <= 1.0:
            raise ValueError(f"target_epsilon must lie in (0, 1], got {config.target_epsilon}")
        if not 0.0 < config.target_delta <= 1.0:
            raise ValueError(f"target_delta must lie in (0, 1], got {config.target_delta}")
        if not 1.0 < config.v <= 1.5:
            raise ValueError(f"v must lie in (1, 1.5], got {config.v}")
        if config.schedule not in SCHEDULE_VARIANTS:
            raise ValueError(f"schedule must be one of {SCHEDULE_VARIANTS}, got {config.schedule!r}")
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpbandits",
        description="Run differentially private UCB bandit experiments.")
    parser.add_argument("--config", type=Path,
                        help="JSON file with the same keys as the flags; flags override it")
    parser.add_argument("--algo", choices=VARIANTS)
    parser.add_argument("--arms", help="comma-separated arm means, e.g. 0.9,0.6")
    parser.add_argument("--T", dest="horizon", type=int, help="time horizon (default 100000)")
    parser.add_argument("--runs", type=int, help="independent runs to average (default 100)")
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--eps", dest="epsilon", type=float,
                        help="mechanism-level epsilon (dp-ucb, dp-ucb-bound, dp-ucb-int)")
    parser.add_argument("--target-eps", dest="target_epsilon", type=float,
                        help="run-level target epsilon' (dp-ucb-int only)")
    parser.add_argument("--delta", dest="target_delta",
                        help="target delta', a float or literally exp(-k) (default exp(-10))")
    parser.add_argument("--v", type=float, help="noise-decay exponent in (1, 1.5] (default 1.1)")
    parser.add_argument("--schedule", choices=SCHEDULE_VARIANTS,
                        help="release schedule for dp-ucb-int (default simple)")
    parser.add_argument("--lambda0", type=float,
                        help="split parameter of the dp-ucb-bound regret bound (default 0.5)")
    parser.add_argument("--out", help="output path prefix; writes PREFIX.csv and PREFIX.json")
    parser.add_argument("--with-bound", dest="with_bound", action="store_true", default=None,
                        help="add the theoretical regret bound column to the CSV")
    parser.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    return parser


def parse_config(args=None) -> ExperimentConfig:
    """Parse flags (and an optional config file) into a validated config."""
    parser = _build_parser()
    ns = parser.parse_args(args)
    mapping: dict = {}
    if ns.config is not None:
        try:
            mapping.update(json.loads(Path(ns.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"--config: {exc}")
    for key in ExperimentConfig.__dataclass_fields__:
        value = getattr(ns, key, None)
        if value is not None:
            mapping[key] = value
    if isinstance(mapping.get("target_delta"), str):
        try:
            mapping["target_delta"] = parse_delta(mapping["target_delta"])
        except ValueError:
            parser.error(f"--delta: cannot parse {mapping['target_delta']!r}")
    try:
        return config_from_mapping(mapping)
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))


def logged_steps(horizon: int) -> list[int]:
    """Geometric logging schedule: {m * 10^d <= horizon} plus the horizon itself."""
    steps = []
    scale = 1
    while scale <= horizon:
        for m in range(1, 10):
            t = m * scale
            if t > horizon:
                break
            steps.append(t)
        scale *= 10
    if steps[-1] != horizon:
        steps.append(horizon)
    return steps


def _bound_at(config: ExperimentConfig, t: int) -> float:
    gaps = bounds.GapProfile(means=config.arms)
    if config.algo == "ucb":
        return bounds.regret_bound_ucb(t, gaps)
    if config.algo == "dp-ucb":
        return bounds.regret_bound_dpucb(t, config.epsilon, gaps)
    if config.algo == "dp-ucb-bound":
        return bounds.regret_bound_dpucb_bound(t, config.epsilon, config.lambda0, gaps)
    schedule = ReleaseSchedule(epsilon=config.mechanism_epsilon(), v=config.v,
                               variant=config.schedule)
    return bounds.regret_bound_interval(t, schedule.f0, gaps)


def privacy_report(config: ExperimentConfig) -> dict:
    """Privacy guarantees of the configured run at its horizon."""
    if config.algo == "ucb":
        return {"private": False}
    if config.algo in ("dp-ucb", "dp-ucb-bound"):
        return {"private": True, "epsilon": config.epsilon, "delta": 0.0}
    eps = config.mechanism_epsilon()
    spec = PrivacySpec(epsilon=eps, v=config.v, target_delta=config.target_delta,
                       target_epsilon=config.target_epsilon)
    schedule = ReleaseSchedule(epsilon=eps, v=config.v, variant=config.schedule)
    report = {
        "private": True,
        "mechanism_epsilon": eps,
        "v": config.v,
        "target_delta": config.target_delta,
        "release_interval_f0": schedule.f0,
        "total_privacy_exact": total_privacy_exact(config.horizon, spec),
        "total_privacy_closed": total_privacy_closed(spec, config.horizon),
    }
    if config.target_epsilon is not None:
        report["target_epsilon"] = config.target_epsilon
    return report


def _require_finite(value: float, context: str) -> float:
    if not math.isfinite(value):
        raise ValueError(f"non-finite value in {context}: {value}")
    return value


def emit_results(summary: ExperimentSummary, config: ExperimentConfig,
                 out_prefix: str) -> tuple[Path, Path]:
    """Write PREFIX.csv and the PREFIX.json sidecar; returns both paths."""
    csv_path = Path(f"{out_prefix}.csv")
    json_path = Path(f"{out_prefix}.json")
    steps = logged_steps(config.horizon)
    header = "t,mean_regret,min_regret,max_regret"
    if config.with_bound:
        header += ",bound"
    lines = [header]
    for t in steps:
        i = t - 1
        row = [
            str(t),
            repr(_require_finite(float(summary.mean_regret[i]), f"mean_regret at t={t}")),
            repr(_require_finite(float(summary.min_regret[i]), f"min_regret at t={t}")),
            repr(_require_finite(float(summary.max_regret[i]), f"max_regret at t={t}")),
        ]
        if config.with_bound:
            row.append(repr(_require_finite(float(_bound_at(config, t)), f"bound at t={t}")))
        lines.append(",".join(row))
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "config": config.echo(),
        "seed": config.seed,
        "privacy": {k: _require_finite(v, f"privacy.{k}") if isinstance(v, float) else v
                    for k, v in privacy_report(config).items()},
        "final_spread": _require_finite(summary.final_spread, "final_spread"),
        "csv": str(csv_path),
    }
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def run_config(config: ExperimentConfig) -> ExperimentSummary:
    """Execute the configured experiment."""
    return run_experiment(config.policy_config(), config.instance(), config.horizon,
                          config.runs, config.seed, workers=config.workers,
                          config_echo=config.echo())


def main(args=None) -> int:
    config = parse_config(args)
    eps = config.mechanism_epsilon()
    if config.algo == "dp-ucb-int" and config.target_epsilon is not None:
        print(f"mechanism epsilon = {eps!r} (calibrated from target "
              f"epsilon'={config.target_epsilon}, delta'={config.target_delta}, v={config.v})")
    summary = run_config(config)
    final = summary.mean_regret[-1]
    print(f"{config.algo}: mean final pseudo-regret {final:.2f} over {config.runs} runs "
          f"(min {summary.min_regret[-1]:.2f}, max {summary.max_regret[-1]:.2f}, "
          f"spread {summary.final_spread:.2f})")
    if config.out:
        csv_path, json_path = emit_results(summary, config, config.out)
        print(f"wrote {csv_path} and {json_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
