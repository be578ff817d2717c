"""Experiment configs, sweep runners and CSV emission.

Config files are line-oriented ``key = value`` documents with one
``[component]`` block per summand:

    gamma_grid_db = 20:1:32
    runs = 1000000
    seed = 7
    methods = conventional,improved

    [component]
    family = weibull
    k = 0.4
    beta = 1

    [component]
    family = weibull
    k = 0.8
    beta = 1

Top-level keys: ``gamma_db`` or ``gamma_grid_db=start:step:stop`` (one of
them), ``theta_grid=start:step:stop``, ``runs``, ``seed``, ``methods``.
Component keys: ``family`` plus ``k``/``beta`` (Weibull) or
``mu_db``/``sigma_db`` (log-normal).

All sweep output is deterministic for a fixed (config, seed): floats are
rendered with the shortest round-trip decimal representation and each
estimate's seed derives from the base seed and the row's position.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .distributions import DistributionSpec
from .dominance import (
    Scenario,
    TailDominanceReport,
    ThetaSource,
    check_tail_dominance,
    select_dominant,
)
from .estimators import (
    EstimateReport,
    Method,
    efficiency,
    estimate_conventional,
    estimate_improved,
    estimate_naive,
    optimality_ratio,
)
from .twist_optimizer import solve_p, solve_p_prime, theta_conventional, theta_star

__all__ = [
    "ConfigError",
    "ExperimentKind",
    "ExperimentConfig",
    "parse_config",
    "SweepRow",
    "EfficiencyRow",
    "DiagnosticRow",
    "DiagnosticsReport",
    "run_single_estimate",
    "run_theta_sweep",
    "run_threshold_sweep",
    "run_efficiency_sweep",
    "run_diagnostics",
    "sweep_rows_to_csv",
    "efficiency_rows_to_csv",
    "SWEEP_HEADER",
    "EFFICIENCY_HEADER",
]

DEFAULT_RUNS = 1_000_000

SWEEP_HEADER = (
    "gamma_db,method,theta,alpha_hat,second_moment,std_error,"
    "variance,relative_error,ci95_low,ci95_high,runs,seed"
)
EFFICIENCY_HEADER = "gamma_db,xi1,xi2,alpha_ref"


class ConfigError(ValueError):
    """A config document problem, anchored to its line."""

    def __init__(self, lineno: int | None, message: str):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class ExperimentKind(enum.Enum):
    SINGLE_ESTIMATE = "single"
    THETA_SWEEP = "theta_sweep"
    THRESHOLD_SWEEP = "threshold_sweep"
    EFFICIENCY_SWEEP = "efficiency_sweep"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    kind: ExperimentKind
    theta_grid: tuple[float, ...]
    gamma_grid_db: tuple[float, ...]
    methods: tuple[Method, ...]
    runs: int
    seed: int

    def override(self, runs=None, seed=None, methods=None) -> "ExperimentConfig":
        cfg = self
        if runs is not None:
            if runs < 1:
                raise ConfigError(None, "runs must be a positive integer")
            cfg = replace(cfg, runs=int(runs))
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if methods is not None:
            cfg = replace(cfg, methods=tuple(methods))
        return cfg


_METHOD_ALIASES = {
    "naive": Method.NAIVE_MC,
    "naive_mc": Method.NAIVE_MC,
    "naivemc": Method.NAIVE_MC,
    "conventional": Method.CONVENTIONAL_IS,
    "conventional_is": Method.CONVENTIONAL_IS,
    "improved": Method.IMPROVED_IS,
    "improved_is": Method.IMPROVED_IS,
}

_TOP_KEYS = {"gamma_db", "gamma_grid_db", "theta_grid", "runs", "seed", "methods"}
_COMPONENT_KEYS = {"family", "k", "beta", "mu_db", "sigma_db"}

# maps a constructor complaint back to the config key that caused it
_FIELD_TO_KEY = {
    "weibull_shape": "k",
    "weibull_scale": "beta",
    "lognormal_mu_db": "mu_db",
    "lognormal_sigma_db": "sigma_db",
}


def parse_methods(value: str) -> tuple[Method, ...]:
    """Parse a comma-separated method list (e.g. "naive,improved")."""
    names = [piece.strip().lower() for piece in value.split(",") if piece.strip()]
    if not names:
        raise ConfigError(None, "methods list is empty")
    methods = []
    for name in names:
        if name not in _METHOD_ALIASES:
            raise ConfigError(None, f"unknown method '{name}'")
        method = _METHOD_ALIASES[name]
        if method not in methods:
            methods.append(method)
    return tuple(methods)


def _parse_float(lineno: int, key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(lineno, f"key '{key}' expects a number, got '{value}'")


def _parse_int(lineno: int, key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(lineno, f"key '{key}' expects an integer, got '{value}'")


def _parse_grid(lineno: int, key: str, value: str) -> tuple[float, ...]:
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigError(lineno, f"key '{key}' expects start:step:stop, got '{value}'")
    start, step, stop = (_parse_float(lineno, key, p) for p in parts)
    if step <= 0.0:
        raise ConfigError(lineno, f"key '{key}' needs a positive step")
    if stop < start:
        raise ConfigError(lineno, f"key '{key}' needs stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    values = tuple(round(start + i * step, 12) for i in range(count))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(lineno, f"key '{key}' grid is not strictly increasing")
    return values


def _scan_lines(text: str):
    top: dict[str, tuple[int, str]] = {}
    blocks: list[tuple[int, dict[str, tuple[int, str]]]] = []
    current: dict[str, tuple[int, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[component]":
            current = {}
            blocks.append((lineno, current))
            continue
        if line.startswith("["):
            raise ConfigError(lineno, f"unknown section '{line}'")
        if "=" not in line:
            raise ConfigError(lineno, "expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        target = top if current is None else current
        allowed = _TOP_KEYS if current is None else _COMPONENT_KEYS
        if key not in allowed:
            raise ConfigError(lineno, f"unknown key '{key}'")
        if key in target:
            raise ConfigError(lineno, f"duplicate key '{key}'")
        target[key] = (lineno, value)
    return top, blocks


def _build_component(block_line: int, block: dict[str, tuple[int, str]]) -> DistributionSpec:
    if "family" not in block:
        raise ConfigError(block_line, "component block is missing 'family'")
    fam_line, fam_value = block["family"]
    family = fam_value.strip().lower()
    if family == "weibull":
        wanted, forbidden = {"k", "beta"}, {"mu_db", "sigma_db"}
    elif family == "lognormal":
        wanted, forbidden = {"mu_db", "sigma_db"}, {"k", "beta"}
    else:
        raise ConfigError(fam_line, f"unknown family '{fam_value}'")
    for key in forbidden:
        if key in block:
            raise ConfigError(block[key][0], f"key '{key}' does not apply to family '{family}'")
    for key in wanted:
        if key not in block:
            raise ConfigError(block_line, f"{family} component is missing '{key}'")
    values = {key: _parse_float(block[key][0], key, block[key][1]) for key in wanted}
    try:
        if family == "weibull":
            return DistributionSpec.weibull(values["k"], values["beta"])
        return DistributionSpec.lognormal(values["mu_db"], values["sigma_db"])
    except ValueError as exc:
        message = str(exc)
        lineno = block_line
        for field, key in _FIELD_TO_KEY.items():
            if field in message and key in block:
                lineno = block[key][0]
                break
        raise ConfigError(lineno, message)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document into an ExperimentConfig.

    The experiment kind is inferred from which grid is present:
    ``theta_grid`` makes a theta sweep, ``gamma_grid_db`` a threshold
    sweep (also usable for efficiency sweeps), neither a single
    estimate.
    """
    top, blocks = _scan_lines(text)

    if not blocks:
        raise ConfigError(None, "config defines no [component] blocks")
    components = [_build_component(line, block) for line, block in blocks]

    theta_grid: tuple[float, ...] = ()
    gamma_grid_db: tuple[float, ...] = ()
    if "theta_grid" in top:
        lineno, value = top["theta_grid"]
        theta_grid = _parse_grid(lineno, "theta_grid", value)
        if any(not 0.0 <= t < 1.0 for t in theta_grid):
            raise ConfigError(lineno, "theta_grid values must lie in [0, 1)")
    if "gamma_grid_db" in top:
        lineno, value = top["gamma_grid_db"]
        gamma_grid_db = _parse_grid(lineno, "gamma_grid_db", value)
    if theta_grid and gamma_grid_db:
        raise ConfigError(
            top["theta_grid"][0], "theta_grid and gamma_grid_db are mutually exclusive"
        )

    if theta_grid:
        kind = ExperimentKind.THETA_SWEEP
    elif gamma_grid_db:
        kind = ExperimentKind.THRESHOLD_SWEEP
    else:
        kind = ExperimentKind.SINGLE_ESTIMATE

    if "gamma_db" in top and gamma_grid_db:
        raise ConfigError(top["gamma_db"][0], "gamma_db and gamma_grid_db are mutually exclusive")
    if kind is not ExperimentKind.THRESHOLD_SWEEP and "gamma_db" not in top:
        raise ConfigError(None, "config needs gamma_db (or gamma_grid_db for a threshold sweep)")

    if "gamma_db" in top:
        gamma_db = _parse_float(top["gamma_db"][0], "gamma_db", top["gamma_db"][1])
    else:
        gamma_db = gamma_grid_db[0]

    try:
        scenario = Scenario.from_db(components, gamma_db)
    except ValueError as exc:
        raise ConfigError(blocks[0][0], str(exc))

    runs = DEFAULT_RUNS
    if "runs" in top:
        lineno, value = top["runs"]
        runs = _parse_int(lineno, "runs", value)
        if runs < 1:
            raise ConfigError(lineno, "runs must be a positive integer")
    seed = 0
    if "seed" in top:
        seed = _parse_int(top["seed"][0], "seed", top["seed"][1])

    methods: tuple[Method, ...] = (Method.CONVENTIONAL_IS, Method.IMPROVED_IS)
    if "methods" in top:
        lineno, value = top["methods"]
        try:
            methods = parse_methods(value)
        except ConfigError as exc:
            raise ConfigError(lineno, str(exc))

    return ExperimentConfig(
        scenario=scenario,
        kind=kind,
        theta_grid=theta_grid,
        gamma_grid_db=gamma_grid_db,
        methods=methods,
        runs=runs,
        seed=seed,
    )


# -- running ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    gamma_db: float
    method: Method
    theta: float
    report: EstimateReport


@dataclass(frozen=True)
class EfficiencyRow:
    gamma_db: float
    xi1: float
    xi2: float
    alpha_ref: float


def _minmax_thetas(scenario: Scenario):
    plan = select_dominant(scenario)
    budget = solve_p(scenario, plan).objective_value
    improved = plan.with_theta(
        theta_star(plan.s, budget), ThetaSource.MINMAX_IMPROVED
    )
    conventional = theta_conventional(scenario)
    return improved, conventional


def _run_method(scenario, method, plan, theta_conv, runs, seed, workers):
    if method is Method.NAIVE_MC:
        return 0.0, estimate_naive(scenario, runs, seed, workers)
    if method is Method.CONVENTIONAL_IS:
        return theta_conv, estimate_conventional(scenario, theta_conv, runs, seed, workers)
    return plan.theta, estimate_improved(scenario, plan, runs, seed, workers)


def _require_gamma_db(scenario: Scenario) -> float:
    if scenario.threshold_db is None:
        raise ValueError("this experiment needs a dB threshold")
    return scenario.threshold_db


def run_single_estimate(config: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """One estimate per configured method at the configured threshold.

    IS methods use their minmax twisting parameters.
    """
    scenario = config.scenario
    gamma_db = _require_gamma_db(scenario)
    plan, theta_conv = _minmax_thetas(scenario)
    rows = []
    for index, method in enumerate(config.methods):
        theta, report = _run_method(
            scenario, method, plan, theta_conv, config.runs, config.seed + index, workers
        )
        rows.append(SweepRow(gamma_db, method, theta, report))
    return rows


def run_theta_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """Estimate the second moment across the theta grid per IS method."""
    if not config.theta_grid:
        raise ValueError("theta sweep needs a theta_grid")
    if any(m is Method.NAIVE_MC for m in config.methods):
        raise ValueError("naive MC has no twisting parameter; drop it from theta sweeps")
    scenario = config.scenario
    gamma_db = _require_gamma_db(scenario)
    base_plan = select_dominant(scenario)
    rows = []
    index = 0
    for theta in config.theta_grid:
        for method in config.methods:
            seed = config.seed + index
            index += 1
            if method is Method.CONVENTIONAL_IS:
                report = estimate_conventional(scenario, theta, config.runs, seed, workers)
            else:
                plan = base_plan.with_theta(theta, ThetaSource.MANUAL)
                report = estimate_improved(scenario, plan, config.runs, seed, workers)
            rows.append(SweepRow(gamma_db, method, theta, report))
    return rows


def run_threshold_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    """Estimate across the threshold grid, methods at their minmax theta."""
    if not config.gamma_grid_db:
        raise ValueError("threshold sweep needs a gamma_grid_db")
    rows = []
    index = 0
    for gamma_db in config.gamma_grid_db:
        scenario = config.scenario.with_threshold_db(gamma_db)
        plan, theta_conv = _minmax_thetas(scenario)
        for method in config.methods:
            seed = config.seed + index
            index += 1
            theta, report = _run_method(
                scenario, method, plan, theta_conv, config.runs, seed, workers
            )
            rows.append(SweepRow(gamma_db, method, theta, report))
    return rows


def run_efficiency_sweep(config: ExperimentConfig, workers: int = 1) -> list[EfficiencyRow]:
    """Variance-reduction factors of both IS methods across thresholds.

    The tail probability reference is the improved estimate at each
    threshold (naive MC cannot resolve it out there).
    """
    if not config.gamma_grid_db:
        raise ValueError("efficiency sweep needs a gamma_grid_db")
    rows = []
    index = 0
    for gamma_db in config.gamma_grid_db:
        scenario = config.scenario.with_threshold_db(gamma_db)
        plan, theta_conv = _minmax_thetas(scenario)
        improved = estimate_improved(scenario, plan, config.runs, config.seed + index, workers)
        conventional = estimate_conventional(
            scenario, theta_conv, config.runs, config.seed + index + 1, workers
        )
        index += 2
        alpha_ref = improved.alpha_hat
        xi1 = efficiency(improved, alpha_ref).xi
        xi2 = efficiency(conventional, alpha_ref).xi
        rows.append(EfficiencyRow(gamma_db, xi1, xi2, alpha_ref))
    return rows


@dataclass(frozen=True)
class DiagnosticRow:
    gamma_db: float
    s: int
    theta_improved: float
    theta_conventional: float
    a_value: float
    a_prime: float
    ratio_improved: float
    ratio_conventional: float


@dataclass(frozen=True)
class DiagnosticsReport:
    """Tail-dominance verdicts plus per-threshold optimizer/estimator
    diagnostics."""

    dominance: tuple[TailDominanceReport, ...]
    rows: tuple[DiagnosticRow, ...]

    def to_text(self) -> str:
        lines = ["tail dominance (gap = 2*Lambda_dominant - Lambda_component)"]
        if not self.dominance:
            lines.append("  all components dominant; nothing to check")
        for rep in self.dominance:
            lines.append(
                f"  component {rep.component}: {rep.verdict.value} "
                f"(gap {rep.gap[0]!r} -> {rep.gap[-1]!r})"
            )
        lines.append(
            "gamma_db,s,theta_improved,theta_conventional,a,a_prime,"
            "optimality_ratio_improved,optimality_ratio_conventional"
        )
        for row in self.rows:
            lines.append(
                ",".join(
                    [
                        repr(float(row.gamma_db)),
                        str(row.s),
                        repr(float(row.theta_improved)),
                        repr(float(row.theta_conventional)),
                        repr(float(row.a_value)),
                        repr(float(row.a_prime)),
                        repr(float(row.ratio_improved)),
                        repr(float(row.ratio_conventional)),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def run_diagnostics(config: ExperimentConfig, workers: int = 1) -> DiagnosticsReport:
    """Consolidated health report over a threshold grid.

    Tail dominance is probed on a wide geometric grid reaching a
    million times past the top configured threshold, since the
    underlying assumption is about the limit; the per-threshold rows
    carry the optimizer outputs and the measured optimality ratios of
    both IS methods.
    """
    if not config.gamma_grid_db:
        raise ValueError("diagnostics need a gamma_grid_db")
    first = config.scenario.with_threshold_db(config.gamma_grid_db[0])
    plan = select_dominant(first)
    lo = first.threshold_linear
    hi = config.scenario.with_threshold_db(config.gamma_grid_db[-1]).threshold_linear
    probe = np.geomspace(lo, hi * 1e6, 25)
    dominance = check_tail_dominance(first, plan, probe)

    rows = []
    index = 0
    for gamma_db in config.gamma_grid_db:
        scenario = config.scenario.with_threshold_db(gamma_db)
        budget = solve_p(scenario, plan).objective_value
        a_prime = solve_p_prime(scenario, plan).objective_value
        improved_plan = plan.with_theta(
            theta_star(plan.s, budget), ThetaSource.MINMAX_IMPROVED
        )
        theta_conv = theta_conventional(scenario)
        improved = estimate_improved(
            scenario, improved_plan, config.runs, config.seed + index, workers
        )
        conventional = estimate_conventional(
            scenario, theta_conv, config.runs, config.seed + index + 1, workers
        )
        index += 2
        alpha_ref = improved.alpha_hat
        rows.append(
            DiagnosticRow(
                gamma_db=gamma_db,
                s=plan.s,
                theta_improved=improved_plan.theta,
                theta_conventional=theta_conv,
                a_value=budget,
                a_prime=a_prime,
                ratio_improved=optimality_ratio(improved.second_moment, alpha_ref),
                ratio_conventional=optimality_ratio(conventional.second_moment, alpha_ref),
            )
        )
    return DiagnosticsReport(dominance=dominance, rows=tuple(rows))


# -- CSV -------------------------------------------------------------------


def _fmt(value: float) -> str:
    # repr of a Python float is the shortest round-trip decimal
    return repr(float(value))


def sweep_rows_to_csv(rows) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        r = row.report
        lines.append(
            ",".join(
                [
                    _fmt(row.gamma_db),
                    row.method.value,
                    _fmt(row.theta),
                    _fmt(r.alpha_hat),
                    _fmt(r.second_moment),
                    _fmt(r.second_moment_se),
                    _fmt(r.variance),
                    _fmt(r.relative_error),
                    _fmt(r.ci95_low),
                    _fmt(r.ci95_high),
                    str(r.runs),
                    str(r.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def efficiency_rows_to_csv(rows) -> str:
    lines = [EFFICIENCY_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                [_fmt(row.gamma_db), _fmt(row.xi1), _fmt(row.xi2), _fmt(row.alpha_ref)]
            )
        )
    return "\n".join(lines) + "\n"
