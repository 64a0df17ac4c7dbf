"""Command-line front end: ``run``, ``benchmark`` and ``grid-info``.

Settings are resolved in increasing precedence: built-in defaults, the INI
file given by ``--config``, environment variables, command-line flags.

Example file::

    [model]
    eta = 0.5
    [simulation]
    runs = 700
    seed = 42
    [grid]
    m = 1, 3, inf
    q = 3, 10
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .benchmark import InfeasibleError, brute_force_oracle, solve_second_best
from .engine import (DELTAS, M_VALUES, Q_VALUES, REJECTION_LEARNING, SIGMA_MULTIPLIERS,
                     ScenarioConfig, run_scenarios_raw, scenario_grid)
from .metrics import emit_contour_csv, emit_timeseries_csv, summarize
from .model import AgentParams, EnvironmentParams
from .search import DEGENERATE_RULES, THRESHOLD_MODES

ENV_OUTPUT_DIR = "HIDDEN_ACTION_OUTPUT_DIR"
ENV_WORKERS = "HIDDEN_ACTION_WORKERS"

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _float(v):
    return float(v)


def _int(v):
    return int(v)


def _bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _m(v):
    s = str(v).strip().lower()
    return None if s in ("inf", "none", "unbounded") else int(s)


def _list(conv):
    def parse(v):
        if isinstance(v, (list, tuple)):
            return tuple(conv(x) for x in v)
        return tuple(conv(x) for x in str(v).split(",") if x.strip())
    return parse


def _choice(options):
    def parse(v):
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return parse


# section -> key -> (parser, attribute on CliConfig)
SCHEMA = {
    "model": {
        "eta": _float, "rho": _float, "reservation_utility": _float, "disutility": _float,
        "env_mean": _float,
    },
    "simulation": {
        "periods": _int, "runs": _int, "seed": _int, "workers": _int,
    },
    "grid": {
        "m": _list(_m), "sigma_mult": _list(_float), "delta": _list(_float), "q": _list(_float),
        "ids": _list(str.strip),
    },
    "modes": {
        "threshold_mode": _choice(THRESHOLD_MODES),
        "degenerate_threshold": _choice(DEGENERATE_RULES),
        "status_quo_competes": _bool,
        "accept_on_offer_only": _bool,
        "rejection_learning": _choice(REJECTION_LEARNING),
        "normalization": _choice(("point", "exact")),
        "manhattan_literal": _bool,
        "ci_method": _choice(("normal", "bootstrap")),
        "alpha": _float,
    },
    "output": {"dir": str},
}


@dataclass
class CliConfig:
    config_path: str | None = None
    eta: float = 0.5
    rho: float = 50.0
    reservation_utility: float = 0.0
    disutility: float = 0.1
    env_mean: float = 0.0
    periods: int = 20
    runs: int = 700
    seed: int = 0
    workers: int = 1
    m: tuple = M_VALUES
    sigma_mult: tuple = SIGMA_MULTIPLIERS
    delta: tuple = DELTAS
    q: tuple = Q_VALUES
    ids: tuple = ()
    threshold_mode: str = "calibrated"
    degenerate_threshold: str = "exploit"
    status_quo_competes: bool = True
    accept_on_offer_only: bool = False
    rejection_learning: str = "shock"
    normalization: str = "point"
    manhattan_literal: bool = False
    ci_method: str = "normal"
    alpha: float = 0.01
    dir: str = "results"
    sources: dict = field(default_factory=dict)

    def validate(self):
        checks = [
            (self.workers >= 1, "workers must be >= 1"),
            (self.runs >= 1, "runs must be >= 1"),
            (self.periods >= 1, "periods must be >= 1"),
            (self.eta > 0, "eta must be > 0"),
            (self.rho > 0, "rho must be > 0"),
            (0 < self.alpha < 1, "alpha must lie in (0, 1)"),
            (all(m is None or m >= 1 for m in self.m), "every m must be >= 1 or inf"),
            (all(q >= 1 for q in self.q), "every q must be >= 1"),
            (all(0 < d < 1 for d in self.delta), "every delta must lie in (0, 1)"),
            (all(c >= 0 for c in self.sigma_mult), "every sigma_mult must be >= 0"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return self

    def agent(self):
        return AgentParams(eta=self.eta, rho=self.rho, reservation_utility=self.reservation_utility,
                           disutility=self.disutility)

    def base_scenario(self):
        return ScenarioConfig(
            T=self.periods, R=self.runs, agent=self.agent(), env_mean=self.env_mean,
            threshold_mode=self.threshold_mode, degenerate_threshold=self.degenerate_threshold,
            status_quo_competes=self.status_quo_competes,
            accept_on_offer_only=self.accept_on_offer_only,
            rejection_learning=self.rejection_learning, normalization=self.normalization,
            master_seed=self.seed)

    def scenarios(self):
        grid = scenario_grid(self.base_scenario(), self.m, self.sigma_mult, self.delta, self.q)
        if self.ids:
            known = {s.scenario_id: s for s in grid}
            missing = [i for i in self.ids if i not in known]
            if missing:
                raise ConfigError(f"unknown scenario id(s): {', '.join(missing)}")
            grid = [known[i] for i in self.ids]
        return grid

    def resolved(self):
        d = asdict(self)
        d.pop("sources")
        d["m"] = ["inf" if m is None else m for m in self.m]
        d = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        return d


def _apply(cfg, section, key, raw, origin):
    parser = SCHEMA[section][key]
    try:
        value = parser(raw)
    except ValueError as exc:
        raise ConfigError(f"{origin}: [{section}] {key}: {exc}") from None
    setattr(cfg, key, value)
    cfg.sources[key] = origin


def read_config_file(path, cfg: CliConfig):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: expected a [section] header") from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else "?"
        raise ConfigError(f"{path}:{lineno}: cannot parse line") from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", "?")
        raise ConfigError(f"{path}:{lineno}: {exc.message}") from None
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]; valid sections: "
                              f"{', '.join(SCHEMA)}")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]; valid keys: "
                                  f"{', '.join(SCHEMA[section])}")
            _apply(cfg, section, key, raw, str(path))
    cfg.config_path = str(path)
    return cfg


_SECTION_OF = {key: section for section, keys in SCHEMA.items() for key in keys}


def resolve_config(args, environ=None) -> CliConfig:
    """Defaults, then file, then environment, then flags."""
    environ = os.environ if environ is None else environ
    cfg = CliConfig()
    if getattr(args, "config", None):
        read_config_file(args.config, cfg)
    if environ.get(ENV_OUTPUT_DIR):
        _apply(cfg, "output", "dir", environ[ENV_OUTPUT_DIR], ENV_OUTPUT_DIR)
    if environ.get(ENV_WORKERS):
        _apply(cfg, "simulation", "workers", environ[ENV_WORKERS], ENV_WORKERS)
    for key, section in _SECTION_OF.items():
        value = getattr(args, key, None)
        if value is not None:
            _apply(cfg, section, key, value, "flag")
    return cfg.validate()


def _add_common(p):
    p.add_argument("--config", help="INI file with [model] [simulation] [grid] [modes] [output]")
    g = p.add_argument_group("model")
    g.add_argument("--eta", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--reservation-utility", dest="reservation_utility", type=float)
    g.add_argument("--env-mean", dest="env_mean", type=float)


def build_parser():
    ap = argparse.ArgumentParser(prog="hidden-action",
                                 description="Agent-based hidden-action simulation.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate scenarios and write CSV results")
    _add_common(run)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--periods", type=int)
    run.add_argument("--output-dir", dest="dir")
    run.add_argument("--m", help="comma list, 'inf' for unbounded")
    run.add_argument("--q")
    run.add_argument("--delta")
    run.add_argument("--sigma-mult", dest="sigma_mult")
    run.add_argument("--ids", help="comma list of scenario ids")
    run.add_argument("--threshold-mode", dest="threshold_mode")
    run.add_argument("--degenerate-threshold", dest="degenerate_threshold")
    run.add_argument("--rejection-learning", dest="rejection_learning")
    run.add_argument("--normalization")
    run.add_argument("--accept-on-offer-only", dest="accept_on_offer_only")
    run.add_argument("--status-quo-competes", dest="status_quo_competes")
    run.add_argument("--manhattan-literal", dest="manhattan_literal")
    run.add_argument("--ci-method", dest="ci_method")
    run.add_argument("--alpha", type=float)

    bench = sub.add_parser("benchmark", help="print the second-best contract")
    _add_common(bench)
    bench.add_argument("--sigma", type=float, default=None,
                       help="absolute noise level (default 0)")
    bench.add_argument("--sigma-mult", dest="bench_sigma_mult", type=float, default=None,
                       help="noise as a multiple of the noise-free outcome")
    bench.add_argument("--oracle", action="store_true", help="also print the grid oracle")

    info = sub.add_parser("grid-info", help="list scenario ids and axes")
    _add_common(info)
    info.add_argument("--m")
    info.add_argument("--q")
    info.add_argument("--delta")
    info.add_argument("--sigma-mult", dest="sigma_mult")
    return ap


def _code_version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def cmd_run(cfg: CliConfig, out=sys.stdout):
    scenarios = cfg.scenarios()
    outdir = Path(cfg.dir)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = run_scenarios_raw(scenarios, workers=cfg.workers)
    results = [summarize(o, cfg.alpha, cfg.ci_method, cfg.manhattan_literal) for o in outputs]
    ts = emit_timeseries_csv(results, outdir / "timeseries.csv")
    ct = emit_contour_csv(results, outdir / "contour.csv")
    meta = {"seed": cfg.seed, "code_version": _code_version(), "scenarios": len(scenarios),
            "config": cfg.resolved()}
    with open(outdir / "run_metadata.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"seed={cfg.seed} scenarios={len(scenarios)} wrote {ts} {ct}", file=out)
    return 0


def cmd_benchmark(cfg: CliConfig, args, out=sys.stdout):
    agent = cfg.agent()
    sigma = args.sigma or 0.0
    if args.bench_sigma_mult is not None:
        ref = solve_second_best(agent, None, EnvironmentParams(mean=cfg.env_mean, sigma=0.0))
        sigma = args.bench_sigma_mult * ref.outcome_star
    env = EnvironmentParams(mean=cfg.env_mean, sigma=sigma)
    b = solve_second_best(agent, None, env)
    print(f"sigma={sigma:.6g} p*={b.premium_star:.6f} a*={b.effort_star:.6f} "
          f"x*={b.outcome_star:.6f} principal_eu={b.principal_eu:.6f}", file=out)
    if args.oracle:
        o = brute_force_oracle(agent, env, refine=3)
        print(f"oracle p*={o.premium_star:.6f} a*={o.effort_star:.6f} "
              f"x*={o.outcome_star:.6f} principal_eu={o.principal_eu:.6f}", file=out)
    return 0


def cmd_grid_info(cfg: CliConfig, out=sys.stdout):
    for s in cfg.scenarios():
        m = "inf" if s.m is None else s.m
        print(f"{s.scenario_id}\tm={m}\tsigma_mult={s.sigma_multiplier:g}\t"
              f"delta={s.delta:g}\tq={s.q:g}", file=out)
    return 0


def main(argv=None, environ=None, out=sys.stdout, err=sys.stderr):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args, environ)
        if args.command == "run":
            return cmd_run(cfg, out)
        if args.command == "benchmark":
            return cmd_benchmark(cfg, args, out)
        return cmd_grid_info(cfg, out)
    except (ConfigError, InfeasibleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
