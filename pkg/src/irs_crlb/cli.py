"""Experiment runner: scheme x power x channel-draw sweeps written as CSV.

Usage::

    python -m irs_crlb CONFIG [--output DIR] [--seed N] [--jobs N] [-v | -q]

Relative config paths that do not exist are looked up in ``$IRS_CRLB_CONFIG_DIR``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .evaluator import monte_carlo_mse
from .optimizer import SCHEMES, DesignOptions, design_schemes
from .scenario import Scenario, dbm_to_watts, generate_channel, scenario_from_mapping, scenario_hash, load_scenario

logger = logging.getLogger("irs_crlb")

CONFIG_DIR_ENV = "IRS_CRLB_CONFIG_DIR"

RESULT_COLUMNS = [
    "scheme",
    "P0_dBm",
    "channel_draw",
    "crlb_rad2",
    "mse_rad2",
    "mse_stderr",
    "outer_iters",
    "wall_time_s",
    "seed",
    "identifiable",
    "solver_ok",
    "scenario_hash",
]
TRACE_COLUMNS = ["scheme", "P0_dBm", "channel_draw", "outer_iter", "crlb_rad2"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scenario: Scenario
    schemes: list[str]
    powers_dbm: list[float]
    num_channel_draws: int = 1
    num_mc_trials: int = 0
    output: Path | None = None
    seed: int = 0
    record_timing: bool = True
    options: DesignOptions = field(default_factory=DesignOptions)
    mc_grid_step: float = 1e-3
    mc_refine_iters: int = 40

    def resolved(self) -> dict:
        d = {
            "scenario": dataclasses.asdict(self.scenario),
            "scenario_hash": scenario_hash(self.scenario),
            "schemes": list(self.schemes),
            "powers_dbm": list(self.powers_dbm),
            "num_channel_draws": self.num_channel_draws,
            "num_mc_trials": self.num_mc_trials,
            "seed": self.seed,
            "record_timing": self.record_timing,
            "options": {k: v for k, v in dataclasses.asdict(self.options).items() if k != "backend"},
            "mc_grid_step": self.mc_grid_step,
            "mc_refine_iters": self.mc_refine_iters,
        }
        return d


_TOP_KEYS = {
    "scenario", "schemes", "power_sweep_dbm", "num_channel_draws", "num_mc_trials", "output", "seed",
    "record_timing", "design", "mle",
}  # fmt: skip


def _sweep(sweep) -> list[float]:
    if isinstance(sweep, (list, tuple)):
        powers = [float(p) for p in sweep]
    elif isinstance(sweep, dict):
        try:
            start, stop, step = float(sweep["start"]), float(sweep["stop"]), float(sweep.get("step", 1.0))
        except KeyError as exc:
            raise ConfigError(f"power_sweep_dbm: missing key {exc.args[0]!r}") from None
        if step <= 0:
            raise ConfigError("power_sweep_dbm.step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        powers = [start + k * step for k in range(max(n, 0))]
    else:
        powers = [float(sweep)]
    if not powers:
        raise ConfigError("power_sweep_dbm: sweep is empty")
    return powers


def resolve_config_path(path: str | Path) -> Path:
    p = Path(path)
    if not p.exists() and not p.is_absolute() and os.environ.get(CONFIG_DIR_ENV):
        alt = Path(os.environ[CONFIG_DIR_ENV]) / p
        if alt.exists():
            return alt
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    return p


def load_config(path: str | Path) -> ExperimentConfig:
    path = resolve_config_path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return config_from_mapping(data, base_dir=path.parent)


def config_from_mapping(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    scen = data.get("scenario", {})
    try:
        if isinstance(scen, str):
            sp = Path(scen)
            scenario = load_scenario(sp if sp.is_absolute() else base_dir / sp)
        elif isinstance(scen, dict):
            scenario = scenario_from_mapping(scen)
        else:
            raise ConfigError("scenario must be a file path or a mapping")
    except (ValueError, OSError) as exc:
        raise ConfigError(f"scenario: {exc}") from exc
    schemes = data.get("schemes", list(SCHEMES))
    if isinstance(schemes, str):
        schemes = [schemes]
    bad = [s for s in schemes if s not in SCHEMES]
    if bad or not schemes:
        raise ConfigError(f"schemes: unknown labels {bad}; expected a subset of {list(SCHEMES)}")
    powers = _sweep(data.get("power_sweep_dbm", 30.0))
    design = data.get("design", {}) or {}
    valid = {f.name for f in dataclasses.fields(DesignOptions)} - {"backend"}
    for k in design:
        if k not in valid:
            raise ConfigError(f"design: unknown key {k!r}")
    mle = data.get("mle", {}) or {}
    for k in mle:
        if k not in ("grid_step", "refine_iters"):
            raise ConfigError(f"mle: unknown key {k!r}")
    for key in ("num_channel_draws", "num_mc_trials", "seed"):
        if key in data and not isinstance(data[key], int):
            raise ConfigError(f"{key} must be an integer")
    if data.get("num_channel_draws", 1) < 1:
        raise ConfigError("num_channel_draws must be >= 1")
    if data.get("num_mc_trials", 0) < 0:
        raise ConfigError("num_mc_trials must be >= 0")
    return ExperimentConfig(
        scenario=scenario,
        schemes=list(schemes),
        powers_dbm=powers,
        num_channel_draws=data.get("num_channel_draws", 1),
        num_mc_trials=data.get("num_mc_trials", 0),
        output=Path(data["output"]) if data.get("output") else None,
        seed=data.get("seed", scenario.rng_seed),
        record_timing=bool(data.get("record_timing", True)),
        options=DesignOptions(**design),
        mc_grid_step=float(mle.get("grid_step", 1e-3)),
        mc_refine_iters=int(mle.get("refine_iters", 40)),
    )


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _run_point(cfg: ExperimentConfig, draw: int, pidx: int):
    """All schemes for one (channel draw, power) pair."""
    p_dbm = cfg.powers_dbm[pidx]
    scenario = cfg.scenario.with_power(dbm_to_watts(p_dbm))
    channel = generate_channel(scenario, _rng(cfg.seed, draw, 0))
    h = scenario_hash(cfg.scenario)
    t0 = time.perf_counter()
    designs = design_schemes(scenario, channel, _rng(cfg.seed, draw, 1, pidx), cfg.schemes, options=cfg.options)
    design_time = time.perf_counter() - t0
    rows, traces = [], []
    for s_idx, (name, d) in enumerate(designs.items()):
        t1 = time.perf_counter()
        mse = stderr = math.nan
        if cfg.num_mc_trials > 0 and d.identifiable:
            pt = monte_carlo_mse(
                scenario, channel, d, cfg.num_mc_trials, _rng(cfg.seed, draw, 2, pidx, s_idx),
                cfg.mc_grid_step, cfg.mc_refine_iters,
            )  # fmt: skip
            mse, stderr = pt.mse, pt.stderr
        wall = design_time / len(designs) + time.perf_counter() - t1
        rows.append(
            {
                "scheme": name,
                "P0_dBm": p_dbm,
                "channel_draw": draw,
                "crlb_rad2": d.crlb,
                "mse_rad2": mse,
                "mse_stderr": stderr,
                "outer_iters": d.outer_iters,
                "wall_time_s": wall if cfg.record_timing else math.nan,
                "seed": cfg.seed,
                "identifiable": d.identifiable,
                "solver_ok": not d.solver_failed,
                "scenario_hash": h,
            }
        )
        trace = d.crlb_trace or [d.crlb]
        for k, c in enumerate(trace):
            traces.append({"scheme": name, "P0_dBm": p_dbm, "channel_draw": draw, "outer_iter": k, "crlb_rad2": c})
    return (draw, pidx), rows, traces


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_table(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def read_table(path: Path) -> list[dict]:
    """Parse a table written by :func:`write_table` back into typed rows."""
    ints = {"channel_draw", "outer_iters", "seed", "outer_iter"}
    strs = {"scheme", "scenario_hash"}
    bools = {"identifiable", "solver_ok"}
    out = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            row = {}
            for k, v in r.items():
                if k in strs:
                    row[k] = v
                elif k in bools:
                    row[k] = v == "true"
                elif k in ints:
                    row[k] = int(v)
                else:
                    row[k] = float(v) if v != "" else math.nan
            out.append(row)
    return out


def run_experiment(cfg: ExperimentConfig, output: Path, jobs: int = 1) -> int:
    """Run the sweep, write ``results.csv``, ``traces.csv`` and ``config.json``.

    Returns the process exit status (nonzero if any solve failed).
    """
    output.mkdir(parents=True, exist_ok=True)
    tasks = [(d, p) for d in range(cfg.num_channel_draws) for p in range(len(cfg.powers_dbm))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, [cfg] * len(tasks), *zip(*tasks)))
    else:
        results = [_run_point(cfg, d, p) for d, p in tasks]
    order = {name: i for i, name in enumerate(cfg.schemes)}
    rows = [r for _, rs, _ in results for r in rs]
    traces = [t for _, _, ts in results for t in ts]
    key = lambda r: (order[r["scheme"]], r["P0_dBm"], r["channel_draw"])  # noqa: E731
    rows.sort(key=key)
    traces.sort(key=lambda t: key(t) + (t["outer_iter"],))
    write_table(output / "results.csv", RESULT_COLUMNS, rows)
    write_table(output / "traces.csv", TRACE_COLUMNS, traces)
    with open(output / "config.json", "w") as fh:
        json.dump(cfg.resolved(), fh, indent=2, sort_keys=True)
    failed = [r for r in rows if not r["solver_ok"]]
    for r in rows:
        if not r["identifiable"]:
            logger.warning("draw %d at %.1f dBm is not identifiable (rank(G) <= 1)", r["channel_draw"], r["P0_dBm"])
    if failed:
        logger.error("%d result rows had solver failures", len(failed))
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="irs_crlb", description=__doc__.splitlines()[0])
    ap.add_argument("config", help="experiment config (YAML)")
    ap.add_argument("-o", "--output", help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="master seed override")
    ap.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("-q", "--quiet", action="store_true")
    args = ap.parse_args(argv)

    level = logging.ERROR if args.quiet else (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    out = Path(args.output) if args.output else cfg.output
    if out is None:
        print("error: no output directory (use --output or the 'output' key)", file=sys.stderr)
        return 2
    return run_experiment(cfg, out, max(1, args.jobs))


if __name__ == "__main__":
    sys.exit(main())
