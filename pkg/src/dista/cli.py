"""Command-line front end: ``dista {solve,phase,snr,validate} --config run.json``.

The config is a flat JSON object. Instance keys are those of
:class:`dista.experiments.TrialConfig`; campaign keys are listed in
``CAMPAIGN_KEYS``. Unknown keys are rejected before any computation.
"""

import argparse
import dataclasses
import json
import os
import sys

from . import experiments as ex
from .errors import DistaError, StepsizeError
from .graph import build_topology
from .numerics import operator_norm
from .solvers import max_signal_length, memory_footprint

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_STEPSIZE = 3

WORKERS_ENV = "DISTA_WORKERS"
MEMORY_BUDGET = 2 ** 12

_NUM = (int, float)
CAMPAIGN_KEYS = {
    "m_values": list, "node_values": list, "snr_db_values": list, "solvers": list,
    "trials": int, "seed": int, "workers": int, "output": str, "trace": str,
}
_TRIAL_TYPES = {
    "n": int, "k": int, "m": int, "nodes": int, "topology": str, "solver": str,
    "q": _NUM, "alpha": _NUM, "tau": _NUM, "gamma": _NUM, "rho": _NUM,
    "lam": (*_NUM, type(None)), "snr_db": (*_NUM, type(None)), "eps": _NUM,
    "max_iter": int, "zero_measurements": bool, "enforce_stepsize": bool,
}


class ConfigError(ValueError):
    pass


@dataclasses.dataclass
class RunConfig:
    trial: ex.TrialConfig
    m_values: list = dataclasses.field(default_factory=lambda: [2, 4, 6, 8, 10, 12, 14])
    node_values: list = dataclasses.field(default_factory=lambda: [5, 10, 15, 20])
    snr_db_values: list = dataclasses.field(default_factory=lambda: [10.0, 20.0, 30.0, 40.0])
    solvers: list = dataclasses.field(default_factory=lambda: ["dista", "dsm", "admm"])
    trials: int = 20
    seed: int = 0
    workers: int = 1
    output: str = "out.csv"
    trace: str | None = None


def _check_type(key, value, expected):
    # bool is an int subclass; keep the two apart
    allowed = expected if isinstance(expected, tuple) else (expected,)
    if isinstance(value, bool) and bool not in allowed:
        raise ConfigError(f"{key}: expected {expected}, got bool")
    if not isinstance(value, expected):
        raise ConfigError(f"{key}: expected {expected}, got {type(value).__name__}")


def parse_config(doc):
    """Validate a config mapping and build a :class:`RunConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - set(CAMPAIGN_KEYS) - set(_TRIAL_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    trial, campaign = {}, {}
    for key, value in doc.items():
        if key in _TRIAL_TYPES:
            _check_type(key, value, _TRIAL_TYPES[key])
            trial[key] = value
        else:
            _check_type(key, value, CAMPAIGN_KEYS[key])
            campaign[key] = value
    for key in ("m_values", "node_values"):
        if key in campaign and not all(isinstance(v, int) and not isinstance(v, bool)
                                       for v in campaign[key]):
            raise ConfigError(f"{key} must be a list of integers")
    if "snr_db_values" in campaign and not all(
            isinstance(v, _NUM) and not isinstance(v, bool) for v in campaign["snr_db_values"]):
        raise ConfigError("snr_db_values must be a list of numbers")
    for s in campaign.get("solvers", []):
        if s not in ex.SOLVERS:
            raise ConfigError(f"unknown solver {s!r}")
    if campaign.get("trials", 1) < 1:
        raise ConfigError("trials must be >= 1")
    try:
        tc = ex.TrialConfig(**trial)
        build_topology(tc.topology, tc.nodes)
    except DistaError as err:
        raise ConfigError(str(err)) from None
    return RunConfig(trial=tc, **campaign)


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    return parse_config(doc)


def cmd_solve(cfg, out=None):
    tc = cfg.trial
    seed = ex.trial_seed(cfg.seed, tc.m, tc.nodes, ex.snr_key(tc.snr_db), 0)
    sig, data, snr = ex.build_instance(tc, seed)
    rep = ex.solve(tc, data)
    met = ex.evaluate(rep.X, sig.x0)
    ex.write_atomic(cfg.trace or cfg.output, ex.trace_csv(rep))
    print(f"solver={rep.solver} iterations={rep.iterations} reason={rep.reason} "
          f"mse={met.mse:.6e} recovered={str(met.recovered).lower()} "
          f"residual={rep.residual:.6e} snr={snr:.6g}", file=out or sys.stdout)
    return EXIT_OK


def cmd_phase(cfg, out=None):
    res = ex.phase_transition(cfg.trial, cfg.m_values, cfg.node_values, cfg.trials,
                              cfg.seed, cfg.workers)
    ex.write_atomic(cfg.output, ex.phase_csv(res))
    cells = len(cfg.m_values) * len(cfg.node_values)
    print(f"wrote {cells} cells to {cfg.output}", file=out or sys.stdout)
    return EXIT_OK


def cmd_snr(cfg, out=None):
    rows = ex.snr_sweep(cfg.trial, [float(s) for s in cfg.snr_db_values], cfg.solvers,
                        cfg.m_values, cfg.trials, cfg.seed, cfg.workers)
    ex.write_atomic(cfg.output, ex.snr_csv(rows))
    print(f"wrote {len(rows)} rows to {cfg.output}", file=out or sys.stdout)
    return EXIT_OK


def validation_report(cfg, P=None):
    """Checks run by ``validate``, as a list of (name, passed, detail) tuples.

    ``P`` replaces the consensus matrix built from the config.
    """
    tc = cfg.trial
    seed = ex.trial_seed(cfg.seed, tc.m, tc.nodes, ex.snr_key(tc.snr_db), 0)
    _, data, _ = ex.build_instance(tc, seed)
    P = build_topology(tc.topology, tc.nodes) if P is None else P
    lines = []
    for v, d in enumerate(data):
        s2 = operator_norm(d.A) ** 2
        lines.append((f"node {v} stepsize", tc.tau * s2 < 1,
                      f"||A_v||^2={s2:.6g} tau*||A_v||^2={tc.tau * s2:.6g}"))
    checks = P.check()
    rows = P.weights.sum(axis=1)
    lines.append(("row sums", checks["row_stochastic"],
                  f"min={rows.min():.15g} max={rows.max():.15g}"))
    lines.append(("nonnegative", checks["nonnegative"], ""))
    lines.append(("symmetric", checks["symmetric"], ""))
    lines.append(("adapted", checks["adapted"], ""))
    lines.append(("uniform regular", P.is_uniform_regular(), "convergence theory applies"))
    for kind in ("dista", "admm"):
        lines.append((f"memory {kind}", True,
                      f"{memory_footprint(kind, tc.n, tc.m)} values at n={tc.n}, m={tc.m}; "
                      f"max n in {MEMORY_BUDGET} values: "
                      f"{max_signal_length(kind, MEMORY_BUDGET, tc.m)}"))
    return lines


def cmd_validate(cfg, out=None, P=None):
    for name, ok, detail in validation_report(cfg, P):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}".rstrip(": ")
        print(line, file=out or sys.stdout)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "phase": cmd_phase, "snr": cmd_snr, "validate": cmd_validate}


def build_parser():
    ap = argparse.ArgumentParser(prog="dista", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", "-c", help="JSON run configuration (defaults if omitted)")
    ap.add_argument("--seed", type=int, help="override the master seed")
    ap.add_argument("--workers", type=int, help=f"worker processes (env {WORKERS_ENV})")
    ap.add_argument("--output", "-o", help="override the output CSV path")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else parse_config({})
        env_workers = os.environ.get(WORKERS_ENV)
        if env_workers:
            try:
                cfg.workers = int(env_workers)
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer") from None
        if args.workers is not None:
            cfg.workers = args.workers
        if args.seed is not None:
            cfg.seed = args.seed
        if args.output:
            cfg.output = args.output
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg)
    except StepsizeError as err:
        for v in err.violations:
            print(f"error: node {v.node}: tau*||A_v||^2 = {v.product:.6g} >= 1", file=sys.stderr)
        return EXIT_STEPSIZE
    except (DistaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
