"""Experiment configuration, end-to-end runs, and summaries.

A run is described by a flat key=value config (or equivalent keyword
arguments): the topology, the instance (generated from a seed or loaded from
a file), the solver, and its knobs.  ``run_experiment`` wires everything,
writes ``trace.csv`` and ``summary.txt`` into the output directory, and
returns the summary mapping.  Traces are byte-reproducible by default; wall
times are only measured when timing is switched on.
"""

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np

from .acrcd import ACRCDConfig, run_acrcd
from .baseline import subgradient_baseline
from .dual import (
    block_radii,
    default_regularizer_weight,
    dual_radius,
    lipschitz_constants,
)
from .errors import ConfigError
from .network import build_laplacian, load_topology, make_topology
from .problem import (
    data_constants,
    generate_instance,
    instance_checksum,
    load_instance,
)
from .recovery import consensus_candidate, duality_gap, primal_from_dual
from .stm import STMConfig, resolve_config, run_stm
from .trace import save_trace

SOLVERS = ("stm", "acrcd", "subgradient")
HARNESS_P_VALUES = (1.0, 2.0)


@dataclass
class ExperimentConfig:
    """Flat description of one experiment; mirrors the config-file keys."""

    solver: str = "stm"
    topology: str = "ring"
    instance: str | None = None
    m: int = 4
    n: int = 3
    d: int = 5
    p: float = 2.0
    theta: float = 0.5
    seed: int | None = None
    scale: float = 1.0
    max_iter: int = 2000
    target_eps: float = 1e-4
    L: float | None = None
    mu: float = 0.0
    nu: float | None = None
    q: float | None = None
    solver_seed: int | None = None
    step_rule: str = "sqrt:0.1"
    penalty: float = 1.0
    trace_every: int = 1
    timing: bool = False
    out: str | None = None

    def validate(self):
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.instance is None and self.seed is None:
            raise ConfigError("a generator seed is required when no instance file is given")
        if self.instance is not None and not os.path.exists(self.instance):
            raise ConfigError(f"instance file not found: {self.instance}")
        if self.instance is None:
            if min(self.m, self.n, self.d) < 1:
                raise ConfigError("dimensions m, n, d must be positive")
            if self.p < 1.0:
                raise ConfigError("p must be at least 1")
            if self.p not in HARNESS_P_VALUES:
                raise ConfigError("the harness restricts p to {1, 2}")
            if self.theta <= 0.0:
                raise ConfigError("theta must be positive")
        if self.solver == "acrcd":
            if self.solver_seed is None:
                raise ConfigError("acrcd needs solver_seed for its sampling coin")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be positive")
        if self.trace_every < 1:
            raise ConfigError("trace_every must be positive")
        if self.topology.startswith("file:"):
            path = self.topology[len("file:"):]
            if not os.path.exists(path):
                raise ConfigError(f"topology file not found: {path}")
        return self


_INT_KEYS = {"m", "n", "d", "seed", "solver_seed", "max_iter", "trace_every"}
_FLOAT_KEYS = {"p", "theta", "scale", "target_eps", "L", "mu", "nu", "q", "penalty"}
_BOOL_KEYS = {"timing"}
_ALL_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_BOOL_TRUE = {"on", "true", "yes", "1"}
_BOOL_FALSE = {"off", "false", "no", "0"}


def _coerce(key, raw, where=""):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{where}bad value {raw!r} for key {key!r}") from None


def load_config(path):
    """Parse a flat key=value file ('#' starts a comment) into a config."""
    values = {}
    try:
        with open(path) as fh:
            lines = list(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        coerced = _coerce(key, raw, where=f"{path}:{lineno}: ")
        if coerced is not None:
            values[key] = coerced
    return ExperimentConfig(**values)


def merge_config(cfg, overrides):
    """New config with non-None override values applied on top of cfg."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(updates) - _ALL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return dataclasses.replace(cfg, **updates)


def _build_topology(cfg, m):
    if cfg.topology.startswith("file:"):
        return load_topology(cfg.topology[len("file:"):])
    try:
        return make_topology(cfg.topology, m)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_or_generate(cfg):
    if cfg.instance is not None:
        inst = load_instance(cfg.instance)
        if inst.p not in HARNESS_P_VALUES:
            raise ConfigError("the harness restricts p to {1, 2}")
        return inst
    return generate_instance(cfg.seed, cfg.m, cfg.n, cfg.d, cfg.p, cfg.theta, cfg.scale)


def run_experiment(cfg):
    """Run one configured experiment; returns (summary dict, trace).

    When cfg.out is set, trace.csv and summary.txt are written there.
    """
    cfg.validate()
    inst = _load_or_generate(cfg)
    topology = _build_topology(cfg, inst.m)
    if topology.m != inst.m:
        raise ConfigError(
            f"topology has {topology.m} nodes but the instance has {inst.m}"
        )
    W = build_laplacian(topology)
    summary = {
        "solver": cfg.solver,
        "m": inst.m,
        "n": inst.n,
        "d": inst.d,
        "p": inst.p,
        "theta": inst.theta,
        "checksum": instance_checksum(inst),
        "lambda_max": W.lambda_max,
        "lambda_min_plus": W.lambda_min_plus,
        "chi": W.chi,
    }
    dc = data_constants(inst)
    summary["sigma_max"] = dc.sigma_max_A
    summary["sigma_min_plus"] = dc.sigma_min_plus_A

    final_state = None
    if cfg.solver == "stm":
        scfg = resolve_config(
            STMConfig(L=cfg.L, mu=cfg.mu, max_iter=cfg.max_iter,
                      target_eps=cfg.target_eps, nu=cfg.nu, q_exponent=cfg.q,
                      trace_every=cfg.trace_every, timing=cfg.timing),
            inst, W,
        )
        final_state, trace = run_stm(inst, W, scfg)
        summary["L"] = scfg.L
        summary["nu"] = scfg.nu
        summary["q_exponent"] = scfg.q_exponent
    elif cfg.solver == "acrcd":
        if inst.p != 1.0:
            raise ConfigError("acrcd requires p = 1; use solver = stm instead")
        acfg = ACRCDConfig(rng_seed=cfg.solver_seed, max_iter=cfg.max_iter,
                           trace_every=cfg.trace_every, timing=cfg.timing)
        final_state, trace = run_acrcd(inst, W, acfg)
    else:
        trace = subgradient_baseline(inst, W, cfg.max_iter, cfg.step_rule,
                                     cfg.penalty, seed=cfg.seed or 0,
                                     trace_every=cfg.trace_every)

    consts = lipschitz_constants(inst, W)
    summary["L_H"] = consts.L_H
    summary["L_z"] = consts.L_z
    summary["L_s"] = consts.L_s
    summary["eta"] = consts.eta
    qe = inst.q_exponent if cfg.q is None else cfg.q
    if final_state is not None:
        # solution-dependent radius bounds, from the recovered point (estimated)
        xbar = consensus_candidate(primal_from_dual(final_state, inst, W))
        summary["R_dual_sq_est"] = dual_radius(inst, W, xbar)
        R_z_sq, R_s_sq = block_radii(inst, W, xbar, qe)
        summary["R_z_sq_est"] = R_z_sq
        summary["R_s_sq"] = R_s_sq
        rep = duality_gap(final_state, inst, W)
        summary["final_gap"] = rep.gap
        summary["final_dual_certificate"] = rep.dual_value
    summary["nu_default"] = (
        0.0 if math.isinf(qe) else default_regularizer_weight(inst, cfg.target_eps, qe)
    )
    summary["iters"] = trace.iter[-1]
    summary["final_dual_obj"] = trace.dual_obj[-1]
    summary["final_primal_obj"] = trace.primal_obj[-1]
    summary["final_consensus_residual"] = trace.consensus_residual[-1]
    summary["n_comm"] = trace.n_comm[-1]
    summary["n_comp"] = trace.n_comp[-1]

    if cfg.out is not None:
        os.makedirs(cfg.out, exist_ok=True)
        save_trace(trace, os.path.join(cfg.out, "trace.csv"))
        write_summary(os.path.join(cfg.out, "summary.txt"), summary)
    return summary, trace


def write_summary(path, summary):
    """key=value lines in sorted key order; floats use repr."""
    lines = []
    for key in sorted(summary):
        value = summary[key]
        if isinstance(value, float):
            lines.append(f"{key}={float(value)!r}")
        else:
            lines.append(f"{key}={value}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_summary(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, raw = line.split("=", 1)
            try:
                out[key] = int(raw)
            except ValueError:
                try:
                    out[key] = float(raw)
                except ValueError:
                    out[key] = raw
    return out


def compare_solvers(cfg, solvers):
    """Run several solvers on the identical instance/topology; returns summaries.

    Each solver writes into out/<solver>/ when an output directory is set.
    """
    results = []
    for name in solvers:
        sub = dataclasses.replace(
            cfg, solver=name,
            out=None if cfg.out is None else os.path.join(cfg.out, name),
        )
        summary, _ = run_experiment(sub)
        results.append(summary)
    return results


def comparison_table(results):
    """Plain-text table of the headline metrics per solver."""
    headers = ("solver", "final_dual_obj", "final_primal_obj", "final_gap",
               "n_comm", "n_comp")
    rows = [headers]
    for summary in results:
        rows.append(tuple(_fmt(summary.get(h, "-")) for h in headers))
    widths = [max(len(r[c]) for r in rows) for c in range(len(headers))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip()
             for row in rows]
    return "\n".join(lines)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
