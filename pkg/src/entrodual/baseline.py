"""Projected-subgradient comparator on the penalized distributed objective.

A deliberately plain primal method used only as a yardstick: minimize

    ||A x - b||_p + theta <x, log x> + (penalty / 2) <x, W x>

over per-node simplex blocks by subgradient steps and blockwise Euclidean
projection.  Consensus is only encouraged through the quadratic penalty, so
the method has no dual certificate; trace rows carry infinite dual_obj/gap.
"""

import numpy as np

from .network import GossipMatrix
from .problem import consensus_residual, primal_objective
from .trace import SolverTrace

# Floor inside the entropy gradient; the true subgradient blows up at 0.
ENTROPY_FLOOR = 1e-300


def project_simplex_rows(V):
    """Rowwise Euclidean projection onto the probability simplex (sort-based)."""
    V = np.asarray(V, dtype=float)
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    j = np.arange(1, V.shape[1] + 1)
    rho = np.sum(U - css / j > 0.0, axis=1)
    lam = -css[np.arange(V.shape[0]), rho - 1] / rho
    return np.maximum(V + lam[:, None], 0.0)


def _parse_step_rule(rule):
    try:
        name, raw = str(rule).split(":")
        c = float(raw)
    except ValueError:
        raise ValueError(
            f"step rule {rule!r} not understood; use 'constant:c' or 'sqrt:c'"
        ) from None
    if c < 0.0:
        raise ValueError("step constant must be nonnegative")
    if name == "constant":
        return lambda k: c
    if name == "sqrt":
        return lambda k: c / np.sqrt(k + 1.0)
    raise ValueError(f"unknown step rule {name!r}")


def _norm_subgradient(residual, p):
    if p == 1.0:
        return np.sign(residual)
    if p == 2.0:
        nrm = np.linalg.norm(residual)
        return residual / nrm if nrm > 0.0 else np.zeros_like(residual)
    # generic p > 1: gradient of ||r||_p away from 0
    nrm = np.linalg.norm(residual, p)
    if nrm == 0.0:
        return np.zeros_like(residual)
    return np.sign(residual) * (np.abs(residual) / nrm) ** (p - 1.0)


def subgradient_baseline(inst, W, steps, step_rule="sqrt:0.1", penalty=1.0,
                         seed=0, trace_every=1):
    """Run the comparator and return its trace.

    The starting blocks are random simplex points from the given seed, so the
    whole run is deterministic per (instance, seed, rule).  Each iteration
    costs one gossip exchange (the penalty term) and one local pass.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    step_of = _parse_step_rule(step_rule)
    Wm = W.W if isinstance(W, GossipMatrix) else np.asarray(W, float)
    rng = np.random.default_rng(seed)
    X = rng.dirichlet(np.ones(inst.d), size=inst.m)
    trace = SolverTrace()

    def record(k, n_round):
        xbar = np.maximum(X.mean(axis=0), 0.0)
        xbar /= xbar.sum()
        trace.append(k, np.inf, primal_objective(inst, xbar), np.inf,
                     consensus_residual(Wm, X), n_round, n_round, 0.0)

    record(0, 0)
    for k in range(steps):
        residual = np.einsum("ind,id->in", inst.A, X).reshape(-1) - inst.stacked_b()
        dual_vec = _norm_subgradient(residual, inst.p).reshape(inst.m, inst.n)
        G = np.einsum("ind,in->id", inst.A, dual_vec)
        G += inst.theta * (np.log(np.maximum(X, ENTROPY_FLOOR)) + 1.0)
        G += penalty * (Wm @ X)  # the one term that talks to neighbours
        X = project_simplex_rows(X - step_of(k) * G)
        if (k + 1) % trace_every == 0 or k + 1 == steps:
            record(k + 1, k + 1)
    return trace
