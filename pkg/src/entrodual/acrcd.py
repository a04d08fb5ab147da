"""Accelerated randomized block-coordinate descent on the hard-constrained dual.

Designed for the p = 1 case, where the dual ball is the box ||s||_inf <= 1
and the two natural blocks (z, s) have very different smoothness.  Each
iteration couples the running pair, flips a coin with probability eta for
the z block, and moves only the sampled block:

    alpha_{k+1} = (k + 2) / 8,   tau_k = 2 / (k + 2)
    (z, s)^{k+1} = tau_k (z_, s_) + (1 - tau_k) (z-, s-)        midpoints
    z branch:  z- <- z - grad_z H / L_z,   z_ <- z_ - 2 alpha grad_z H / L_z
    s branch:  same with L_s and a box projection on both updates

Only the z branch pays a communication round; the s branch is node-local.
The inner softmax point is shared by both partial gradients, so it is
computed once per iteration regardless of the coin.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .dual import DualState, dual_gradient, dual_objective, lipschitz_constants
from .errors import NumericFailure
from .prox import project_box
from .recovery import duality_gap
from .trace import SolverTrace

ETA_IDENTITY_TOL = 1e-12


@dataclass
class ACRCDConfig:
    """Block steps and the sampling coin; unset constants resolve at run time.

    The coin stream comes from a PCG64 generator seeded with rng_seed, one
    uniform draw per iteration, so runs are reproducible bit for bit.
    """

    rng_seed: int
    L_z: float | None = None
    L_s: float | None = None
    eta: float | None = None
    max_iter: int = 10000
    trace_every: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.eta is not None and not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie strictly in (0, 1)")
        if self.eta is not None and self.L_z is not None and self.L_s is not None:
            implied = math.sqrt(self.L_z) / (math.sqrt(self.L_z) + math.sqrt(self.L_s))
            if abs(self.eta - implied) > ETA_IDENTITY_TOL:
                raise ValueError(
                    f"eta={self.eta!r} inconsistent with block constants "
                    f"(sqrt(L_z)/(sqrt(L_z)+sqrt(L_s))={implied!r})"
                )


@dataclass
class ACRCDState:
    """Running pair (bar), momentum pair (under), and the last midpoints."""

    z_bar: np.ndarray
    z_under: np.ndarray
    s_bar: np.ndarray
    s_under: np.ndarray
    z_mid: np.ndarray
    s_mid: np.ndarray
    k: int = 0
    n_comm: int = 0
    n_comp: int = 0


def acrcd_init(z0, s0):
    z0 = np.asarray(z0, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    return ACRCDState(z0.copy(), z0.copy(), s0.copy(), s0.copy(), z0.copy(), s0.copy())


def step_coefficients(k):
    """(alpha_{k+1}, tau_k) for iteration counter k, recomputed every step."""
    return (k + 2) / 8.0, 2.0 / (k + 2)


def acrcd_step(state, cfg, rng, grad):
    """Advance one iteration; exactly one coin draw, one sampled block moved.

    Parameters
    ----------
    state : ACRCDState
    cfg : ACRCDConfig
        Must carry numeric L_z, L_s, eta.
    rng : numpy.random.Generator
        Source of the block-sampling coin.
    grad : callable
        DualState -> DualState gradient of H; both components may be read,
        but only the sampled block's step is taken (and billed).
    """
    if cfg.L_z is None or cfg.L_s is None or cfg.eta is None:
        raise ValueError("acrcd_step needs a resolved config (L_z, L_s, eta)")
    alpha, tau = step_coefficients(state.k)
    z_mid = tau * state.z_under + (1.0 - tau) * state.z_bar
    s_mid = tau * state.s_under + (1.0 - tau) * state.s_bar
    take_z = rng.random() < cfg.eta
    g = grad(DualState(z_mid, s_mid))
    if take_z:
        z_bar = z_mid - g.z / cfg.L_z
        z_under = state.z_under - (2.0 * alpha / cfg.L_z) * g.z
        return ACRCDState(z_bar, z_under, state.s_bar, state.s_under,
                          z_mid, s_mid, state.k + 1, state.n_comm + 1, state.n_comp)
    s_bar = project_box(s_mid - g.s / cfg.L_s)
    s_under = project_box(state.s_under - (2.0 * alpha / cfg.L_s) * g.s)
    return ACRCDState(state.z_bar, state.z_under, s_bar, s_under,
                      z_mid, s_mid, state.k + 1, state.n_comm, state.n_comp + 1)


def run_acrcd(inst, W, cfg):
    """Minimize the hard-constrained dual of a p = 1 instance from the origin.

    Returns
    -------
    (DualState, SolverTrace)
        Best (z_bar, s_bar) snapshot by dual objective, and the trace; trace
        rows report the running best, so the dual_obj column is monotone.

    Raises
    ------
    ValueError
        If the instance has p != 1 (use run_stm for general p).
    """
    if inst.p != 1.0:
        raise ValueError("block-coordinate solver handles p = 1 only; use run_stm")
    consts = None
    if cfg.L_z is None or cfg.L_s is None or cfg.eta is None:
        consts = lipschitz_constants(inst, W)
    resolved = replace(
        cfg,
        L_z=cfg.L_z if cfg.L_z is not None else consts.L_z,
        L_s=cfg.L_s if cfg.L_s is not None else consts.L_s,
        eta=cfg.eta if cfg.eta is not None else consts.eta,
    )
    rng = np.random.Generator(np.random.PCG64(resolved.rng_seed))

    def grad(ds):
        g_z, g_s = dual_gradient(ds, inst, W)
        return DualState(g_z, g_s)

    def objective(ds):
        return dual_objective(ds, inst, W, 0.0, math.inf)

    t0 = time.perf_counter()
    state = acrcd_init(np.zeros(inst.m * inst.d), np.zeros(inst.m * inst.n))
    best = DualState(state.z_bar, state.s_bar).copy()
    best_value = objective(best)
    trace = SolverTrace()

    def record(k):
        rep = duality_gap(best, inst, W)
        wall = (time.perf_counter() - t0) * 1e3 if resolved.timing else 0.0
        trace.append(k, best_value, rep.primal_value / inst.m, rep.gap,
                     rep.consensus_residual, state.n_comm, state.n_comp, wall)

    record(0)
    for _ in range(resolved.max_iter):
        state = acrcd_step(state, resolved, rng, grad)
        candidate = DualState(state.z_bar, state.s_bar)
        if not candidate.is_finite():
            raise NumericFailure(f"non-finite iterate at iteration {state.k}")
        value = objective(candidate)
        if value < best_value:
            best_value = value
            best = candidate.copy()
        if state.k % resolved.trace_every == 0 or state.k == resolved.max_iter:
            record(state.k)
    return best, trace
