"""Primal recovery from dual iterates and duality-gap reporting."""

import math
from dataclasses import dataclass

import numpy as np

from .dual import _neg_link, _rows_lse, _rows_softmax, conj_F, is_infinite
from .problem import PrimalState, apply_blocks, consensus_residual, entropy


@dataclass(frozen=True)
class GapReport:
    """Certificate bundle at a dual point.

    dual_value is H(z, s); the lower bound on the distributed primal is
    Phi = -H, so gap = primal_value - Phi = primal_value + dual_value.
    An infeasible s in the hard-constrained mode yields an infinite gap.
    """

    primal_value: float
    dual_value: float
    gap: float
    consensus_residual: float
    y_residual: float


def primal_from_dual(state, inst, W):
    """Map a dual point to per-node primal blocks via the block softmax.

    x_i = softmax(-[Wz + A^T s]_i / theta) is exactly the gradient of the
    conjugate entropy term, so it inherits simplex feasibility to rounding.
    """
    T = _neg_link(inst, W, state)
    X = _rows_softmax(T, inst.theta)
    return PrimalState(X, apply_blocks(inst, X))


def consensus_candidate(ps):
    """Average the blocks and renormalize; exact for strictly positive blocks."""
    x = np.maximum(ps.x_blocks.mean(axis=0), 0.0)
    return x / x.sum()


def ergodic_average(history, weights):
    """Weighted average of primal snapshots, blocks renormalized to the simplex.

    The linked vectors y are averaged with the same weights, so the result of
    averaging recovered states stays consistent with its blocks to rounding.
    """
    history = list(history)
    if not history:
        raise ValueError("cannot average an empty history")
    w = np.asarray(list(weights), dtype=float)
    if w.shape != (len(history),):
        raise ValueError("need exactly one weight per snapshot")
    if w.min() <= 0.0:
        raise ValueError("weights must be positive")
    X = np.tensordot(w, np.stack([ps.x_blocks for ps in history]), axes=1)
    Y = np.tensordot(w, np.stack([ps.y for ps in history]), axes=1)
    X = np.maximum(X / w.sum(), 0.0)
    X /= X.sum(axis=1, keepdims=True)
    return PrimalState(X, Y / w.sum())


def duality_gap(state, inst, W, nu=0.0, q_exponent=None):
    """Gap between the consensual recovered point and the dual certificate.

    The primal side evaluates the distributed objective at the renormalized
    block mean replicated to every node; the dual side is Phi = -conj_F(s) -
    conj_G(-Wz - A^T s).  nu and q_exponent are accepted to mirror the solver
    signatures; the certificate itself is penalty-free, so only the problem's
    own conjugate pairing enters.  Weak duality makes gap >= 0 up to rounding
    whenever s is feasible; an infeasible s reports an infinite gap rather
    than raising.
    """
    del nu, q_exponent
    ps = primal_from_dual(state, inst, W)
    xbar = consensus_candidate(ps)
    residual = inst.stacked_A() @ xbar - inst.stacked_b()
    primal = float(np.linalg.norm(residual, inst.p)) + inst.m * inst.theta * entropy(xbar)
    cres = consensus_residual(W, ps.x_blocks)
    y_res = float(np.linalg.norm(ps.y - apply_blocks(inst, ps.x_blocks)))
    fstar = conj_F(state.s, inst)
    if is_infinite(fstar):
        return GapReport(primal, math.inf, math.inf, cres, y_res)
    T = _neg_link(inst, W, state)
    h = float(state.s @ inst.stacked_b()) + float(_rows_lse(T, inst.theta).sum())
    return GapReport(primal, h, primal + h, cres, y_res)
