"""Proximal maps for the dual regularizer and the box projection.

The regularizer R(s) = nu ||s||_q^q is separable, so its prox reduces to the
scalar problem min_s (t - s)^2 / (2 gamma) + nu |s|^q.  For q > 1 the
stationarity equation

    t = s + gamma q nu |s|^(q-1) sign(s)

is solved by bisection on the magnitude of s; the sign factor matters for
t < 0.  q = 1 is the soft-thresholding kink, handled in closed form.  For
q = inf the regularizer degenerates to the hard ball constraint and the prox
is the box projection.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dual import DualState

BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ProxParams:
    """Step gamma, penalty weight nu, exponent q, and bisection tolerance."""

    gamma: float
    nu: float
    q_exponent: float
    tol: float = 1e-12

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.nu < 0.0:
            raise ValueError("nu must be nonnegative")
        if self.q_exponent < 1.0:
            raise ValueError("q must be at least 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


def prox_lq_scalar(t, params):
    """Minimizer of (t - s)^2 / (2 gamma) + nu |s|^q over real s.

    Bisects the magnitude equation r + gamma q nu r^(q-1) = |t| on [0, |t|]
    down to ``params.tol``; the result keeps the sign of t and never exceeds
    |t|.  Exceeding the iteration cap is an internal error and raises.
    """
    t = float(t)
    q = params.q_exponent
    if math.isinf(q):
        return min(1.0, max(-1.0, t))
    if params.nu == 0.0 or t == 0.0:
        return t
    if q == 1.0:
        shift = params.gamma * params.nu
        return math.copysign(max(abs(t) - shift, 0.0), t)
    coef = params.gamma * q * params.nu
    target = abs(t)
    lo, hi = 0.0, target
    iters = 0
    while hi - lo > params.tol:
        if iters >= BISECT_MAX_ITER:
            raise RuntimeError(
                f"prox bisection failed to reach tol={params.tol} within "
                f"{BISECT_MAX_ITER} iterations (|t|={target})"
            )
        mid = 0.5 * (lo + hi)
        if mid + coef * mid ** (q - 1.0) <= target:
            lo = mid
        else:
            hi = mid
        iters += 1
    return math.copysign(0.5 * (lo + hi), t)


def _bisect_magnitudes(target, coef, q, tol):
    # vectorized counterpart of the scalar bisection, same cap and tolerance
    lo = np.zeros_like(target)
    hi = target.copy()
    iters = 0
    while float(np.max(hi - lo, initial=0.0)) > tol:
        if iters >= BISECT_MAX_ITER:
            raise RuntimeError(
                f"prox bisection failed to reach tol={tol} within "
                f"{BISECT_MAX_ITER} iterations"
            )
        mid = 0.5 * (lo + hi)
        below = mid + coef * mid ** (q - 1.0) <= target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        iters += 1
    return 0.5 * (lo + hi)


def prox_R(state, params):
    """Prox of the separable dual regularizer: identity in z, elementwise in s.

    Closed forms cover nu = 0, q = 1 (soft threshold), q = 2, and q = inf
    (box projection); other exponents use the vectorized bisection, which
    agrees with prox_lq_scalar to its tolerance.
    """
    s = state.s
    if math.isinf(params.q_exponent):
        return DualState(state.z.copy(), project_box(s))
    if params.nu == 0.0:
        return DualState(state.z.copy(), s.copy())
    q = params.q_exponent
    if q == 1.0:
        shift = params.gamma * params.nu
        new_s = np.sign(s) * np.maximum(np.abs(s) - shift, 0.0)
    elif q == 2.0:
        new_s = s / (1.0 + 2.0 * params.gamma * params.nu)
    else:
        coef = params.gamma * q * params.nu
        new_s = np.sign(s) * _bisect_magnitudes(np.abs(s), coef, q, params.tol)
    return DualState(state.z.copy(), new_s)


def project_box(s):
    """Euclidean projection onto the unit box [-1, 1]^k."""
    return np.clip(np.asarray(s, dtype=float), -1.0, 1.0)
