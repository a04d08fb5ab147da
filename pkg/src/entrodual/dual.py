"""Conjugate functions, the smooth dual objective, and its constants.

Dualizing the consensus constraint (multiplier z) and the link y = A x
(multiplier s) turns the distributed problem into

    min_{z, s}  H(z, s) + R(s),
    H(z, s) = <s, b> + sum_i g*(-[Wz + A^T s]_i),

where g* is the conjugate of the block entropy (a scaled log-sum-exp) and R
is either nu ||s||_q^q (finite q) or the hard constraint ||s||_inf <= 1
(q = inf, i.e. p = 1).  H is smooth; its gradient needs one gossip exchange
for the z block and only local products for the s block.
"""

import math
from dataclasses import dataclass

import numpy as np

from .network import GossipMatrix, spectral_constants
from .problem import data_constants

# Feasibility slack for the dual-ball constraint ||s||_q <= 1.
DUAL_BALL_SLACK = 1e-9
ETA_IDENTITY_TOL = 1e-12


class _Infinite:
    """Explicit marker for +infinity conjugate values; keeps tests exact."""

    __slots__ = ()

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()


def is_infinite(value):
    return value is INFINITE


@dataclass
class DualState:
    """Dual variables: z (m*d,) pairs with consensus, s (m*n,) with y = A x."""

    z: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.s = np.asarray(self.s, dtype=float)

    @classmethod
    def zeros(cls, inst):
        return cls(np.zeros(inst.m * inst.d), np.zeros(inst.m * inst.n))

    def copy(self):
        return DualState(self.z.copy(), self.s.copy())

    def norm_sq(self):
        return float(self.z @ self.z + self.s @ self.s)

    def is_finite(self):
        return bool(np.isfinite(self.z).all() and np.isfinite(self.s).all())


@dataclass(frozen=True)
class DualConstants:
    """Smoothness constants of H and the block-sampling probability eta.

    eta equals both lambda_max(W) / (lambda_max(W) + sigma_max(A)) and
    sqrt(L_z) / (sqrt(L_z) + sqrt(L_s)); the identity is asserted here.
    Radius bounds are optional because they need a solution estimate.
    """

    L_H: float
    L_z: float
    L_s: float
    eta: float
    R_dual_sq: float | None = None
    R_z_sq: float | None = None
    R_s_sq: float | None = None

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie strictly in (0, 1), got {self.eta}")
        alt = math.sqrt(self.L_z) / (math.sqrt(self.L_z) + math.sqrt(self.L_s))
        if abs(self.eta - alt) > ETA_IDENTITY_TOL:
            raise ValueError(
                f"eta={self.eta!r} disagrees with sqrt(L_z)/(sqrt(L_z)+sqrt(L_s))={alt!r}"
            )


def conj_g(t, theta):
    """Conjugate of the entropy block: theta * log(sum exp(t / theta)).

    Evaluated in max-shifted form so large arguments cannot overflow.
    """
    t = np.asarray(t, dtype=float)
    tmax = float(t.max())
    return tmax + theta * math.log(float(np.sum(np.exp((t - tmax) / theta))))


def softmax_map(t, theta):
    """Gradient of conj_g: the simplex point exp(t/theta) / sum exp(t/theta)."""
    t = np.asarray(t, dtype=float)
    e = np.exp((t - t.max()) / theta)
    return e / e.sum()


def conj_F(t, inst):
    """Conjugate of the p-norm loss: <t, b> on the dual-norm unit ball, else INFINITE."""
    t = np.asarray(t, dtype=float)
    if np.linalg.norm(t, inst.q_exponent) <= 1.0 + DUAL_BALL_SLACK:
        return float(t @ inst.stacked_b())
    return INFINITE


def _as_blocks(t, d):
    t = np.asarray(t, dtype=float)
    if t.ndim == 2:
        return t
    if d is None or t.size % d != 0:
        raise ValueError("flat input needs a block size d dividing its length")
    return t.reshape(-1, d)


def _rows_lse(T, theta):
    # stabilized per-row log-sum-exp, scaled by theta
    M = T.max(axis=1, keepdims=True)
    return M[:, 0] + theta * np.log(np.exp((T - M) / theta).sum(axis=1))


def _rows_softmax(T, theta):
    E = np.exp((T - T.max(axis=1, keepdims=True)) / theta)
    return E / E.sum(axis=1, keepdims=True)


def conj_G(t, theta, d=None):
    """Separable sum of conj_g over blocks of length d (rows if t is 2-D)."""
    return float(_rows_lse(_as_blocks(t, d), theta).sum())


def _neg_link(inst, W, state):
    """Blocks of -(Wz + A^T s) as an (m, d) array; the argument fed to conj_G."""
    Z = state.z.reshape(inst.m, inst.d)
    S = state.s.reshape(inst.m, inst.n)
    Wm = W.W if isinstance(W, GossipMatrix) else np.asarray(W, float)
    return -(Wm @ Z + np.einsum("ind,in->id", inst.A, S))


def dual_objective(state, inst, W, nu, q_exponent=None):
    """H(z, s) plus the regularizer nu ||s||_q^q.

    For q = inf the regularizer is replaced by the hard ball constraint
    ||s||_inf <= 1 (violations beyond the slack raise) and contributes 0.
    """
    qe = inst.q_exponent if q_exponent is None else q_exponent
    T = _neg_link(inst, W, state)
    h = float(state.s @ inst.stacked_b()) + float(_rows_lse(T, inst.theta).sum())
    if math.isinf(qe):
        if np.abs(state.s).max(initial=0.0) > 1.0 + DUAL_BALL_SLACK:
            raise ValueError("q = inf mode requires ||s||_inf <= 1")
        return h
    if nu < 0.0:
        raise ValueError("nu must be nonnegative")
    return h + nu * float(np.sum(np.abs(state.s) ** qe))


def dual_gradient(state, inst, W):
    """(grad_z H, grad_s H) = (-W xhat, b - A xhat) with xhat the block softmax.

    The z component is the only one that touches neighbours; evaluating it
    costs one communication round, the s component none.
    """
    T = _neg_link(inst, W, state)
    X = _rows_softmax(T, inst.theta)
    Wm = W.W if isinstance(W, GossipMatrix) else np.asarray(W, float)
    g_z = -(Wm @ X)
    g_s = inst.b - np.einsum("ind,id->in", inst.A, X)
    return g_z.reshape(-1), g_s.reshape(-1)


def _sigma_max_blocks(inst):
    return float(
        max(np.linalg.svd(inst.A[i], compute_uv=False)[0] for i in range(inst.m))
    )


def lipschitz_constants(inst, W):
    """Global and per-block gradient Lipschitz bounds, plus eta.

    L_H = m (sigma_max^2 + lambda_max^2) / theta,
    L_z = sqrt(m) lambda_max^2 / theta,  L_s = sqrt(m) sigma_max^2 / theta.
    """
    sW = W.lambda_max
    sA = _sigma_max_blocks(inst)
    L_H = inst.m * (sA**2 + sW**2) / inst.theta
    L_z = math.sqrt(inst.m) * sW**2 / inst.theta
    L_s = math.sqrt(inst.m) * sA**2 / inst.theta
    return DualConstants(L_H, L_z, L_s, eta=sW / (sW + sA))


def _log_shift_sq(x_star):
    x = np.asarray(x_star, dtype=float)
    if x.min() <= 0.0:
        raise ValueError("radius bounds need a strictly interior simplex point")
    v = np.log(x) + 1.0
    return float(v @ v)


def dual_radius(inst, W, x_star):
    """Bound R^2 on ||q*||^2 driven by the solution's log-coordinates.

    R^2 = theta^2 m ||log x* + 1||^2 / min(sigma_min_plus^2, lambda_min_plus^2).
    Valid when the dual solution has no component in the kernel of the
    stacked constraint map; see dual_kernel_floor for a diagnostic.
    """
    dc = data_constants(inst)
    denom = min(dc.sigma_min_plus_A**2, W.lambda_min_plus**2)
    return inst.theta**2 * inst.m * _log_shift_sq(x_star) / denom


def block_radii(inst, W, x_star, q_exponent):
    """Per-block radius bounds (R_z^2, R_s^2) used by the coordinate method.

    R_s^2 = max(1, (mn)^(1 - 2/q)) bounds the dual-ball radius in 2-norm;
    R_z^2 folds the solution shift and the data through lambda_min_plus.
    """
    if q_exponent < 1.0:
        raise ValueError("q must be at least 1")
    mn = inst.m * inst.n
    if math.isinf(q_exponent):
        R_s_sq = float(mn)
    else:
        R_s_sq = max(1.0, float(mn) ** (1.0 - 2.0 / q_exponent))
    sA = _sigma_max_blocks(inst)
    num = 2.0 * inst.theta**2 * inst.m * _log_shift_sq(x_star) + 2.0 * sA**2 * R_s_sq
    return num / W.lambda_min_plus**2, R_s_sq


def default_regularizer_weight(inst, target_eps, q_exponent=None):
    """nu = eps / (2 R_s^2): the penalty perturbs the dual optimum by <= eps/2."""
    if target_eps <= 0.0:
        raise ValueError("target accuracy must be positive")
    qe = inst.q_exponent if q_exponent is None else q_exponent
    mn = inst.m * inst.n
    if math.isinf(qe):
        R_s_sq = float(mn)
    else:
        R_s_sq = max(1.0, float(mn) ** (1.0 - 2.0 / qe))
    return target_eps / (2.0 * R_s_sq)


def dual_kernel_floor(inst, W):
    """(exact, claimed) smallest positive eigenvalue of W^2 + A^T A.

    The radius bounds divide by the claimed per-factor floor
    min(lambda_min_plus(W)^2, sigma_min_plus(A)^2); that floor matches the
    exact value only when the two kernels line up, so callers should compare
    the pair before trusting dual_radius as a hard bound.
    """
    md = inst.m * inst.d
    Wm = W.W if isinstance(W, GossipMatrix) else np.asarray(W, float)
    M = np.kron(Wm @ Wm, np.eye(inst.d))
    for i in range(inst.m):
        sl = slice(i * inst.d, (i + 1) * inst.d)
        M[sl, sl] += inst.A[i].T @ inst.A[i]
    evals = np.linalg.eigvalsh(M)
    lam_max = float(evals[-1])
    positive = evals[evals > 1e-12 * lam_max]
    exact = float(positive[0]) if positive.size else 0.0
    dc = data_constants(inst)
    if isinstance(W, GossipMatrix):
        lam_min_plus = W.lambda_min_plus
    else:
        lam_min_plus = spectral_constants(Wm)[1]
    claimed = min(lam_min_plus**2, dc.sigma_min_plus_A**2)
    return exact, claimed
