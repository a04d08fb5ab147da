"""Independent reference implementations used to cross-check the package.

Everything here is written against dense matrices and textbook update rules,
on purpose: these oracles share no code with the package beyond the raw
problem data, so agreement is meaningful evidence of correctness.
"""

import math

import numpy as np


def dense_operators(inst, W):
    """Dense lifted matrices: kron(W, I_d), the block-diagonal data map, and b."""
    Wm = W.W if hasattr(W, "W") else np.asarray(W, dtype=float)
    Wk = np.kron(Wm, np.eye(inst.d))
    Ak = np.zeros((inst.m * inst.n, inst.m * inst.d))
    for i in range(inst.m):
        Ak[i * inst.n : (i + 1) * inst.n, i * inst.d : (i + 1) * inst.d] = inst.A[i]
    return Wk, Ak, inst.b.reshape(-1).copy()


def _lse_rows(T, theta):
    M = T.max(axis=1, keepdims=True)
    return M[:, 0] + theta * np.log(np.exp((T - M) / theta).sum(axis=1))


def _softmax_rows(T, theta):
    E = np.exp((T - T.max(axis=1, keepdims=True)) / theta)
    return E / E.sum(axis=1, keepdims=True)


def dense_dual_value(z, s, inst, Wk, Ak, b):
    T = -(Wk @ z + Ak.T @ s).reshape(inst.m, inst.d)
    return float(s @ b) + float(_lse_rows(T, inst.theta).sum())


def dense_dual_grad(z, s, inst, Wk, Ak, b):
    T = -(Wk @ z + Ak.T @ s).reshape(inst.m, inst.d)
    xhat = _softmax_rows(T, inst.theta).reshape(-1)
    return -(Wk @ xhat), b - Ak @ xhat


def fista_reference(inst, W, mode, iters, L=None, nu=0.0):
    """Accelerated proximal gradient on the dense dual formulation.

    mode selects the s-block prox: 'box' clips to [-1, 1], 'ball2' projects
    onto the Euclidean unit ball, 'penalty' shrinks by 1 / (1 + 2 nu / L).
    Returns (z, s, best dual value seen).
    """
    Wk, Ak, b = dense_operators(inst, W)
    if L is None:
        # global bound m (lambda_max^2 + sigma_max^2) / theta from dense norms
        lam_sq = float(np.linalg.eigvalsh(Wk @ Wk).max())
        sig_sq = float(np.linalg.norm(Ak, 2)) ** 2
        L = inst.m * (lam_sq + sig_sq) / inst.theta

    def prox_s(v):
        if mode == "box":
            return np.clip(v, -1.0, 1.0)
        if mode == "ball2":
            nrm = float(np.linalg.norm(v))
            return v if nrm <= 1.0 else v / nrm
        if mode == "penalty":
            return v / (1.0 + 2.0 * nu / L)
        raise ValueError(mode)

    z = np.zeros(inst.m * inst.d)
    s = np.zeros(inst.m * inst.n)
    zy, sy = z.copy(), s.copy()
    t = 1.0
    best = math.inf
    for _ in range(iters):
        gz, gs = dense_dual_grad(zy, sy, inst, Wk, Ak, b)
        zn = zy - gz / L
        sn = prox_s(sy - gs / L)
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        zy = zn + (t - 1.0) / tn * (zn - z)
        sy = sn + (t - 1.0) / tn * (sn - s)
        z, s, t = zn, sn, tn
        val = dense_dual_value(z, s, inst, Wk, Ak, b)
        if mode == "penalty":
            val += nu * float(s @ s)
        if val < best:
            best = val
    return z, s, best


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = idx[u - css / idx > 0][-1]
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def primal_subgradient_reference(inst, iters):
    """Projected subgradient on the single-simplex objective with averaging.

    The entropy term is theta-strongly convex on the simplex, so the classic
    2 / (theta (k+1)) step with linear-weight averaging converges at O(1/k).
    Returns (x_average, objective value at x_average computed directly).
    """
    x = np.full(inst.d, 1.0 / inst.d)
    acc = np.zeros(inst.d)
    wsum = 0.0
    A = inst.A.reshape(inst.m * inst.n, inst.d)
    b = inst.b.reshape(-1)
    for k in range(1, iters + 1):
        r = A @ x - b
        if inst.p == 2.0:
            nr = float(np.linalg.norm(r))
            gn = A.T @ (r / nr) if nr > 0.0 else np.zeros(inst.d)
        elif inst.p == 1.0:
            gn = A.T @ np.sign(r)
        else:
            raise ValueError("reference supports p in {1, 2}")
        g = gn / inst.m + inst.theta * (np.log(np.maximum(x, 1e-300)) + 1.0)
        x = project_simplex(x - (2.0 / (inst.theta * (k + 1))) * g)
        acc += k * x
        wsum += k
    xavg = acc / wsum
    r = A @ xavg - b
    pos = xavg[xavg > 0.0]
    value = float(np.linalg.norm(r, inst.p)) / inst.m + inst.theta * float(
        np.sum(pos * np.log(pos))
    )
    return xavg, value
