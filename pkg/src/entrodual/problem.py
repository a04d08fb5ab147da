"""Problem data and primal objectives.

Each of the m nodes holds a local block (A_i, b_i); the shared decision
variable lives on the probability simplex and is regularized by entropy:

    min_{x in simplex}  (1/m) ||A x - b||_p  +  theta <x, log x>

with A the row-stack of the blocks.  The distributed form replicates x per
node, couples the copies through a gossip matrix, and drops the 1/m factor.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .network import GossipMatrix

SIMPLEX_TOL = 1e-9
# Singular values below this fraction of sigma_max count as zero.
ZERO_SV_REL = 1e-9
# Noise level (relative to scale) used when planting b = A x + noise.
NOISE_REL = 1e-2


def entropy(x):
    """<x, log x> with the continuous extension 0 log 0 = 0."""
    x = np.asarray(x, dtype=float)
    pos = x[x > 0.0]
    return float(np.sum(pos * np.log(pos)))


def check_simplex(x, tol=SIMPLEX_TOL):
    """Return x as an array after verifying nonnegativity and unit sum."""
    x = np.asarray(x, dtype=float)
    if x.min() < -tol:
        raise ValueError(f"point has negative entry {x.min():.3e}")
    if abs(x.sum() - 1.0) > tol:
        raise ValueError(f"point sums to {x.sum()!r}, not 1")
    return x


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable bundle of per-node data blocks.

    A has shape (m, n, d) with A[i] the block of node i; b has shape (m, n).
    """

    m: int
    n: int
    d: int
    p: float
    theta: float
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if min(self.m, self.n, self.d) < 1:
            raise ValueError("dimensions must be positive")
        if self.p < 1.0:
            raise ValueError("p must be at least 1")
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")
        A = np.ascontiguousarray(np.asarray(self.A, dtype=float))
        b = np.ascontiguousarray(np.asarray(self.b, dtype=float))
        if A.shape != (self.m, self.n, self.d):
            raise ValueError(f"A has shape {A.shape}, expected {(self.m, self.n, self.d)}")
        if b.shape != (self.m, self.n):
            raise ValueError(f"b has shape {b.shape}, expected {(self.m, self.n)}")
        if not (np.isfinite(A).all() and np.isfinite(b).all()):
            raise ValueError("data blocks must be finite")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def q_exponent(self):
        """Holder conjugate of p (math.inf when p = 1)."""
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    def stacked_A(self):
        """Row-stacked (m*n, d) view of the blocks."""
        return self.A.reshape(self.m * self.n, self.d)

    def stacked_b(self):
        return self.b.reshape(-1)


@dataclass(frozen=True)
class PrimalState:
    """Per-node simplex points x_blocks (m, d) and linked vector y (m*n,)."""

    x_blocks: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_blocks, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise ValueError("x_blocks must be a (m, d) array")
        if x.min() < -1e-12:
            raise ValueError(f"block entry {x.min():.3e} below zero")
        sums = x.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-12:
            raise ValueError("each block must sum to 1")
        object.__setattr__(self, "x_blocks", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class DataConstants:
    """Extreme singular values over the data blocks."""

    sigma_max_A: float
    sigma_min_plus_A: float


def data_constants(inst):
    """max_i sigma_max(A_i) and min_i sigma_min_plus(A_i).

    Singular values below ``ZERO_SV_REL * sigma_max`` are treated as zero;
    an all-zero block makes the constants meaningless and raises.
    """
    svals = [np.linalg.svd(inst.A[i], compute_uv=False) for i in range(inst.m)]
    sigma_max = float(max(s[0] for s in svals))
    if sigma_max <= 0.0:
        raise ValueError("all data blocks are zero")
    threshold = ZERO_SV_REL * sigma_max
    minima = []
    for i, s in enumerate(svals):
        positive = s[s > threshold]
        if positive.size == 0:
            raise ValueError(f"block A_{i} has no singular value above {threshold:.3e}")
        minima.append(float(positive[-1]))
    return DataConstants(sigma_max, min(minima))


def primal_objective(inst, x):
    """(1/m) ||A x - b||_p + theta <x, log x> at a simplex point x."""
    x = check_simplex(x)
    residual = inst.stacked_A() @ x - inst.stacked_b()
    return float(np.linalg.norm(residual, inst.p)) / inst.m + inst.theta * entropy(x)


def distributed_objective(inst, state):
    """||y - b||_p + theta <x, log x> on stacked per-node copies (no 1/m).

    At a consensual state with y = A x this equals m times primal_objective.
    """
    residual = state.y - inst.stacked_b()
    ent = entropy(state.x_blocks.reshape(-1))
    return float(np.linalg.norm(residual, inst.p)) + inst.theta * ent


def consensus_residual(W, x_blocks):
    """||(W (x) I) x||_2, zero exactly on consensual stacks."""
    Wm = W.W if isinstance(W, GossipMatrix) else np.asarray(W, float)
    return float(np.linalg.norm(Wm @ np.asarray(x_blocks, float)))


def apply_blocks(inst, x_blocks):
    """Blockwise product (A_1 x_1, ..., A_m x_m) flattened to (m*n,)."""
    return np.einsum("ind,id->in", inst.A, np.asarray(x_blocks, float)).reshape(-1)


def generate_instance(seed, m, n, d, p, theta, scale=1.0):
    """Random instance with a planted interior point.

    Entries of A_i are i.i.d. normal scaled by ``scale``; b_i = A_i x0 + noise
    with x0 a random simplex point and noise at NOISE_REL of the data scale,
    so a near-feasible consensual solution exists.  Same seed, same bits.
    """
    rng = np.random.default_rng(seed)
    A = scale * rng.standard_normal((m, n, d))
    x0 = rng.dirichlet(np.ones(d))
    noise = NOISE_REL * scale * rng.standard_normal((m, n))
    b = np.einsum("ind,d->in", A, x0) + noise
    return ProblemInstance(m, n, d, float(p), float(theta), A, b)


def instance_checksum(inst):
    """SHA-256 over the header and raw block bytes; pins generator output."""
    digest = hashlib.sha256()
    digest.update(f"{inst.m} {inst.n} {inst.d} {inst.p!r} {inst.theta!r}".encode())
    digest.update(inst.A.tobytes())
    digest.update(inst.b.tobytes())
    return digest.hexdigest()


def save_instance(inst, path):
    """Text format: header 'm n d p theta', then per block n rows of d+1
    comma-separated reals (the A_i row followed by the b_i entry)."""
    lines = [f"{inst.m} {inst.n} {inst.d} {inst.p!r} {inst.theta!r}"]
    for i in range(inst.m):
        for r in range(inst.n):
            row = [repr(float(v)) for v in inst.A[i, r]] + [repr(float(inst.b[i, r]))]
            lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path):
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    lines = [(k + 1, line) for k, line in enumerate(raw) if line]
    if not lines:
        raise ValueError(f"{path}: empty instance file")
    header = lines[0][1].split()
    if len(header) != 5:
        raise ValueError(f"{path}:{lines[0][0]}: header must be 'm n d p theta'")
    try:
        m, n, d = int(header[0]), int(header[1]), int(header[2])
        p, theta = float(header[3]), float(header[4])
    except ValueError:
        raise ValueError(f"{path}:{lines[0][0]}: malformed header {lines[0][1]!r}") from None
    body = lines[1:]
    if len(body) != m * n:
        raise ValueError(f"{path}: expected {m * n} data rows, found {len(body)}")
    A = np.empty((m, n, d))
    b = np.empty((m, n))
    for k, (lineno, line) in enumerate(body):
        fields = line.split(",")
        if len(fields) != d + 1:
            raise ValueError(f"{path}:{lineno}: expected {d + 1} values, got {len(fields)}")
        try:
            values = [float(v) for v in fields]
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed number in {line!r}") from None
        A[k // n, k % n] = values[:d]
        b[k // n, k % n] = values[d]
    return ProblemInstance(m, n, d, p, theta, A, b)
