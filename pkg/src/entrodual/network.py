"""Communication graphs and their gossip matrices.

A gossip matrix is any symmetric positive semidefinite matrix whose sparsity
pattern matches the graph and whose kernel is exactly the consensus line
span(1).  The default construction is the unnormalized graph Laplacian.
"""

from dataclasses import dataclass

import numpy as np

# Eigenvalues below this fraction of lambda_max count as the kernel.
ZERO_EIG_REL = 1e-9
# Slack for the PSD / kernel checks, relative to lambda_max.
SPECTRAL_SLACK_REL = 1e-10

GENERATOR_NAMES = ("path", "ring", "complete", "star", "erdos-renyi")


def _adjacency_lists(m, edges):
    nbrs = [[] for _ in range(m)]
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    return nbrs


def _connected(m, edges):
    # breadth-first search from node 0
    nbrs = _adjacency_lists(m, edges)
    seen = [False] * m
    seen[0] = True
    queue = [0]
    while queue:
        i = queue.pop()
        for j in nbrs[i]:
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return all(seen)


@dataclass(frozen=True)
class Topology:
    """Connected undirected graph on nodes 0..m-1 with normalized edges (i < j)."""

    m: int
    edges: tuple

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("node count must be at least 1")
        seen = set()
        for edge in self.edges:
            i, j = edge
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise ValueError(f"edge {edge} out of range for m={self.m}")
            if j < i:
                raise ValueError(f"edge {edge} not normalized as (i, j) with i < j")
            if edge in seen:
                raise ValueError(f"duplicate edge {edge}")
            seen.add(edge)
        if not _connected(self.m, self.edges):
            raise ValueError(
                "graph is disconnected: the gossip-matrix kernel would be larger "
                "than the consensus line"
            )

    @classmethod
    def from_edges(cls, m, edges):
        """Normalize arbitrary (i, j) pairs into a sorted, deduplicated Topology."""
        normalized = sorted({(min(i, j), max(i, j)) for i, j in edges})
        return cls(m, tuple(normalized))


def topology_path(m):
    return Topology(m, tuple((i, i + 1) for i in range(m - 1)))


def topology_ring(m):
    # the 2-node ring degenerates to a single edge
    if m <= 2:
        return topology_path(m)
    edges = [(i, i + 1) for i in range(m - 1)] + [(0, m - 1)]
    return Topology.from_edges(m, edges)


def topology_complete(m):
    return Topology(m, tuple((i, j) for i in range(m) for j in range(i + 1, m)))


def topology_star(m):
    return Topology(m, tuple((0, j) for j in range(1, m)))


def topology_erdos_renyi(m, p, seed):
    """G(m, p) sample from a seeded generator; raises if the draw is disconnected."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = [
        (i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < p
    ]
    if m > 1 and not _connected(m, edges):
        raise ValueError(
            f"erdos-renyi draw (m={m}, p={p}, seed={seed}) is disconnected; "
            "raise p or pick another seed"
        )
    return Topology(m, tuple(edges))


def make_topology(spec, m):
    """Build a topology from a generator spec string, e.g. "ring" or "erdos-renyi 0.4 7"."""
    parts = str(spec).split()
    if not parts:
        raise ValueError("empty topology spec")
    name, args = parts[0], parts[1:]
    if name == "path" and not args:
        return topology_path(m)
    if name == "ring" and not args:
        return topology_ring(m)
    if name == "complete" and not args:
        return topology_complete(m)
    if name == "star" and not args:
        return topology_star(m)
    if name == "erdos-renyi" and len(args) == 2:
        return topology_erdos_renyi(m, float(args[0]), int(args[1]))
    raise ValueError(
        f"unknown topology spec {spec!r}; generators: {', '.join(GENERATOR_NAMES)} "
        "(erdos-renyi takes: p seed)"
    )


def save_topology(topology, path):
    """Write the edge-list format: first line m, then one 'i j' line per edge."""
    lines = [str(topology.m)]
    lines += [f"{i} {j}" for i, j in topology.edges]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_topology(path):
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    lines = [(k + 1, line) for k, line in enumerate(raw) if line]
    if not lines:
        raise ValueError(f"{path}: empty topology file")
    try:
        m = int(lines[0][1])
    except ValueError:
        raise ValueError(f"{path}:{lines[0][0]}: node count must be an integer") from None
    edges = []
    for lineno, line in lines[1:]:
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
        try:
            edges.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: edge endpoints must be integers") from None
    try:
        return Topology.from_edges(m, edges)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class GossipMatrix:
    """Validated gossip matrix with its extreme spectrum.

    chi = lambda_max / lambda_min_plus is the spectral condition number
    governing how fast consensus information spreads.
    """

    W: np.ndarray
    lambda_max: float
    lambda_min_plus: float
    chi: float
    topology: Topology | None = None

    def __post_init__(self):
        self.W.setflags(write=False)

    @property
    def m(self):
        return self.W.shape[0]


def spectral_constants(W):
    """(lambda_max, lambda_min_plus) of a symmetric PSD matrix.

    Eigenvalues below ``ZERO_EIG_REL * lambda_max`` are treated as zero.
    Raises if there is no positive eigenvalue at all.
    """
    evals = np.linalg.eigvalsh(np.asarray(W, dtype=float))
    lam_max = float(evals[-1])
    if lam_max <= 0.0:
        raise ValueError("matrix has no positive eigenvalue")
    positive = evals[evals > ZERO_EIG_REL * lam_max]
    return lam_max, float(positive[0])


def _validate_spectrum(W, m):
    evals = np.linalg.eigvalsh(W)
    lam_max = float(evals[-1])
    if lam_max <= 0.0:
        raise ValueError("gossip matrix has no positive eigenvalue")
    slack = SPECTRAL_SLACK_REL * lam_max
    if float(evals[0]) < -slack:
        raise ValueError(f"gossip matrix is not PSD (min eigenvalue {evals[0]:.3e})")
    kernel_dim = int(np.sum(evals <= ZERO_EIG_REL * lam_max))
    if kernel_dim != 1:
        raise ValueError(
            f"gossip matrix kernel has dimension {kernel_dim}, expected exactly "
            "the consensus line (is the graph connected?)"
        )
    ones = np.ones(m)
    if np.linalg.norm(W @ ones) > slack * np.sqrt(m) * max(1.0, lam_max):
        raise ValueError("gossip matrix does not annihilate the consensus vector")
    lam_min_plus = float(evals[evals > ZERO_EIG_REL * lam_max][0])
    return lam_max, lam_min_plus


def build_laplacian(topology):
    """Gossip matrix from the unnormalized graph Laplacian of ``topology``."""
    m = topology.m
    W = np.zeros((m, m))
    for i, j in topology.edges:
        W[i, i] += 1.0
        W[j, j] += 1.0
        W[i, j] -= 1.0
        W[j, i] -= 1.0
    lam_max, lam_min_plus = _validate_spectrum(W, m)
    return GossipMatrix(W, lam_max, lam_min_plus, lam_max / lam_min_plus, topology)


def gossip_from_matrix(W, topology=None):
    """Accept a user-supplied gossip matrix after checking the standing assumptions.

    Checks: symmetry, positive semidefiniteness, kernel equal to the consensus
    line, and (when a topology is given) sparsity matching the edge set.
    """
    W = np.array(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError("gossip matrix must be square")
    m = W.shape[0]
    scale = max(1.0, float(np.abs(W).max()))
    if np.abs(W - W.T).max() > 1e-12 * scale:
        raise ValueError("gossip matrix must be symmetric")
    if topology is not None:
        if topology.m != m:
            raise ValueError("topology size does not match matrix size")
        allowed = set(topology.edges)
        for i in range(m):
            for j in range(i + 1, m):
                if W[i, j] != 0.0 and (i, j) not in allowed:
                    raise ValueError(f"nonzero entry at non-edge ({i}, {j})")
    lam_max, lam_min_plus = _validate_spectrum(W, m)
    return GossipMatrix(W, lam_max, lam_min_plus, lam_max / lam_min_plus, topology)


class LiftedMatrix:
    """Kronecker lift W (x) I_d applied without forming the dense product.

    One ``apply`` equals one synchronous exchange with graph neighbours, so the
    ``calls`` attribute can serve as a communication-round counter.
    """

    def __init__(self, W, d):
        self.W = np.asarray(W, dtype=float)
        self.d = int(d)
        self.m = self.W.shape[0]
        self.calls = 0

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ndim == 1
        out = self.W @ x.reshape(self.m, self.d)
        self.calls += 1
        return out.reshape(-1) if flat else out


def lift(gossip, d):
    """Implicit W (x) I_d operator acting on stacked (m*d,) or (m, d) arrays."""
    if d < 1:
        raise ValueError("block size d must be positive")
    W = gossip.W if isinstance(gossip, GossipMatrix) else np.asarray(gossip, float)
    return LiftedMatrix(W, d)
