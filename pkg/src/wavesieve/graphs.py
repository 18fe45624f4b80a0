"""Finite undirected graphs and lattices.

Construction and edge-list file io, extreme adjacency eigenvalues by power
iteration, the admissible dependence range they induce, conclique (proper
color class) partitions, and connected learn/test splits grown by BFS.
"""

import math
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np

from .rng import stream

__all__ = [
    "Graph", "ConcliquePartition", "LatticeIndexSet", "PowerIterationError",
    "load_graph", "save_graph", "torus_lattice", "torus_with_chords",
    "knn_geometric_graph", "eigen_bounds", "eta_range", "concliques",
    "connected_split",
]

DENSE_NODE_LIMIT = 5000
POWER_ITERATION_CAP = 100_000

# internal stream tags so one root seed can serve several operations
_TAG_KNN = 11
_TAG_CHORDS = 12
_TAG_SPLIT = 13
_TAG_POWER = 14


class PowerIterationError(RuntimeError):
    """Raised when power iteration fails to reach tolerance within the cap."""


class Graph:
    """Immutable undirected graph on nodes 0..n-1 without self loops.

    Carries lazily computed, cached spectral bounds and conclique partition;
    safe to share across threads once constructed.
    """

    def __init__(self, node_count, edges):
        node_count = int(node_count)
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u},{v}) outside 0..{node_count - 1}")
            seen.add((u, v) if u < v else (v, u))
        self.node_count = node_count
        self.edges = tuple(sorted(seen))
        self.edge_count = len(self.edges)

        nbr = [[] for _ in range(node_count)]
        for u, v in self.edges:
            nbr[u].append(v)
            nbr[v].append(u)
        self.neighbors = tuple(np.array(sorted(a), dtype=np.int64) for a in nbr)
        self.degrees = np.array([a.size for a in self.neighbors], dtype=np.int64)

        # flattened neighbor lists; segment i is neighbors[i]
        self._nbr_flat = (np.concatenate(self.neighbors)
                          if node_count and self.edge_count else np.empty(0, dtype=np.int64))
        bounds = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=bounds[1:])
        self._nbr_bounds = bounds

        self._adjacency = None
        self._eigen_cache = {}
        self._concliques = None

    def neighbor_sums(self, x):
        """Vector of sums of x over each node's neighbors (H @ x).

        One fixed summation order for every graph size, so results do not
        depend on whether a dense adjacency was ever materialized.
        """
        if self._nbr_flat.size == 0:
            return np.zeros(self.node_count)
        csum = np.concatenate(([0.0], np.cumsum(x[self._nbr_flat])))
        return csum[self._nbr_bounds[1:]] - csum[self._nbr_bounds[:-1]]

    def adjacency(self):
        """Dense symmetric 0/1 adjacency matrix (cached, limited to small graphs)."""
        if self._adjacency is None:
            if self.node_count > DENSE_NODE_LIMIT:
                raise ValueError(
                    f"dense adjacency limited to {DENSE_NODE_LIMIT} nodes, "
                    f"graph has {self.node_count}")
            H = np.zeros((self.node_count, self.node_count))
            for u, v in self.edges:
                H[u, v] = 1.0
                H[v, u] = 1.0
            self._adjacency = H
        return self._adjacency

    def is_connected(self):
        if self.node_count <= 1:
            return True
        return _bfs_order(self, 0).size == self.node_count

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


@dataclass(frozen=True)
class ConcliquePartition:
    """Node classes no two members of which are adjacent."""
    classes: tuple

    def __len__(self):
        return len(self.classes)

    def validate(self, graph):
        """Check the partition and within-class independence; raise on failure."""
        all_nodes = np.concatenate(self.classes) if self.classes else np.empty(0, int)
        if np.sort(all_nodes).tolist() != list(range(graph.node_count)):
            raise ValueError("classes do not partition the node set")
        for cls in self.classes:
            members = set(cls.tolist())
            for s in cls:
                if members.intersection(graph.neighbors[s].tolist()):
                    raise ValueError(f"class containing node {s} is not independent")


@dataclass(frozen=True)
class LatticeIndexSet:
    """Integer rectangle {s : (1,...,1) <= s <= n} in Z^N."""
    n: tuple

    @property
    def N(self):
        return len(self.n)

    @property
    def size(self):
        return int(np.prod(self.n)) if self.n else 0

    def points(self):
        """All members, one row per point, lexicographic order, 1-based."""
        axes = [np.arange(1, ni + 1) for ni in self.n]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def __contains__(self, s):
        return len(s) == self.N and all(1 <= si <= ni for si, ni in zip(s, self.n))


# ---------------------------------------------------------------------------
# construction and io

def load_graph(path):
    """Read an edge list: one 'u v' pair per line, '#' comments, blank lines ok.

    Node ids are arbitrary non-negative integers and get compacted to
    0..n-1 in sorted order; duplicate edges collapse.
    """
    raw_edges = []
    ids = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two node ids, got {body!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id in {body!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id in {body!r}")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop at node {u}")
            raw_edges.append((u, v))
            ids.update((u, v))
    remap = {orig: k for k, orig in enumerate(sorted(ids))}
    return Graph(len(remap), [(remap[u], remap[v]) for u, v in raw_edges])


def save_graph(graph, path):
    """Write the edge list in the same format load_graph reads."""
    with open(path, "w") as fh:
        fh.write(f"# {graph.node_count} nodes, {graph.edge_count} edges\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def torus_lattice(rows, cols):
    """Four-nearest-neighbour lattice with periodic boundary.

    Parallel wrap edges (side length 2) collapse, so every node has degree 4
    for sides >= 3 and degree 2 on the 2x2 torus.
    """
    rows, cols = int(rows), int(cols)
    if rows < 2 or cols < 2:
        raise ValueError("torus sides must be at least 2")
    edges = []
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            edges.append((s, r * cols + (c + 1) % cols))
            edges.append((s, ((r + 1) % rows) * cols + c))
    return Graph(rows * cols, edges)


def torus_with_chords(rows, cols, chords, seed):
    """Torus plus `chords` extra random non-adjacent node pairs (seeded)."""
    base = torus_lattice(rows, cols)
    chords = int(chords)
    if chords < 0:
        raise ValueError("chords must be non-negative")
    n = base.node_count
    present = set(base.edges)
    rng = stream(seed, _TAG_CHORDS)
    extra = []
    while len(extra) < chords:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in present:
            continue
        present.add(key)
        extra.append(key)
    return Graph(n, base.edges + tuple(extra))


def knn_geometric_graph(points, k, seed):
    """Symmetrized k-nearest-neighbour graph of seeded uniform points in the unit square."""
    points, k = int(points), int(k)
    if k >= points:
        raise ValueError("k must be smaller than the number of points")
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = stream(seed, _TAG_KNN)
    xy = rng.uniform(0.0, 1.0, size=(points, 2))
    d2 = ((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    edges = set()
    for s in range(points):
        for t in np.argsort(d2[s], kind="stable")[:k]:
            t = int(t)
            edges.add((s, t) if s < t else (t, s))
    g = Graph(points, edges)
    g.positions = xy
    return g


# ---------------------------------------------------------------------------
# spectrum and dependence range

def _power_top(matvec, n, tol, rng):
    """Largest eigenvalue of a symmetric PSD operator by power iteration.

    Stops when the residual ||Av - rho v|| drops below tol, which bounds the
    eigenvalue error by tol for symmetric matrices.
    """
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    rho = 0.0
    for _ in range(POWER_ITERATION_CAP):
        w = matvec(v)
        rho = float(v @ w)
        if np.linalg.norm(w - rho * v) <= tol:
            return rho
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    raise PowerIterationError(
        f"power iteration did not reach tol={tol} in {POWER_ITERATION_CAP} iterations")


def eigen_bounds(graph, tol=1e-8):
    """(h0, hm): smallest and largest adjacency eigenvalue, each within ~tol.

    Power iteration on H + max_degree*I gives hm (the shift keeps bipartite
    +/- pairs from stalling convergence); a second iteration on hm*I - H
    gives h0.  Cached on the graph per tolerance.
    """
    if graph.edge_count == 0:
        raise ValueError("eigen bounds need at least one edge")
    cached = graph._eigen_cache.get(tol)
    if cached is not None:
        return cached
    n = graph.node_count
    shift = float(graph.degrees.max())
    rng = stream(_TAG_POWER)

    hm = _power_top(lambda v: graph.neighbor_sums(v) + shift * v, n, tol, rng) - shift
    spread = _power_top(lambda v: hm * v - graph.neighbor_sums(v), n, tol, rng)
    h0 = hm - spread
    graph._eigen_cache[tol] = (h0, hm)
    return h0, hm


def eta_range(graph):
    """Open interval (1/h0, 1/hm) of dependence values keeping I - eta*H invertible."""
    h0, hm = eigen_bounds(graph)
    if h0 >= 0.0 or hm <= 0.0:
        raise ValueError(f"range undefined: need h0 < 0 < hm, got ({h0}, {hm})")
    return 1.0 / h0, 1.0 / hm


# ---------------------------------------------------------------------------
# concliques and splits

def concliques(graph):
    """Greedy proper coloring in descending-degree order; classes are concliques.

    Any proper coloring yields valid classes; greedy bounds the class count
    by max degree + 1.  Cached on the graph.
    """
    if graph._concliques is not None:
        return graph._concliques
    order = sorted(range(graph.node_count), key=lambda s: (-int(graph.degrees[s]), s))
    color = np.full(graph.node_count, -1, dtype=np.int64)
    for s in order:
        used = set(color[graph.neighbors[s]].tolist())
        c = 0
        while c in used:
            c += 1
        color[s] = c
    k = int(color.max()) + 1 if graph.node_count else 1
    classes = tuple(np.flatnonzero(color == c) for c in range(k))
    if graph.node_count == 0:
        classes = (np.empty(0, dtype=np.int64),)
    part = ConcliquePartition(classes)
    graph._concliques = part
    return part


def _bfs_order(graph, start):
    seen = np.zeros(graph.node_count, dtype=bool)
    order = []
    queue = deque([start])
    seen[start] = True
    while queue:
        s = queue.popleft()
        order.append(s)
        for t in graph.neighbors[s]:
            if not seen[t]:
                seen[t] = True
                queue.append(int(t))
    return np.array(order, dtype=np.int64)


def connected_split(graph, test_fraction, seed):
    """(learn_nodes, test_nodes): test set grown by BFS from a seeded start node.

    The test set is connected by construction.  The learning complement can
    come out disconnected on some graphs; that is reported as a warning, not
    an error.  Deterministic given the seed.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be strictly between 0 and 1")
    if not graph.is_connected():
        raise ValueError("connected_split requires a connected graph")
    n = graph.node_count
    target = math.ceil(test_fraction * n)
    if target >= n:
        raise ValueError("test fraction leaves an empty learning set")
    rng = stream(seed, _TAG_SPLIT)
    start = int(rng.integers(0, n))
    order = _bfs_order(graph, start)
    test = np.sort(order[:target])
    mask = np.ones(n, dtype=bool)
    mask[test] = False
    learn = np.flatnonzero(mask)

    sub = _induced_components(graph, learn)
    if sub > 1:
        warnings.warn(f"learning set is disconnected ({sub} components)", stacklevel=2)
    return learn, test


def _induced_components(graph, nodes):
    """Number of connected components of the subgraph induced by `nodes`."""
    keep = set(nodes.tolist())
    unvisited = set(keep)
    comps = 0
    while unvisited:
        comps += 1
        root = next(iter(unvisited))
        stack = [root]
        unvisited.discard(root)
        while stack:
            s = stack.pop()
            for t in graph.neighbors[s]:
                t = int(t)
                if t in unvisited:
                    unvisited.discard(t)
                    stack.append(t)
    return comps
