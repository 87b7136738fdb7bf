"""Undirected simple graphs with distance/shell indexing, clique number,
embedding diagnostics, and named fixture graphs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

# Distance sentinel for unreachable pairs.  Distances are stored as uint16,
# so valid graph distances are < UNREACHABLE.
UNREACHABLE = np.iinfo(np.uint16).max

_DIST_CHUNK = 1024


class GraphError(ValueError):
    pass


class Graph:
    """Immutable undirected simple graph on nodes 0..n-1.

    Adjacency lists are sorted and duplicate-free; edges are canonical
    (i < j).  The all-pairs distance matrix is computed lazily and cached.
    """

    def __init__(self, n, edges):
        self.n = int(n)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            edges = np.sort(edges, axis=1)
            edges = np.unique(edges, axis=0)
        self.edges = edges
        adjacency = [[] for _ in range(self.n)]
        for i, j in edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        self.adjacency = [np.array(sorted(a), dtype=np.int64) for a in adjacency]
        self.degrees = np.array([len(a) for a in self.adjacency], dtype=np.int64)
        self._csr = None
        self._dist = None

    @property
    def num_edges(self):
        return len(self.edges)

    def csr(self):
        if self._csr is None:
            m = len(self.edges)
            if m:
                i, j = self.edges[:, 0], self.edges[:, 1]
                data = np.ones(2 * m, dtype=np.int8)
                rows = np.concatenate([i, j])
                cols = np.concatenate([j, i])
                self._csr = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
            else:
                self._csr = sp.csr_matrix((self.n, self.n), dtype=np.int8)
        return self._csr

    def distance_matrix(self):
        """All-pairs shortest path distances as uint16, UNREACHABLE for
        disconnected pairs.  Computed in row chunks to bound peak memory."""
        if self._dist is None:
            g = self.csr()
            out = np.empty((self.n, self.n), dtype=np.uint16)
            for lo in range(0, self.n, _DIST_CHUNK):
                hi = min(lo + _DIST_CHUNK, self.n)
                block = shortest_path(g, method="D", unweighted=True,
                                      directed=False, indices=np.arange(lo, hi))
                block[np.isinf(block)] = UNREACHABLE
                out[lo:hi] = block.astype(np.uint16)
            self._dist = out
        return self._dist

    def distance(self, i, j):
        return int(self.distance_matrix()[i, j])

    def diameter(self):
        """Largest finite pairwise distance; 0 for an edgeless graph."""
        d = self.distance_matrix()
        finite = d[d < UNREACHABLE]
        return int(finite.max()) if finite.size else 0

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


def build_graph(n, edge_list):
    """Validate and construct a Graph; rejects self-loops and out-of-range
    endpoints, silently dedupes repeated edges."""
    n = int(n)
    if n < 0:
        raise GraphError("node count must be nonnegative")
    edges = np.asarray(list(edge_list), dtype=np.int64).reshape(-1, 2)
    if edges.size:
        if edges.min() < 0 or edges.max() >= n:
            raise GraphError("edge endpoint out of range [0, n)")
        if (edges[:, 0] == edges[:, 1]).any():
            raise GraphError("self-loops are not allowed")
    return Graph(n, edges)


class ShellIndex:
    """Per-node neighborhood shells: shell(i, s) is the set of nodes at
    distance exactly s from i; reach(i, s) the closed ball of radius s.

    Backed by the graph's distance matrix.  ``max_s`` caps the largest
    shell radius that is indexed (distances themselves are exact)."""

    def __init__(self, g: Graph, max_s=None):
        self.graph = g
        self.distances = g.distance_matrix()
        diam = g.diameter()
        self.max_s = diam if max_s is None else min(int(max_s), diam)
        # shell_sizes[i, s] = |{j : d(i,j) = s}| for s <= max_s
        d = self.distances
        counts = np.zeros((g.n, self.max_s + 1), dtype=np.int64)
        for s in range(self.max_s + 1):
            counts[:, s] = (d == s).sum(axis=1)
        self.shell_sizes = counts

    def shell(self, i, s):
        return np.flatnonzero(self.distances[i] == s)

    def reach(self, i, s):
        return np.flatnonzero(self.distances[i] <= s)

    def shells_of(self, i):
        """Dict s -> shell node array for all nonempty shells up to max_s."""
        out = {}
        for s in range(self.max_s + 1):
            members = self.shell(i, s)
            if members.size:
                out[s] = members
        return out

    def ball_sizes(self, s):
        """Per-node closed-ball sizes |{j : d(i,j) <= s}|."""
        return (self.distances <= min(s, UNREACHABLE - 1)).sum(axis=1)


def shells(g: Graph, max_s=None) -> ShellIndex:
    return ShellIndex(g, max_s=max_s)


def set_distance(g: Graph, a, b):
    """Minimum pairwise distance between node sets; inf if no path."""
    a = np.asarray(list(a), dtype=np.int64)
    b = np.asarray(list(b), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise GraphError("set_distance requires nonempty node sets")
    d = g.distance_matrix()[np.ix_(a, b)]
    m = int(d.min())
    return np.inf if m == UNREACHABLE else m


class CliqueSearchError(ValueError):
    pass


def clique_number(g: Graph, limit=64):
    """Exact clique number via Bron-Kerbosch with pivoting on bitsets."""
    if g.n > limit:
        raise CliqueSearchError(
            f"exact clique search refused: n={g.n} exceeds limit {limit}")
    if g.n == 0:
        return 0
    nbr = [0] * g.n
    for i, j in g.edges:
        i, j = int(i), int(j)
        nbr[i] |= 1 << j
        nbr[j] |= 1 << i
    best = 1

    def expand(r_size, p, x):
        nonlocal best
        if p == 0 and x == 0:
            best = max(best, r_size)
            return
        if r_size + bin(p).count("1") <= best:
            return
        # pivot: vertex of P|X with most neighbours in P
        px = p | x
        pivot, pivot_deg = -1, -1
        m = px
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            deg = bin(p & nbr[v]).count("1")
            if deg > pivot_deg:
                pivot, pivot_deg = v, deg
        cand = p & ~nbr[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bit = 1 << v
            expand(r_size + 1, p & nbr[v], x & nbr[v])
            p &= ~bit
            x |= bit

    expand(0, (1 << g.n) - 1, 0)
    return best


def _brute_force_clique_number(g: Graph):
    """Enumerate all subsets; for invariant testing only (n <= ~15)."""
    best = 1 if g.n else 0
    adj = {(int(i), int(j)) for i, j in g.edges}
    adj |= {(j, i) for i, j in adj}
    for mask in range(1, 1 << g.n):
        nodes = [v for v in range(g.n) if mask >> v & 1]
        if len(nodes) <= best:
            continue
        if all((a, b) in adj for k, a in enumerate(nodes) for b in nodes[k + 1:]):
            best = len(nodes)
    return best


@dataclass
class EmbeddingDiagnostic:
    clique_number: int
    equilateral_dim: int
    necessary_condition_holds: bool
    min_stress: float

    @property
    def exact_embedding_found(self):
        return self.min_stress <= 1e-9


def _equilateral_dim(space, dim):
    if space == "euclidean":
        return dim + 1
    if space == "linf":
        # exact for the sup norm; for other norms 2**dim is an upper bound
        return 2 ** dim
    if space == "sphere":
        return dim + 2
    raise GraphError(f"unknown embedding space {space!r}")


def _pair_distances(points, space):
    if space == "sphere":
        u = points / np.linalg.norm(points, axis=1, keepdims=True)
        dots = np.clip(u @ u.T, -1.0, 1.0)
        return np.arccos(dots)
    diff = points[:, None, :] - points[None, :, :]
    if space == "linf":
        return np.abs(diff).max(axis=2)
    return np.sqrt((diff ** 2).sum(axis=2))


def _stress(points, target, space):
    d = _pair_distances(points, space)
    iu = np.triu_indices(len(points), k=1)
    return float(np.abs(d[iu] - target[iu]).max())


def _candidate_stress(points, i, c, xs, target, space):
    """Max |distance - target| over pairs involving point i, for each
    candidate value xs of coordinate c of point i (other points fixed)."""
    mask = np.arange(len(points)) != i
    others = points[mask]
    ti = target[i, mask]
    if space == "sphere":
        cand = np.repeat(points[i][None, :], len(xs), axis=0)
        cand[:, c] = xs
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        u = others / np.linalg.norm(others, axis=1, keepdims=True)
        d = np.arccos(np.clip(cand @ u.T, -1.0, 1.0))
    else:
        sep = points[i] - others  # (n-1, k)
        dc = xs[:, None] - others[None, :, c]
        if space == "linf":
            rest = np.abs(np.delete(sep, c, axis=1)).max(axis=1) \
                if points.shape[1] > 1 else np.zeros(len(others))
            d = np.maximum(rest[None, :], np.abs(dc))
        else:
            rest2 = (np.delete(sep, c, axis=1) ** 2).sum(axis=1)
            d = np.sqrt(rest2[None, :] + dc ** 2)
    return np.abs(d - ti[None, :]).max(axis=1)


def _coordinate_descent(points, target, space, rng, passes=60, tol=1e-12):
    n, k = points.shape
    span = max(1.0, target.max())
    best = _stress(points, target, space)
    stale = 0
    for _ in range(passes):
        improved = False
        for i in range(n):
            # stress over pairs not involving i is unchanged by the move
            sub = np.delete(np.arange(n), i)
            floor = _stress(points[sub][:, :], target[np.ix_(sub, sub)],
                            space) if n > 2 else 0.0
            for c in range(k):
                x0 = points[i, c]
                grid = x0 + span * np.linspace(-1.0, 1.0, 41)
                for _refine in range(40):
                    vals = np.maximum(
                        _candidate_stress(points, i, c, grid, target, space),
                        floor)
                    b = int(np.argmin(vals))
                    if vals[b] < best - tol:
                        best = float(vals[b])
                        x0 = grid[b]
                        improved = True
                    points[i, c] = x0
                    lo = grid[max(b - 1, 0)]
                    hi = grid[min(b + 1, len(grid) - 1)]
                    if hi - lo < 1e-13:
                        break
                    grid = np.linspace(lo, hi, 11)
        span = max(span * 0.5, 1e-6)
        stale = 0 if improved else stale + 1
        if stale >= 2 and span <= 1e-3:
            break
    return best


def embedding_check(g: Graph, space="euclidean", dim=2, restarts=200, seed=0):
    """Necessary-condition verdict (clique number vs equilateral dimension)
    plus a numeric max-distortion stress search over random restarts.

    min_stress is evidence of (non-)embeddability, not a certificate."""
    d = g.distance_matrix().astype(np.float64)
    if (d == UNREACHABLE).any():
        raise GraphError("embedding_check requires a connected graph")
    omega = clique_number(g)
    e_dim = _equilateral_dim(space, dim)
    rng = np.random.default_rng(seed)
    best = np.inf
    ncoord = dim + 1 if space == "sphere" else dim
    for _ in range(restarts):
        if space == "sphere":
            pts = rng.normal(size=(g.n, ncoord))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        else:
            pts = rng.normal(size=(g.n, ncoord)) * (d.max() / 2.0 + 1.0)
        best = min(best, _coordinate_descent(pts, d, space, rng))
        if best <= 1e-12:
            break
    return EmbeddingDiagnostic(
        clique_number=omega,
        equilateral_dim=e_dim,
        necessary_condition_holds=omega <= e_dim,
        min_stress=best,
    )


def fixture(name, *args):
    """Named graphs: ring(n), star(n), path(n), complete(n), fig1, fig2,
    lattice(w, h)."""
    if name == "ring":
        (n,) = args
        if n < 3:
            raise GraphError("ring requires n >= 3")
        return build_graph(n, [(i, (i + 1) % n) for i in range(n)])
    if name == "star":
        (n,) = args
        if n < 2:
            raise GraphError("star requires n >= 2")
        return build_graph(n, [(0, i) for i in range(1, n)])
    if name == "path":
        (n,) = args
        return build_graph(n, [(i, i + 1) for i in range(n - 1)])
    if name == "complete":
        (n,) = args
        return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if name == "fig1":
        # path 0-1-2 plus node 3 adjacent to 0 and 2; clique number 2
        return build_graph(4, [(0, 1), (1, 2), (0, 3), (2, 3)])
    if name == "fig2":
        # 4-clique on {0,1,2,3}, node 4 pendant on 1, node 5 pendant on 3
        clique = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        return build_graph(6, clique + [(1, 4), (3, 5)])
    if name == "lattice":
        w, h = args
        edges = []
        for r in range(h):
            for c in range(w):
                v = r * w + c
                if c + 1 < w:
                    edges.append((v, v + 1))
                if r + 1 < h:
                    edges.append((v, v + w))
        return build_graph(w * h, edges)
    raise GraphError(f"unknown fixture {name!r}")


def write_edge_list(g: Graph, path):
    """Canonical edge-list file: 'n=<count>' header then sorted 'i,j' lines."""
    with open(path, "w") as fh:
        fh.write(f"n={g.n}\n")
        for i, j in g.edges:
            fh.write(f"{i},{j}\n")


def read_edge_list(path):
    n = None
    edges = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n="):
                n = int(line[2:])
                continue
            i, j = line.split(",")
            edges.append((int(i), int(j)))
    if n is None:
        raise GraphError("edge-list file missing 'n=<count>' header")
    return build_graph(n, edges)
