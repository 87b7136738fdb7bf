"""Random network formation and network dependent process generation with
analytic dependence-coefficient bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, UNREACHABLE, build_graph, shells
from .hac import Sample, ma_weight_matrix
from .netstats import ThetaSequence

_ROW_BLOCK = 512

# E|eps| for a standard normal shock
ABS_MOMENT_NORMAL = math.sqrt(2.0 / math.pi)

MA_TRUNCATION_EPS = 1e-12


@dataclass(frozen=True)
class FormationSpec:
    """Latent-position random graph: n uniform points on the unit square,
    link probability exp(-||X_i - X_j|| * sqrt(2 pi n / lambda))."""
    n: int
    lam: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("formation requires n >= 2")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class FormationDraw:
    graph: Graph
    positions: np.ndarray
    expected_degrees: np.ndarray
    pi_n: float


def form_network(spec: FormationSpec, rng=None) -> FormationDraw:
    """Draw one network.  The link probability is exp of a nonpositive
    number, so it never needs clamping.  Also returns the conditional
    expected degrees and their maximum (the formation-rate statistic)."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    n = spec.n
    pos = rng.uniform(size=(n, 2))
    scale = math.sqrt(2.0 * math.pi * n / spec.lam)
    expected = np.zeros(n)
    rows = []
    cols = []
    # row blocks keep peak memory bounded at large n
    for lo in range(0, n, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n)
        diff = pos[lo:hi, None, :] - pos[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        p = np.exp(-dist * scale)
        p[np.arange(lo, hi) - lo, np.arange(lo, hi)] = 0.0
        expected[lo:hi] = p.sum(axis=1)
        u = rng.uniform(size=p.shape)
        jj = np.arange(n)[None, :]
        ii = np.arange(lo, hi)[:, None]
        hit = (u < p) & (jj > ii)
        r, c = np.nonzero(hit)
        rows.append(r + lo)
        cols.append(c)
    edges = np.column_stack([np.concatenate(rows), np.concatenate(cols)]) \
        if rows else np.empty((0, 2), dtype=np.int64)
    g = build_graph(n, edges)
    return FormationDraw(graph=g, positions=pos, expected_degrees=expected,
                         pi_n=float(expected.max()))


@dataclass(frozen=True)
class LinearModelSpec:
    """Moving-average model over neighborhood shells with geometric lag
    weights gamma**m / shell size and i.i.d. standard normal shocks."""
    gamma: float
    truncation: int | None = None  # None: auto at gamma**m < 1e-12 (or diameter)

    def __post_init__(self):
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")

    def auto_truncation(self, diameter):
        if self.truncation is not None:
            return min(self.truncation, diameter)
        if self.gamma == 0:
            return 0
        m = int(math.ceil(math.log(MA_TRUNCATION_EPS) / math.log(self.gamma)))
        return min(m, diameter)


def simulate_linear(g: Graph, spec: LinearModelSpec, rng=None, shocks=None) -> Sample:
    """Simulate the shell moving-average model; shocks may be injected for
    deterministic tests.  Empty shells contribute nothing."""
    if shocks is None:
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        shocks = rng.standard_normal(g.n)
    else:
        shocks = np.asarray(shocks, dtype=np.float64)
    W = ma_weight_matrix(g, spec.gamma, truncation=spec.auto_truncation(g.diameter()))
    y = W @ shocks
    return Sample(y=y[:, None], known_mean=np.zeros(1))


def theta_linear_bound(g: Graph, spec: LinearModelSpec, s):
    """Decay bound for the linear model with independent shocks:
    2 * E|eps| * sum_{m > s} gamma**m * max_i |shell(i, m)|."""
    if spec.gamma == 0:
        return 0.0
    idx = shells(g)
    total = 0.0
    for m in range(s + 1, idx.max_s + 1):
        max_shell = int(idx.shell_sizes[:, m].max())
        if max_shell:
            total += spec.gamma ** m * max_shell
    return 2.0 * ABS_MOMENT_NORMAL * total


def theta_linear_sequence(g: Graph, spec: LinearModelSpec) -> ThetaSequence:
    diam = g.diameter()
    values = [1.0] + [theta_linear_bound(g, spec, s) for s in range(1, diam + 1)]
    return ThetaSequence("linear_model", lambda s: values[s] if s < len(values) else 0.0,
                         {"gamma": spec.gamma})


def dependency_weight_matrix(g: Graph):
    """Linear map of the radius-1 normalized-sum dependency model:
    Y = W eps with W = (A + I) row-scaled by 1/sqrt(1 + degree)."""
    W = np.eye(g.n)
    for i, j in g.edges:
        W[i, j] = 1.0
        W[j, i] = 1.0
    W /= np.sqrt(1.0 + g.degrees)[:, None]
    return W


def simulate_dependency_graph(g: Graph, rng=None, shocks=None) -> Sample:
    """Radius-1 local map: each node averages its own and neighbors' shocks,
    giving a dependency structure of radius 2 in the underlying graph."""
    if shocks is None:
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        shocks = rng.standard_normal(g.n)
    y = dependency_weight_matrix(g) @ np.asarray(shocks, dtype=np.float64)
    return Sample(y=y[:, None], known_mean=np.zeros(1))


DEPENDENCY_GRAPH_RADIUS = 2  # radius-1 maps share shocks up to distance 2


def theta_gaussian_functional(g: Graph, deriv_bounds, cov_by_distance,
                              exact_limit=200, sample_pairs=20000, seed=0):
    """Dependence coefficients for linear maps of jointly Gaussian shocks:
    theta_s maximizes, over node pairs at distance >= s, the double sum of
    derivative bounds weighted by absolute shock covariances."""
    B = np.abs(np.asarray(deriv_bounds, dtype=np.float64))
    if B.shape != (g.n, g.n):
        raise ValueError("deriv_bounds must be an n x n matrix")
    d = g.distance_matrix().astype(np.float64)
    d[d == UNREACHABLE] = np.inf
    C = np.abs(np.vectorize(cov_by_distance)(d))
    M = B @ C @ B.T
    diam = g.diameter()
    if g.n <= exact_limit:
        pair_d = d
        pair_m = M
    else:
        rng = np.random.default_rng(seed)
        ii = rng.integers(0, g.n, size=sample_pairs)
        jj = rng.integers(0, g.n, size=sample_pairs)
        pair_d = d[ii, jj]
        pair_m = M[ii, jj]
    values = [1.0]
    for s in range(1, diam + 2):
        mask = pair_d >= s
        values.append(float(pair_m[mask].max()) if mask.any() else 0.0)
    return ThetaSequence("gaussian_functional",
                         lambda s: values[s] if s < len(values) else 0.0)


def project_vector_sample(sample: Sample, coefficients) -> Sample:
    """Scalar projection Z_i = c_i^T Y_i; requires ||c_i|| <= 1, which
    preserves the dependence coefficients."""
    c = np.asarray(coefficients, dtype=np.float64)
    if c.ndim == 1:
        c = np.broadcast_to(c, sample.y.shape)
    if c.shape != sample.y.shape:
        raise ValueError("coefficients must be per-node v-vectors")
    norms = np.linalg.norm(c, axis=1)
    if (norms > 1.0 + 1e-12).any():
        raise ValueError("coefficient norms must not exceed 1")
    z = (c * sample.y).sum(axis=1)
    mean = None
    if sample.known_mean is not None and np.allclose(c, c[0]):
        mean = np.atleast_1d(c[0] @ sample.known_mean)
    return Sample(y=z[:, None], known_mean=mean)


def drop_edges(g: Graph, missing_prob, rng=None):
    """Independently delete edges with the given probability; the result is
    a subgraph, so observed distances dominate true distances."""
    if not 0 <= missing_prob <= 1:
        raise ValueError("missing probability must be in [0, 1]")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    if g.num_edges == 0 or missing_prob == 0:
        return Graph(g.n, g.edges)
    keep = rng.uniform(size=g.num_edges) >= missing_prob
    return Graph(g.n, g.edges[keep])
