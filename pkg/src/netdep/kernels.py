"""Kernel functions, the log-ratio bandwidth rule, kernel weight matrices,
and their regularity/PSD diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, UNREACHABLE, build_graph, fixture


def _parzen(x):
    ax = abs(x)
    if ax <= 0.5:
        return 1.0 - 6.0 * ax * ax + 6.0 * ax ** 3
    if ax <= 1.0:
        return 2.0 * (1.0 - ax) ** 3
    return 0.0


def _bartlett(x):
    ax = abs(x)
    return 1.0 - ax if ax <= 1.0 else 0.0


def _truncated(x):
    return 1.0 if abs(x) <= 1.0 else 0.0


def _tukey_hanning(x):
    ax = abs(x)
    return 0.5 * (1.0 + math.cos(math.pi * ax)) if ax <= 1.0 else 0.0


KERNELS = {
    "parzen": _parzen,
    "bartlett": _bartlett,
    "truncated": _truncated,
    "tukey_hanning": _tukey_hanning,
}


@dataclass(frozen=True)
class KernelSpec:
    family: str = "parzen"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in KERNELS:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be nonnegative")

    def weight(self, s):
        """Lag weight omega(s / bandwidth); 0 for infinite distance or
        degenerate bandwidth at s > 0."""
        if not np.isfinite(s) or s == UNREACHABLE:
            return 0.0
        if self.bandwidth == 0:
            return 1.0 if s == 0 else 0.0
        return KERNELS[self.family](s / self.bandwidth)


def kernel_eval(family, x):
    """Evaluate a kernel family at x (defined on the extended reals;
    x = +-inf gives 0)."""
    if not np.isfinite(x):
        return 0.0
    return KERNELS[family](x)


@dataclass(frozen=True)
class BandwidthRule:
    constant: float = 2.0
    epsilon: float = 0.05


def bandwidth(rule: BandwidthRule, n, avg_degree):
    """constant * log(n) / log(avg_degree v (1 + epsilon)); natural logs,
    continuous output (no rounding)."""
    if n < 2:
        raise ValueError("bandwidth rule requires n >= 2")
    denom = math.log(max(avg_degree, 1.0 + rule.epsilon))
    return rule.constant * math.log(n) / denom


REGULARITY_VIOLATION_THRESHOLD = 1e6


@dataclass
class RegularityResult:
    family: str
    eta: float
    c_estimate: float
    violated: bool


def kernel_regularity(family, eta, grid=20000):
    """Sup over a grid on (0, 1] of |omega(x) - 1| / x**(1 + eta).  A sup
    exceeding the violation threshold is reported as a violation (the
    bartlett kernel diverges at the origin for any eta > 0)."""
    if eta <= 0:
        raise ValueError("requires eta > 0")
    fn = KERNELS[family]
    # linear grid for the bulk plus a geometric grid into the origin,
    # where a divergent ratio (bartlett: |omega(x)-1| = x) must show up;
    # deviations at the float-cancellation floor are treated as zero
    xs = np.concatenate([np.linspace(1.0 / grid, 1.0, grid),
                         np.geomspace(1e-13, 1e-2, 200)])
    devs = np.array([abs(fn(x) - 1.0) for x in xs])
    devs[devs <= 1e-14] = 0.0
    ratios = devs / xs ** (1.0 + eta)
    c = float(ratios.max())
    return RegularityResult(family=family, eta=eta, c_estimate=c,
                            violated=c > REGULARITY_VIOLATION_THRESHOLD)


def weight_matrix(g: Graph, spec: KernelSpec, limit=5000):
    """Symmetric matrix of kernel weights at pairwise graph distances;
    1 on the diagonal, 0 for disconnected pairs."""
    if g.n > limit:
        raise ValueError(f"dense weight matrix refused: n={g.n} > {limit}")
    d = g.distance_matrix()
    smax = int(d[d < UNREACHABLE].max()) if g.n else 0
    table = np.array([spec.weight(s) for s in range(smax + 1)] + [0.0])
    idx = np.minimum(d.astype(np.int64), smax + 1)
    return table[idx]


@dataclass
class PsdResult:
    psd: bool
    min_eigenvalue: float


def psd_check(w, tol=None):
    """Smallest eigenvalue via a symmetric eigensolver; PSD iff
    lambda_min >= -tol (default tol = 1e-9 * max |entry|)."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape[0] != w.shape[1] or not np.allclose(w, w.T, atol=1e-12):
        raise ValueError("psd_check requires a symmetric matrix")
    if tol is None:
        tol = 1e-9 * max(np.abs(w).max(), 1.0)
    lam = float(np.linalg.eigvalsh(w)[0])
    return PsdResult(psd=lam >= -tol, min_eigenvalue=lam)


def find_indefinite_ring_chord(n=8, spec: KernelSpec | None = None):
    """Brute-force search over single chord additions to a ring for a graph
    whose kernel weight matrix is indefinite.  Returns (graph, chord,
    min_eigenvalue) or None if no chord works."""
    if spec is None:
        spec = KernelSpec("bartlett", 3.0)
    ring_edges = [(i, (i + 1) % n) for i in range(n)]
    worst = None
    for i in range(n):
        for j in range(i + 2, n):
            if (j - i) % n in (1, n - 1):
                continue
            g = build_graph(n, ring_edges + [(i, j)])
            res = psd_check(weight_matrix(g, spec))
            if not res.psd and (worst is None or res.min_eigenvalue < worst[2]):
                worst = (g, (i, j), res.min_eigenvalue)
    return worst


def ring_weight_is_psd(n=8, spec: KernelSpec | None = None):
    if spec is None:
        spec = KernelSpec("bartlett", 3.0)
    return psd_check(weight_matrix(fixture("ring", n), spec))
