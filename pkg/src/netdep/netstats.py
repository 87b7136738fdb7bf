"""Network denseness statistics and finite-n diagnostics for the
dependence-decay vs. denseness tradeoff conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, ShellIndex, UNREACHABLE, shells


class ThetaSequence:
    """Dependence-decay coefficients by graph distance, with eval(0) = 1.

    Kinds: geometric(gamma), nf_rate(M, q, eps, pi_n), table(values),
    zero_beyond(s0), or an arbitrary callable (used for the linear-model
    bound)."""

    def __init__(self, kind, fn, params=None):
        self.kind = kind
        self._fn = fn
        self.params = params or {}

    def __call__(self, s):
        if s == 0:
            return 1.0
        v = float(self._fn(int(s)))
        if v < 0:
            raise ValueError("theta values must be nonnegative")
        return v

    @classmethod
    def geometric(cls, gamma):
        if not 0 <= gamma < 1:
            raise ValueError("geometric decay requires gamma in [0, 1)")
        return cls("geometric", lambda s: gamma ** s, {"gamma": gamma})

    @classmethod
    def nf_rate(cls, M, q, eps, pi_n):
        base = max(pi_n, 1.0) + eps
        return cls("nf_rate", lambda s: M * base ** (-q * s),
                   {"M": M, "q": q, "eps": eps, "pi_n": pi_n})

    @classmethod
    def from_table(cls, values):
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0 or not math.isclose(values[0], 1.0):
            raise ValueError("table must start with theta_0 = 1")

        def fn(s):
            return values[s] if s < len(values) else 0.0

        return cls("table", fn, {"values": values})

    @classmethod
    def zero_beyond(cls, s0):
        return cls("zero_beyond", lambda s: 0.0 if s >= s0 else 1.0, {"s0": s0})


def _theta_power(theta_value, exponent):
    """theta**exponent with the conventions 0**0 = 1 and x**0 = 1."""
    if exponent == 0:
        return 1.0
    if theta_value == 0.0:
        return 0.0
    return theta_value ** exponent


def delta_shell(g: Graph, s, k=1.0, index: ShellIndex | None = None):
    """Average s-shell size raised to the power k (nodes with empty shells
    contribute 0)."""
    if s < 1:
        raise ValueError("delta_shell requires s >= 1")
    idx = index if index is not None else shells(g)
    if s > idx.max_s:
        return 0.0
    sizes = idx.shell_sizes[:, s].astype(np.float64)
    return float(np.where(sizes > 0, sizes ** k, 0.0).mean())


def delta_ball(g: Graph, s, k=1.0, index: ShellIndex | None = None):
    """Average closed-ball size |{j : d(i,j) <= s}|**k."""
    idx = index if index is not None else shells(g)
    sizes = idx.ball_sizes(s).astype(np.float64)
    return float((sizes ** k).mean())


def delta_cap(g: Graph, s, m, k=1.0, index: ShellIndex | None = None):
    """Average over i of max over j in the s-shell of i of
    |ball(i, m) \\ ball(j, s-1)|**k; empty shells contribute 0, and the
    excluded ball is empty when s = 0."""
    if s < 0 or m < 0:
        raise ValueError("delta_cap requires s >= 0 and m >= 0")
    d = g.distance_matrix()
    n = g.n
    ball_i = d <= m
    total = 0.0
    for i in range(n):
        shell = np.flatnonzero(d[i] == s)
        if shell.size == 0:
            continue
        if s == 0:
            count = int(ball_i[i].sum())
        else:
            # |ball(i,m) \ ball(j,s-1)| maximized over shell members j
            excl = d[shell] <= (s - 1)
            count = int((ball_i[i] & ~excl).sum(axis=1).max())
        total += float(count) ** k
    return total / n


def c_coef(g: Graph, s, m, k=1.0, index: ShellIndex | None = None):
    """Numeric infimum over alpha > 1 of
    [delta_cap(s, m; k*alpha)]**(1/alpha) * [delta_shell(s; alpha/(alpha-1))]**(1-1/alpha).

    For s = 0 this reduces exactly to the average ball size delta_ball(m; k).
    Log-spaced alpha grid with golden-section refinement; powers in log
    space to avoid overflow."""
    if s < 0 or m < 0:
        raise ValueError("c_coef requires s >= 0 and m >= 0")
    if s == 0:
        return delta_ball(g, m, k, index=index)
    idx = index if index is not None else shells(g)
    if s > idx.max_s:
        return 0.0
    shell_sizes = idx.shell_sizes[:, s].astype(np.float64)
    if not (shell_sizes > 0).any():
        return 0.0

    # per-node max truncated-ball counts (the delta_cap inner quantity)
    d = g.distance_matrix()
    ball_i = d <= m
    caps = np.zeros(g.n)
    for i in range(g.n):
        shell = np.flatnonzero(d[i] == s)
        if shell.size == 0:
            continue
        excl = d[shell] <= (s - 1)
        caps[i] = (ball_i[i] & ~excl).sum(axis=1).max()

    log_caps = np.log(caps[caps > 0])
    log_shell = np.log(shell_sizes[shell_sizes > 0])
    n = float(g.n)

    def log_objective(alpha):
        # (1/alpha) log Delta(s,m;k*alpha) + (1-1/alpha) log delta_shell(s; alpha/(alpha-1))
        la = _log_mean_exp(k * alpha * log_caps, n)
        ls = _log_mean_exp((alpha / (alpha - 1.0)) * log_shell, n)
        return la / alpha + (1.0 - 1.0 / alpha) * ls

    grid = 1.0 + np.logspace(-3, 3, 40)
    vals = [log_objective(a) for a in grid]
    b = int(np.argmin(vals))
    lo = grid[max(b - 1, 0)]
    hi = grid[min(b + 1, len(grid) - 1)]
    best = _golden_section(log_objective, lo, hi, rel_tol=1e-6)
    return math.exp(min(best, vals[b]))


def _log_mean_exp(logs, n):
    """log( (sum of exp(logs)) / n ); terms not in `logs` are zero."""
    m = logs.max()
    return m + math.log(np.exp(logs - m).sum() / n)


def _golden_section(f, lo, hi, rel_tol=1e-6, max_iter=200):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - (b - a) * invphi
    d = a + (b - a) * invphi
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * max(abs(a), 1.0):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * invphi
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * invphi
            fd = f(d)
    return min(fc, fd)


def h_set_counts(g: Graph, m, limit=200):
    """Exact counts, per set distance s, of 4-tuples (i,j,k,l) with
    j in ball(i,m) and l in ball(k,m); index s of the returned array is
    the minimum pairwise distance between {i,j} and {k,l}.  Tuples whose
    sets are mutually unreachable are not counted."""
    if g.n > limit:
        raise GraphError(f"h_set_count refused: n={g.n} exceeds limit {limit}")
    d = g.distance_matrix().astype(np.int64)
    ii, jj = np.nonzero(d <= m)
    if ii.size == 0:
        return np.zeros(1, dtype=np.int64)
    # set distance between pairs (i,j) and (k,l): min of the four leg distances
    sd = np.minimum.reduce([
        d[np.ix_(ii, ii)], d[np.ix_(ii, jj)],
        d[np.ix_(jj, ii)], d[np.ix_(jj, jj)],
    ])
    sd = sd[sd < UNREACHABLE]
    return np.bincount(sd.ravel())


def h_set_count(g: Graph, s, m, limit=200):
    counts = h_set_counts(g, m, limit=limit)
    return int(counts[s]) if s < len(counts) else 0


@dataclass
class Table1Stats:
    diameter: int
    avg_degree: float
    max_degree: int
    avg_connected_distance: float


def table1_stats(g: Graph) -> Table1Stats:
    """Scalar network statistics: diameter, degree summaries, and average
    distance over connected unordered pairs."""
    d = g.distance_matrix()
    iu = np.triu_indices(g.n, k=1)
    pair_d = d[iu]
    finite = pair_d[pair_d < UNREACHABLE]
    return Table1Stats(
        diameter=int(finite.max()) if finite.size else 0,
        avg_degree=float(g.degrees.mean()) if g.n else 0.0,
        max_degree=int(g.degrees.max()) if g.n else 0,
        avg_connected_distance=float(finite.mean()) if finite.size else 0.0,
    )


@dataclass
class DensenessProfile:
    delta_shell: dict = field(default_factory=dict)   # (s, k) -> value
    delta_ball: dict = field(default_factory=dict)    # s -> value
    delta_cap: dict = field(default_factory=dict)     # (s, k) -> value (fixed m)
    c_coef: dict = field(default_factory=dict)        # (s, k) -> value (fixed m)
    m: int = 0
    stats: Table1Stats | None = None


def denseness_profile(g: Graph, m, ks=(1.0, 2.0), max_s=None) -> DensenessProfile:
    idx = shells(g, max_s=max_s)
    smax = idx.max_s
    prof = DensenessProfile(m=m, stats=table1_stats(g))
    for s in range(1, smax + 1):
        for k in ks:
            prof.delta_shell[(s, k)] = delta_shell(g, s, k, index=idx)
    for s in range(smax + 1):
        prof.delta_ball[s] = delta_ball(g, s, index=idx)
        for k in ks:
            prof.delta_cap[(s, k)] = delta_cap(g, s, m, k, index=idx)
            prof.c_coef[(s, k)] = c_coef(g, s, m, k, index=idx)
    return prof


@dataclass
class ConditionReport:
    p: float
    m_n: int
    b_n: float
    nd_a_value: float
    nd_b_value: dict          # k in {1, 2} -> value
    nf_q_threshold: float
    hac_iii_value: float


def nf_q_threshold(p):
    if p <= 4:
        raise ValueError("requires p > 4")
    return max(p / (p - 4.0), 3.0 * p / (p - 1.0))


def default_m_n(n, pi_n, eps, eps_prime=None):
    """Neighborhood-radius rule log n / (2 (1+eps') log((pi_n v 1) + eps')).

    eps' defaults to eps/2 (a choice; only the inequality
    (1+eps') log((pi v 1)+eps') <= log((pi v 1)+eps) constrains it)."""
    if eps_prime is None:
        eps_prime = eps / 2.0
    base = max(pi_n, 1.0)
    return math.log(n) / (2.0 * (1.0 + eps_prime) * math.log(base + eps_prime))


def condition_report(g: Graph, theta: ThetaSequence, p, m_n, b_n) -> ConditionReport:
    """Finite-n diagnostic values for the dependence/denseness tradeoff
    conditions.  Sums truncate at the graph diameter (disconnected pairs
    carry zero kernel weight)."""
    if p <= 4:
        raise ValueError("requires p > 4")
    idx = shells(g)
    diam = idx.max_s
    n = g.n
    m_n = int(m_n)
    nd_a = n ** 1.5 * _theta_power(theta(m_n), 1.0 - 1.0 / p)
    nd_b = {}
    for k in (1, 2):
        total = sum(
            c_coef(g, s, m_n, float(k), index=idx)
            * _theta_power(theta(s), 1.0 - (k + 2.0) / p)
            for s in range(diam + 1)
        )
        nd_b[k] = total / n ** (k / 2.0)
    hac_iii = sum(
        c_coef(g, s, int(b_n), 2.0, index=idx)
        * _theta_power(theta(s), 1.0 - 4.0 / p)
        for s in range(diam + 1)
    ) / n
    return ConditionReport(
        p=p, m_n=m_n, b_n=b_n,
        nd_a_value=nd_a,
        nd_b_value=nd_b,
        nf_q_threshold=nf_q_threshold(p),
        hac_iii_value=hac_iii,
    )


def shell_tail_bound(s, pi_n, n, k=1.0):
    """Analytic high-probability bound (5.7 s^2 (pi_n v 1)^s log n)^k on
    delta_shell(s; k) for randomly formed networks."""
    if s < 1:
        raise ValueError("bound covers s >= 1")
    return (5.7 * s * s * max(pi_n, 1.0) ** s * math.log(n)) ** k


def tail_bound_monitor(graphs, s, k, pi_n):
    """Fraction of sampled graphs violating the shell-size tail bound."""
    if not graphs:
        raise ValueError("empty sample list")
    if s < 1:
        raise ValueError("bound covers s >= 1")
    violations = 0
    for g in graphs:
        bound = shell_tail_bound(s, pi_n, g.n, k)
        if delta_shell(g, s, k) > bound:
            violations += 1
    return violations / len(graphs)
