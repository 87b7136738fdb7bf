"""Empirical verification of covariance inequalities and limit-theorem
behavior at desk scale."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dgp import (FormationSpec, LinearModelSpec, form_network,
                  simulate_dependency_graph, simulate_linear,
                  theta_linear_bound)
from .graph import Graph
from .hac import exact_variance_oracle

KS_CRITICAL_95 = 1.358  # Kolmogorov 95% point: reject if KS > 1.358 / sqrt(reps)


@dataclass(frozen=True)
class CovBoundInputs:
    """Ingredients of the covariance inequality for censored/Lipschitz
    functionals of two node sets at network distance s."""
    theta_s: float
    psi_bar: float = 0.0
    mu_xi_p: float = 1.0
    mu_zeta_q: float = 1.0
    p: float = 8.0
    q: float = 8.0
    a: int = 1
    b: int = 1
    v: int = 1

    def __post_init__(self):
        if self.p <= 1 or self.q <= 1:
            raise ValueError("requires p, q > 1")
        if 1.0 / self.p + 1.0 / self.q >= 1.0:
            raise ValueError("requires 1/p + 1/q < 1")
        if min(self.theta_s, self.psi_bar, self.mu_xi_p, self.mu_zeta_q) < 0:
            raise ValueError("norms and coefficients must be nonnegative")


def _theta_split(theta):
    """(theta v 1, theta ^ 1) with 0**positive = 0."""
    return max(theta, 1.0), min(theta, 1.0)


def cov_bound_a1(inputs: CovBoundInputs):
    """Covariance bound
    (theta_bar * psi_bar + 16 mu_xi mu_zeta) * theta_low**(1 - 1/p - 1/q)."""
    hi, lo = _theta_split(inputs.theta_s)
    expo = 1.0 - 1.0 / inputs.p - 1.0 / inputs.q
    if lo == 0.0:
        return 0.0
    return (hi * inputs.psi_bar + 16.0 * inputs.mu_xi_p * inputs.mu_zeta_q) \
        * lo ** expo


def cov_bound_product(inputs: CovBoundInputs, pi_1, pi_2, gamma_1, gamma_2, C=1.0):
    """Covariance bound for products of node-set variables:
    2 theta_bar (C + 16) ab (pi_1 + gamma_1)(pi_2 + gamma_2)
    theta_low**(1 - 1/p - 1/q)."""
    hi, lo = _theta_split(inputs.theta_s)
    expo = 1.0 - 1.0 / inputs.p - 1.0 / inputs.q
    if lo == 0.0:
        return 0.0
    return 2.0 * hi * (C + 16.0) * inputs.a * inputs.b \
        * (pi_1 + gamma_1) * (pi_2 + gamma_2) * lo ** expo


def psi_lipschitz(a, b, f_sup, f_lip, g_sup, g_lip, C=1.0):
    """Closed-form psi functional for bounded Lipschitz test functions:
    C * a * b * (sup|f| + Lip f) * (sup|g| + Lip g)."""
    return C * a * b * (f_sup + f_lip) * (g_sup + g_lip)


@dataclass
class LimitDiagnostics:
    l1_deviation: float = 0.0
    l1_se: float = 0.0
    l1_deviation_lipschitz: float = 0.0
    l1_lipschitz_se: float = 0.0
    ks_statistic: float = 0.0
    ks_critical: float = 0.0
    sigma_n2: float = 0.0
    reps: int = 0


def _draw(g, dgp, rng):
    """One replication of the named data-generating process on g."""
    if isinstance(dgp, LinearModelSpec):
        return simulate_linear(g, dgp, rng=rng).y[:, 0]
    if dgp == "dependency_graph":
        return simulate_dependency_graph(g, rng=rng).y[:, 0]
    if dgp == "common_shock":
        # hub shock shared by every node: Y_i = U_1 + U_i
        u = rng.standard_normal(g.n)
        return u[0] + u
    raise ValueError(f"unknown dgp {dgp!r}")


def lln_diagnostic(g: Graph, dgp, reps=500, seed=0) -> LimitDiagnostics:
    """MC estimate of E|sample mean - truth| for the identity and for tanh
    (bounded Lipschitz).  Truth is 0 for the identity by shock symmetry and
    E tanh(Y) = 0 likewise."""
    if reps < 100:
        raise ValueError("requires reps >= 100")
    rng = np.random.default_rng(seed)
    dev_id = np.empty(reps)
    dev_f = np.empty(reps)
    for r in range(reps):
        y = _draw(g, dgp, rng)
        dev_id[r] = abs(y.mean())
        dev_f[r] = abs(np.tanh(y).mean())
    return LimitDiagnostics(
        l1_deviation=float(dev_id.mean()),
        l1_se=float(dev_id.std(ddof=1) / math.sqrt(reps)),
        l1_deviation_lipschitz=float(dev_f.mean()),
        l1_lipschitz_se=float(dev_f.std(ddof=1) / math.sqrt(reps)),
        reps=reps,
    )


def ks_against_normal(draws):
    """Exact one-sample KS sup-distance of a sample to the standard normal
    (computed at the order statistics, not binned)."""
    from scipy.stats import norm
    x = np.sort(np.asarray(draws, dtype=np.float64))
    m = x.size
    cdf = norm.cdf(x)
    grid = np.arange(1, m + 1) / m
    return float(max((grid - cdf).max(), (cdf - (grid - 1.0 / m)).max()))


def clt_diagnostic(g_or_spec, dgp, reps=2000, seed=0) -> LimitDiagnostics:
    """KS distance of normalized sums S_n / sigma_n to the standard normal
    across replications.  With a FormationSpec a fresh network is drawn per
    replication; sigma_n uses the exact variance formula for the linear
    model and an MC estimate otherwise."""
    rng = np.random.default_rng(seed)
    fresh = isinstance(g_or_spec, FormationSpec)
    g = None if fresh else g_or_spec
    stats = np.empty(reps)
    sig2s = np.empty(reps)
    sums = np.empty(reps)
    for r in range(reps):
        if fresh:
            g = form_network(g_or_spec, rng=rng).graph
        y = _draw(g, dgp, rng)
        s_n = y.sum() / math.sqrt(g.n)
        if isinstance(dgp, LinearModelSpec):
            sig2 = exact_variance_oracle(g, dgp.gamma)
            if sig2 <= 0:
                raise ValueError("degenerate variance")
            stats[r] = s_n / math.sqrt(sig2)
            sig2s[r] = sig2
        else:
            sums[r] = s_n
    if not isinstance(dgp, LinearModelSpec):
        sig2 = float(np.var(sums, ddof=1))
        if sig2 <= 0:
            raise ValueError("degenerate variance")
        stats = sums / math.sqrt(sig2)
        sig2s[:] = sig2
    return LimitDiagnostics(
        ks_statistic=ks_against_normal(stats),
        ks_critical=KS_CRITICAL_95 / math.sqrt(reps),
        sigma_n2=float(sig2s.mean()),
        reps=reps,
    )


@dataclass
class PsiBoundCheck:
    s: int
    mc_cov: float
    mc_se: float
    bound: float
    implied_c: float
    violated: bool


def _clipped_identity(x):
    return np.clip(x, -1.0, 1.0)


def psi_bound_check(g: Graph, spec: LinearModelSpec, set_a, set_b, s,
                    reps=4000, seed=0, C=1.0) -> PsiBoundCheck:
    """MC check of the dependence inequality |Cov(f(Y_A), g(Y_B))| <=
    psi_{a,b}(f, g) * theta_s for f = tanh of the set sum and g = the
    clipped identity of the set sum (both sup-norm and Lipschitz constant
    1).  Reports the smallest C that would make the bound hold."""
    set_a = np.asarray(set_a, dtype=np.int64)
    set_b = np.asarray(set_b, dtype=np.int64)
    rng = np.random.default_rng(seed)
    fa = np.empty(reps)
    gb = np.empty(reps)
    for r in range(reps):
        y = simulate_linear(g, spec, rng=rng).y[:, 0]
        fa[r] = np.tanh(y[set_a].sum())
        gb[r] = _clipped_identity(y[set_b].sum())
    cov = float(np.cov(fa, gb, ddof=1)[0, 1])
    prod = (fa - fa.mean()) * (gb - gb.mean())
    se = float(prod.std(ddof=1) / math.sqrt(reps))
    theta = theta_linear_bound(g, spec, s)
    psi = psi_lipschitz(set_a.size, set_b.size, 1.0, 1.0, 1.0, 1.0, C=C)
    bound = psi * theta
    implied = abs(cov) / (psi / C * theta) if theta > 0 else 0.0
    return PsiBoundCheck(s=s, mc_cov=cov, mc_se=se, bound=bound,
                         implied_c=implied, violated=abs(cov) > bound + 3.0 * se)
