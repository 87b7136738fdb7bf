"""Network HAC variance estimators, confidence intervals, and the exact
variance oracle for the moving-average linear model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .graph import Graph, UNREACHABLE
from .kernels import KernelSpec, psd_check


class HacError(ValueError):
    pass


@dataclass
class Sample:
    """n x v observation matrix, optionally with the known common
    conditional mean."""
    y: np.ndarray
    known_mean: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, None]
        if y.shape[0] < 2:
            raise HacError("sample requires n >= 2")
        if not np.isfinite(y).all():
            raise HacError("sample contains nonfinite entries")
        self.y = y
        if self.known_mean is not None:
            mu = np.atleast_1d(np.asarray(self.known_mean, dtype=np.float64))
            if mu.shape != (y.shape[1],):
                raise HacError("known mean must be a length-v vector")
            self.known_mean = mu

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def v(self):
        return self.y.shape[1]

    def mean(self):
        return self.y.mean(axis=0)


@dataclass
class HacResult:
    V: np.ndarray
    lag_covariances: dict = field(default_factory=dict)
    bandwidth_used: float = 0.0
    weights_applied: dict = field(default_factory=dict)
    psd_flag: bool = True

    def scalar(self):
        if self.V.shape != (1, 1):
            raise HacError("scalar() requires v = 1")
        return float(self.V[0, 0])


def _lag_pair_sums(d, yc, smax):
    """Per-lag cross-product sums: for each s <= smax, sum over ordered
    pairs (i, j) at distance s of yc_i yc_j^T (s = 0 is the diagonal).
    Returns (v, v, smax+1) array."""
    n, v = yc.shape
    out = np.zeros((v, v, smax + 1))
    ii, jj = np.nonzero(d <= smax)
    dd = d[ii, jj].astype(np.int64)
    for a in range(v):
        for b in range(v):
            out[a, b, :] = np.bincount(
                dd, weights=yc[ii, a] * yc[jj, b], minlength=smax + 1)
    return out


def _lag_cap(g: Graph, bandwidth_val):
    diam = g.diameter()
    if not math.isfinite(bandwidth_val):
        return diam
    return min(int(math.floor(bandwidth_val)), diam)


def omega_tilde(g: Graph, sample: Sample, s):
    """Lag-s sample cross-product matrix around the known mean."""
    if sample.known_mean is None:
        raise HacError("omega_tilde requires a known mean")
    yc = sample.y - sample.known_mean
    d = g.distance_matrix()
    if s >= UNREACHABLE or s > g.diameter():
        return np.zeros((sample.v, sample.v))
    mask = d == s
    ii, jj = np.nonzero(mask)
    return (yc[ii].T @ yc[jj]) / sample.n


def omega_hat(g: Graph, sample: Sample, s):
    """Lag-s sample cross-product matrix around the sample mean."""
    yc = sample.y - sample.mean()
    d = g.distance_matrix()
    if s >= UNREACHABLE or s > g.diameter():
        return np.zeros((sample.v, sample.v))
    ii, jj = np.nonzero(d == s)
    return (yc[ii].T @ yc[jj]) / sample.n


def _hac(d, yc, n, spec: KernelSpec, smax):
    sums = _lag_pair_sums(d, yc, smax) / n
    weights = {s: spec.weight(s) for s in range(smax + 1)}
    v_dim = yc.shape[1]
    V = np.zeros((v_dim, v_dim))
    lag_cov = {}
    for s in range(smax + 1):
        om = sums[:, :, s]
        lag_cov[s] = om
        V += weights[s] * om
    V = 0.5 * (V + V.T)  # kill float roundoff asymmetry
    if not np.isfinite(V).all():
        raise HacError("nonfinite HAC estimate")
    return V, lag_cov, weights


def hac_known_mean(g: Graph, sample: Sample, spec: KernelSpec) -> HacResult:
    """Kernel-weighted sum of lag cross-products around the known mean."""
    if sample.known_mean is None:
        raise HacError("hac_known_mean requires a known mean")
    yc = sample.y - sample.known_mean
    smax = _lag_cap(g, spec.bandwidth)
    V, lag_cov, weights = _hac(g.distance_matrix(), yc, sample.n, spec, smax)
    return HacResult(V=V, lag_covariances=lag_cov,
                     bandwidth_used=spec.bandwidth, weights_applied=weights,
                     psd_flag=psd_check(V).psd)


def hac_unknown_mean(g: Graph, sample: Sample, spec: KernelSpec) -> HacResult:
    """Kernel-weighted sum of lag cross-products around the sample mean."""
    yc = sample.y - sample.mean()
    smax = _lag_cap(g, spec.bandwidth)
    V, lag_cov, weights = _hac(g.distance_matrix(), yc, sample.n, spec, smax)
    return HacResult(V=V, lag_covariances=lag_cov,
                     bandwidth_used=spec.bandwidth, weights_applied=weights,
                     psd_flag=psd_check(V).psd)


def hac_partial(g_observed: Graph, sample: Sample, spec: KernelSpec,
                mode="unknown_mean") -> HacResult:
    """HAC estimator computed with the econometrician's (partially observed)
    network: identical formulas with observed distances; pairs unreachable
    in the observed graph are dropped."""
    if mode == "known_mean":
        return hac_known_mean(g_observed, sample, spec)
    if mode == "unknown_mean":
        return hac_unknown_mean(g_observed, sample, spec)
    raise HacError(f"unknown mode {mode!r}")


def confidence_interval(sample: Sample, V, level=0.95):
    """Two-sided normal CI for the mean of a scalar sample:
    ybar +- z * sqrt(V / n)."""
    if sample.v != 1:
        raise HacError("confidence_interval requires v = 1")
    if V < 0:
        raise HacError("indefinite HAC estimate: negative variance")
    z = norm.ppf(0.5 * (1.0 + level))
    ybar = float(sample.mean()[0])
    half = z * math.sqrt(V / sample.n)
    return (ybar - half, ybar + half)


def ma_weight_matrix(g: Graph, gamma, truncation=None):
    """Moving-average weights of the linear network model:
    W[i, j] = gamma**d(i,j) / |shell(i, d(i,j))| for finite distances
    (W[i, i] = 1), zero beyond the truncation lag."""
    if not 0 <= gamma < 1:
        raise HacError("requires gamma in [0, 1)")
    d = g.distance_matrix()
    diam = g.diameter()
    cap = diam if truncation is None else min(int(truncation), diam)
    dd = d.astype(np.int64)
    shell_counts = np.zeros((g.n, cap + 2), dtype=np.int64)
    within = dd <= cap
    ii, jj = np.nonzero(within)
    np.add.at(shell_counts, (ii, dd[ii, jj]), 1)
    gamma_pow = np.concatenate([gamma ** np.arange(cap + 1), [0.0]])
    idx = np.minimum(dd, cap + 1)
    W = gamma_pow[idx]
    denom = shell_counts[np.arange(g.n)[:, None], np.minimum(idx, cap + 1)]
    with np.errstate(divide="ignore", invalid="ignore"):
        W = np.where(denom > 0, W / np.maximum(denom, 1), 0.0)
    return W


def exact_variance_oracle(g: Graph, gamma):
    """Exact conditional variance of the scaled sum for the linear model
    with independent unit-variance shocks: n^{-1} || W^T 1 ||^2.  Accepts
    the gamma value or a model spec carrying one."""
    gamma = getattr(gamma, "gamma", gamma)
    W = ma_weight_matrix(g, gamma)
    col_sums = W.sum(axis=0)
    return float((col_sums ** 2).sum() / g.n)
