"""Test statistics and observables used by the verification batteries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .lattice import as_rng

__all__ = [
    "StatisticsVector",
    "bonferroni",
    "bootstrap_ci",
    "correlation_z",
    "dispersion_test",
    "ks_exponential",
    "paired_z",
    "statistic_names",
    "statistics_matrix",
    "statistics_vector",
    "two_sample_z",
]


def ks_exponential(samples, rate: float = 1.0):
    """Kolmogorov-Smirnov test of ``samples`` against Exponential(rate).

    Returns ``(statistic, p_value)``.
    """
    res = stats.kstest(np.asarray(samples, float), "expon", args=(0.0, 1.0 / rate))
    return float(res.statistic), float(res.pvalue)


def dispersion_test(counts, mean: float | None = None):
    """Index-of-dispersion test for Poisson counts.

    With ``mean`` given, the statistic is ``sum (c - mean)^2 / mean`` on
    ``len(counts)`` degrees of freedom; otherwise the sample mean is used and
    one degree is lost.  Two-sided p-value.  Returns ``(index, p_value)``.
    """
    c = np.asarray(counts, float)
    dof = c.size
    if mean is None:
        mean = c.mean()
        dof -= 1
    chi2 = float(np.sum((c - mean) ** 2) / mean)
    cdf = stats.chi2.cdf(chi2, dof)
    sf = stats.chi2.sf(chi2, dof)
    return chi2 / dof, float(min(1.0, 2 * min(cdf, sf)))


def _z_to_p(z):
    return 2.0 * stats.norm.sf(np.abs(z))


def two_sample_z(a, b):
    """Per-column z statistics for equal means of two independent samples.

    ``a`` and ``b`` are ``(replicas, statistics)`` arrays.  Columns with zero
    variance in both samples get ``z = 0`` when the means agree and
    ``inf`` otherwise.  Returns ``(z, p)``.
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    diff = a.mean(0) - b.mean(0)
    se = np.sqrt(a.var(0, ddof=1) / a.shape[0] + b.var(0, ddof=1) / b.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf))
    return z, _z_to_p(z)


def paired_z(a, b):
    """Per-column z statistics for zero mean difference of paired samples."""
    d = np.atleast_2d(np.asarray(a, float) - np.asarray(b, float))
    m = d.mean(0)
    se = d.std(0, ddof=1) / np.sqrt(d.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, m / se, np.where(m == 0, 0.0, np.inf))
    return z, _z_to_p(z)


def bonferroni(p_values, level: float = 0.01):
    """Return ``(reject_any, per_test_threshold, rejected_mask)``."""
    p = np.asarray(p_values, float).ravel()
    thr = level / max(p.size, 1)
    mask = p < thr
    return bool(mask.any()), thr, mask


def bootstrap_ci(samples, statistic=np.mean, level: float = 0.95, n_resamples: int = 2000, seed=None):
    """Seeded percentile bootstrap confidence interval."""
    res = stats.bootstrap(
        (np.asarray(samples, float),),
        statistic,
        confidence_level=level,
        n_resamples=n_resamples,
        method="percentile",
        random_state=as_rng(seed),
        vectorized=False,
    )
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def correlation_z(x, y):
    """Pearson correlation and its z-score ``r sqrt(R)`` under independence."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.std() == 0 or y.std() == 0:
        return 0.0, 0.0
    r = float(np.corrcoef(x, y)[0, 1])
    return r, r * np.sqrt(x.size)


# --------------------------------------------------------------- observables


@dataclass(frozen=True)
class StatisticsVector:
    """Observables of one multiclass window.

    ``densities[c]`` is the frequency of class ``c + 1``; ``pairs[a, b]`` the
    frequency of class ``a + 1`` immediately followed by class ``b + 1``;
    ``correlations[l - 1, k - 1]`` the covariance of the indicators
    ``[xi <= k]`` at sites ``l`` apart.
    """

    densities: np.ndarray
    pairs: np.ndarray
    correlations: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.densities, self.pairs.ravel(), self.correlations.ravel()])

    def row_normalized_pairs(self) -> np.ndarray:
        rows = self.pairs.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rows > 0, self.pairs / rows, 0.0)


def statistics_vector(window, n: int, max_lag: int = 8) -> StatisticsVector:
    """Observables of a class word ``window`` over ``1..n+1``."""
    w = np.asarray(window, dtype=np.int64)
    size = w.size
    dens = np.bincount(w - 1, minlength=n + 1)[: n + 1] / size
    pair_idx = (w[:-1] - 1) * (n + 1) + (w[1:] - 1)
    pairs = np.bincount(pair_idx, minlength=(n + 1) ** 2).reshape(n + 1, n + 1) / (size - 1)
    corr = np.empty((max_lag, n))
    for k in range(1, n + 1):
        ind = (w <= k).astype(float)
        for lag in range(1, max_lag + 1):
            a = ind[:-lag]
            b = ind[lag:]
            corr[lag - 1, k - 1] = (a * b).mean() - a.mean() * b.mean()
    return StatisticsVector(dens, pairs, corr)


def statistics_matrix(windows, n: int, max_lag: int = 8, chunk: int = 2048) -> np.ndarray:
    """Flattened :class:`StatisticsVector` of every row of ``windows``."""
    W = np.atleast_2d(np.asarray(windows))
    out = np.empty((W.shape[0], (n + 1) + (n + 1) ** 2 + max_lag * n))
    for lo in range(0, W.shape[0], chunk):
        w = W[lo : lo + chunk].astype(np.int64)
        rows, size = w.shape
        col = 0
        for c in range(1, n + 2):
            out[lo : lo + rows, col] = (w == c).mean(1)
            col += 1
        pair = (w[:, :-1] - 1) * (n + 1) + (w[:, 1:] - 1)
        pair += (np.arange(rows) * (n + 1) ** 2)[:, None]
        freq = np.bincount(pair.ravel(), minlength=rows * (n + 1) ** 2).reshape(rows, -1)
        out[lo : lo + rows, col : col + (n + 1) ** 2] = freq / (size - 1)
        col += (n + 1) ** 2
        inds = [(w <= k).astype(np.float64) for k in range(1, n + 1)]
        for lag in range(1, max_lag + 1):
            for ind in inds:
                a = ind[:, :-lag]
                b = ind[:, lag:]
                out[lo : lo + rows, col] = (a * b).mean(1) - a.mean(1) * b.mean(1)
                col += 1
    return out


def statistic_names(n: int, max_lag: int = 8) -> list[str]:
    names = [f"density[{c}]" for c in range(1, n + 2)]
    names += [f"pair[{a},{b}]" for a in range(1, n + 2) for b in range(1, n + 2)]
    names += [f"cov[lag={lag},k={k}]" for lag in range(1, max_lag + 1) for k in range(1, n + 1)]
    return names
