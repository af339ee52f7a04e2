"""Correlation and curve-fit helpers for distribution summaries.

pearson and partial_correlation are two-pass compensated implementations;
fit_exponential fits p_k = alpha * exp(-lam * k) to a runtime histogram by
damped Gauss-Newton, seeded from an ordinary least-squares line through the
log frequencies unless a start is given.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .measures import Distribution, correlation_dataset


class FitError(RuntimeError):
    """Raised when the exponential fit cannot be computed or fails to converge."""


def _check_pair(x: Sequence[float], y: Sequence[float]) -> int:
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise ValueError(f"need at least 3 points, got {len(x)}")
    return len(x)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample correlation coefficient of two equal-length sequences."""
    n = _check_pair(x, y)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation is undefined for a constant sequence")
    return sxy / math.sqrt(sxx * syy)


def partial_correlation(
    x: Sequence[float], y: Sequence[float], z: Sequence[float]
) -> float:
    """Correlation of x and y with the linear effect of z removed."""
    r_xy = pearson(x, y)
    r_xz = pearson(x, z)
    r_yz = pearson(y, z)
    denom_sq = (1.0 - r_xz * r_xz) * (1.0 - r_yz * r_yz)
    if denom_sq <= 0.0:
        raise ValueError("partial correlation is undefined: a variable is collinear with z")
    return (r_xy - r_xz * r_yz) / math.sqrt(denom_sq)


@dataclass(frozen=True)
class CorrelationReport:
    r_km_n: float
    r_km_n_given_len: float
    r_km_ld: float
    r_km_ld_given_len: float


def correlation_report(dist: Distribution) -> CorrelationReport:
    """Correlations between complexity, producer size, depth, and length."""
    kms, min_ns, min_ts, lengths = correlation_dataset(dist)
    return CorrelationReport(
        r_km_n=pearson(kms, min_ns),
        r_km_n_given_len=partial_correlation(kms, min_ns, lengths),
        r_km_ld=pearson(kms, min_ts),
        r_km_ld_given_len=partial_correlation(kms, min_ts, lengths),
    )


def normalize_histogram(counts: Mapping[int, int]) -> dict[int, float]:
    """Turn occurrence counts into frequencies summing to one."""
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("histogram has no mass")
    return {k: c / total for k, c in sorted(counts.items())}


@dataclass(frozen=True)
class FitResult:
    alpha: float
    lam: float
    rss: float
    iterations: int

    def value(self, k: float) -> float:
        return self.alpha * math.exp(-self.lam * k)


def _log_linear_start(ks: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    pos = ys > 0.0
    if int(pos.sum()) < 2:
        raise FitError("need at least two positive frequencies to seed the fit")
    k = ks[pos]
    logy = np.log(ys[pos])
    km = k.mean()
    lm = logy.mean()
    skk = float(((k - km) ** 2).sum())
    if skk == 0.0:
        raise FitError("cannot seed the fit from a single step value")
    slope = float(((k - km) * (logy - lm)).sum()) / skk
    return math.exp(lm - slope * km), -slope


def fit_exponential(
    values: Mapping[int, float],
    *,
    start: tuple[float, float] | None = None,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> FitResult:
    """Least-squares fit of alpha * exp(-lam * k) to {k: frequency}.

    Gauss-Newton with step halving: a proposed step is shortened until the
    residual sum of squares stops increasing.  Converges when the relative
    parameter change drops below tol.
    """
    items = sorted(values.items())
    ks = np.array([float(k) for k, _ in items])
    ys = np.array([float(v) for _, v in items])
    if int((ys > 0.0).sum()) < 2:
        raise FitError("need at least two step values with positive mass")
    if start is None:
        alpha, lam = _log_linear_start(ks, ys)
    else:
        alpha, lam = float(start[0]), float(start[1])

    resid = alpha * np.exp(-lam * ks) - ys
    rss = float(resid @ resid)
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        decay = np.exp(-lam * ks)
        j_alpha = decay
        j_lam = -alpha * ks * decay
        g0 = float(j_alpha @ resid)
        g1 = float(j_lam @ resid)
        a00 = float(j_alpha @ j_alpha)
        a01 = float(j_alpha @ j_lam)
        a11 = float(j_lam @ j_lam)
        det = a00 * a11 - a01 * a01
        if not math.isfinite(det) or det == 0.0:
            raise FitError("normal equations are singular")
        d_alpha = -(a11 * g0 - a01 * g1) / det
        d_lam = -(a00 * g1 - a01 * g0) / det
        step = 1.0
        while True:
            new_alpha = alpha + step * d_alpha
            new_lam = lam + step * d_lam
            new_resid = new_alpha * np.exp(-new_lam * ks) - ys
            new_rss = float(new_resid @ new_resid)
            if new_rss <= rss or step < 1e-12:
                break
            step *= 0.5
        param_change = max(
            abs(step * d_alpha) / max(abs(alpha), 1e-300),
            abs(step * d_lam) / max(abs(lam), 1e-300),
        )
        alpha, lam, resid, rss = new_alpha, new_lam, new_resid, new_rss
        if param_change <= tol:
            converged = True
            break
    if not converged:
        raise FitError(f"no convergence after {max_iter} iterations (rss={rss:.3e})")
    if lam <= 0.0 or not math.isfinite(lam) or not math.isfinite(alpha):
        raise FitError(f"fit did not yield a decaying exponential (lam={lam!r})")
    return FitResult(alpha=alpha, lam=lam, rss=rss, iterations=iterations)


def tail_mass_log10(lam: float, cutoff: int) -> float:
    """log10 of exp(-lam * cutoff): mass scale beyond the observation bound."""
    if lam <= 0.0:
        raise ValueError("decay rate must be positive")
    if cutoff < 0:
        raise ValueError("cutoff must not be negative")
    if cutoff == 0:
        return 0.0
    return -cutoff * lam / math.log(10.0)
