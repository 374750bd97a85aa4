"""Maximum-likelihood fitting of best-tour-length samples.

Four two-parameter families are supported: normal, lognormal, gamma,
weibull. Normal and lognormal have closed-form MLEs (variance with the 1/q
denominator); gamma and weibull solve their shape score equations by Newton
iteration (tolerance 1e-10, at most 100 steps). Families are compared by
small-sample AICc, and each fit reports the probability mass at or below a
target optimum through its CDF.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .special import digamma, erf, gamma_p, log_gamma, trigamma

FAMILIES = ("normal", "lognormal", "gamma", "weibull")
N_PARAMS = 2  # every family has two free parameters
_NEWTON_TOL = 1e-10
_NEWTON_MAX_ITER = 100
_SQRT2 = math.sqrt(2.0)


class FitError(ValueError):
    """Raised when a family cannot be fit to a sample."""


@dataclass(frozen=True)
class FittedDistribution:
    """A family name plus its two fitted parameters.

    Parameter meaning by family: normal (mu, sigma); lognormal (mean and
    sigma of log values); gamma (shape, scale); weibull (shape, scale).
    """

    family: str
    params: tuple[float, float]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


def _as_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise FitError(f"sample must be one-dimensional, got shape {x.shape}")
    if x.size < 3:
        raise FitError(f"need at least 3 observations, got {x.size}")
    if not np.isfinite(x).all():
        raise FitError("sample contains non-finite values")
    return x


def _require_positive(x: np.ndarray, family: str) -> None:
    if (x <= 0).any():
        raise FitError(f"{family} requires strictly positive values")


def _require_spread(x: np.ndarray, family: str) -> None:
    if x.min() == x.max():
        raise FitError(f"{family} is degenerate on a constant sample")


def _fit_normal(x: np.ndarray) -> tuple[float, float]:
    mu = float(x.mean())
    var = float(np.mean((x - mu) ** 2))
    if var <= 0.0:
        raise FitError("normal is degenerate on a constant sample")
    return mu, math.sqrt(var)


def _fit_gamma_shape(s: float) -> float:
    # Newton on ln k - psi(k) = s, seeded with Minka's closed-form start.
    k = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(_NEWTON_MAX_ITER):
        f = math.log(k) - digamma(k) - s
        fp = 1.0 / k - trigamma(k)
        step = f / fp
        new_k = k - step
        while new_k <= 0.0:
            step *= 0.5
            new_k = k - step
        done = abs(new_k - k) <= _NEWTON_TOL * max(1.0, abs(new_k))
        k = new_k
        if done:
            return k
    raise FitError(f"gamma shape iteration did not converge (s={s})")


def _fit_gamma(x: np.ndarray) -> tuple[float, float]:
    _require_positive(x, "gamma")
    _require_spread(x, "gamma")
    mean = float(x.mean())
    s = math.log(mean) - float(np.mean(np.log(x)))
    if s <= 0.0:  # numerically possible only for near-constant data
        raise FitError("gamma is degenerate on a (near-)constant sample")
    k = _fit_gamma_shape(s)
    return k, mean / k


def _fit_weibull(x: np.ndarray) -> tuple[float, float]:
    _require_positive(x, "weibull")
    _require_spread(x, "weibull")
    logx = np.log(x)
    c = float(logx.mean())
    sd = float(np.sqrt(np.mean((logx - c) ** 2)))
    # moment start via the Gumbel relation sd(ln X) = pi / (k sqrt 6)
    k = math.pi / (sd * math.sqrt(6.0))
    z = logx - float(logx.max())  # weights exp(k z) <= 1: no overflow
    for _ in range(_NEWTON_MAX_ITER):
        w = np.exp(k * z)
        sw = float(w.sum())
        a1 = float((w * logx).sum()) / sw
        a2 = float((w * logx * logx).sum()) / sw
        f = a1 - 1.0 / k - c
        fp = (a2 - a1 * a1) + 1.0 / (k * k)
        step = f / fp
        new_k = k - step
        while new_k <= 0.0:
            step *= 0.5
            new_k = k - step
        done = abs(new_k - k) <= _NEWTON_TOL * max(1.0, abs(new_k))
        k = new_k
        if done:
            break
    else:
        raise FitError("weibull shape iteration did not converge")
    w = np.exp(k * z)
    lam = math.exp(float(logx.max())) * float(np.mean(w)) ** (1.0 / k)
    return k, lam


def fit_mle(sample, family: str) -> FittedDistribution:
    """Maximum-likelihood fit of one family. Raises FitError when the
    sample violates the family's support or degenerates it."""
    x = _as_sample(sample)
    if family == "normal":
        _require_spread(x, "normal")
        params = _fit_normal(x)
    elif family == "lognormal":
        _require_positive(x, "lognormal")
        _require_spread(x, "lognormal")
        mu, sigma = _fit_normal(np.log(x))
        params = (mu, sigma)
    elif family == "gamma":
        params = _fit_gamma(x)
    elif family == "weibull":
        params = _fit_weibull(x)
    else:
        raise ValueError(f"unknown family {family!r}")
    return FittedDistribution(family=family, params=(float(params[0]), float(params[1])))


def log_pdf(fit: FittedDistribution, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    p1, p2 = fit.params
    if fit.family == "normal":
        mu, sigma = p1, p2
        return -0.5 * math.log(2.0 * math.pi * sigma * sigma) - (x - mu) ** 2 / (2.0 * sigma * sigma)
    out = np.full(x.shape, -np.inf)
    pos = x > 0
    xp = x[pos]
    if fit.family == "lognormal":
        mu, sigma = p1, p2
        lx = np.log(xp)
        out[pos] = (
            -lx - 0.5 * math.log(2.0 * math.pi * sigma * sigma) - (lx - mu) ** 2 / (2.0 * sigma * sigma)
        )
    elif fit.family == "gamma":
        k, theta = p1, p2
        out[pos] = (k - 1.0) * np.log(xp) - xp / theta - k * math.log(theta) - log_gamma(k)
    elif fit.family == "weibull":
        k, lam = p1, p2
        r = xp / lam
        out[pos] = math.log(k / lam) + (k - 1.0) * np.log(r) - r**k
    else:
        raise ValueError(f"unknown family {fit.family!r}")
    return out


def log_likelihood(sample, fit: FittedDistribution) -> float:
    x = _as_sample(sample)
    return float(log_pdf(fit, x).sum())


def information_criteria(ll: float, q: int, n_params: int = N_PARAMS) -> tuple[float, float, float]:
    """(AIC, AICc, BIC). AICc is undefined (NaN) when q <= n_params + 1."""
    aic = 2.0 * n_params - 2.0 * ll
    if q > n_params + 1:
        aicc = aic + (2.0 * n_params * (n_params + 1.0)) / (q - n_params - 1.0)
    else:
        aicc = math.nan
    bic = n_params * math.log(q) - 2.0 * ll
    return aic, aicc, bic


def cdf(fit: FittedDistribution, x: float) -> float:
    p1, p2 = fit.params
    if fit.family == "normal":
        return 0.5 * (1.0 + erf((x - p1) / (p2 * _SQRT2)))
    if x <= 0.0:
        return 0.0
    if fit.family == "lognormal":
        return 0.5 * (1.0 + erf((math.log(x) - p1) / (p2 * _SQRT2)))
    if fit.family == "gamma":
        return gamma_p(p1, x / p2)
    if fit.family == "weibull":
        return -math.expm1(-((x / p2) ** p1))
    raise ValueError(f"unknown family {fit.family!r}")


def success_probability(fit: FittedDistribution, optimum: float) -> float:
    """P(X <= optimum) under the fitted family: the chance one run reaches
    the target."""
    return cdf(fit, optimum)


def quantile(fit: FittedDistribution, p: float) -> float:
    """Inverse CDF. Weibull is closed-form; the rest bisect to 1e-10."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {p}")
    p1, p2 = fit.params
    if fit.family == "weibull":
        return p2 * (-math.log1p(-p)) ** (1.0 / p1)
    # bracket the root, then bisect
    if fit.family == "normal":
        lo, hi = p1 - 10.0 * p2, p1 + 10.0 * p2
        while cdf(fit, lo) > p:
            lo -= 10.0 * p2
        while cdf(fit, hi) < p:
            hi += 10.0 * p2
    else:
        scale = p2 if fit.family == "gamma" else math.exp(p1)
        lo, hi = 0.0, max(scale, 1.0)
        while cdf(fit, hi) < p:
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-10 * max(1.0, abs(lo), abs(hi)):
            return mid
        if cdf(fit, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FitMetrics:
    log_likelihood: float
    aic: float
    aicc: float
    bic: float
    p_le_optimum: float


@dataclass(frozen=True)
class FamilyFit:
    """One family's outcome on a sample: either a fit with metrics, or the
    reason the fit failed."""

    family: str
    fit: FittedDistribution | None
    metrics: FitMetrics | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.fit is not None


def evaluate_family(sample, family: str, optimum: float) -> FamilyFit:
    try:
        fit = fit_mle(sample, family)
    except FitError as exc:
        return FamilyFit(family=family, fit=None, metrics=None, error=str(exc))
    x = _as_sample(sample)
    ll = log_likelihood(x, fit)
    aic, aicc, bic = information_criteria(ll, x.size)
    metrics = FitMetrics(
        log_likelihood=ll,
        aic=aic,
        aicc=aicc,
        bic=bic,
        p_le_optimum=success_probability(fit, optimum),
    )
    return FamilyFit(family=family, fit=fit, metrics=metrics, error=None)


def rank_families(sample, optimum: float) -> list[FamilyFit]:
    """Fit all four families and order them: successful fits by ascending
    AICc (ties and NaN AICc fall back to the fixed family order), failed
    fits last in family order."""
    results = [evaluate_family(sample, family, optimum) for family in FAMILIES]
    order = {family: i for i, family in enumerate(FAMILIES)}

    def key(ff: FamilyFit):
        if not ff.ok:
            return (1, math.inf, order[ff.family])
        aicc = ff.metrics.aicc
        return (0, aicc if math.isfinite(aicc) else math.inf, order[ff.family])

    return sorted(results, key=key)


def qq_points(sample, fit: FittedDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Q-Q pairs: theoretical quantiles at (i - 0.5) / q versus the sorted
    sample."""
    x = np.sort(_as_sample(sample))
    q = x.size
    probs = (np.arange(1, q + 1) - 0.5) / q
    theo = np.array([quantile(fit, float(p)) for p in probs])
    return theo, x


FIT_REPORT_HEADER = ["family", "param1", "param2", "LL", "AIC", "AICc", "BIC", "P_le_optimum"]


def write_fit_report(fits: Sequence[FamilyFit], out: TextIO | str | Path) -> None:
    """Successful fits, one row per family, in the order given."""
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_fit_report(fits, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FIT_REPORT_HEADER)
    for ff in fits:
        if not ff.ok:
            continue
        m = ff.metrics
        writer.writerow(
            [
                ff.family,
                repr(ff.fit.params[0]),
                repr(ff.fit.params[1]),
                repr(m.log_likelihood),
                repr(m.aic),
                repr(m.aicc),
                repr(m.bic),
                repr(m.p_le_optimum),
            ]
        )


QQ_HEADER = ["theoretical", "empirical"]


def write_qq_csv(theoretical: Iterable[float], empirical: Iterable[float], out: TextIO | str | Path) -> None:
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_qq_csv(theoretical, empirical, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(QQ_HEADER)
    for t, e in zip(theoretical, empirical):
        writer.writerow([repr(float(t)), repr(float(e))])
