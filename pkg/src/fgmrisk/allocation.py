"""Risk allocation for common-rate mixed Erlang portfolios.

Given the shapes, ``X_m`` is Erlang(l_m, r) and ``S`` is Erlang(l, r) with
``l = sum_k l_k``, so ``E[X_m 1{S in ds}] = (l_m / r) h(s; l + 1, r) ds``.
Averaging over the shapes gives

    E[X_m 1{S in ds}] = sum_l c_m[l] h(s; l + 1, r) / r

with ``c_m[l] = E[L_m 1{L = l}]``.  Its generating function is the
aggregate one with coordinate ``m``'s transforms replaced by those of the
size-biased sequences ``l * pi(l)``, so each ``c_m`` costs one kernel call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .aggregate_me import _next_pow2, invert, order_stat_shape_pmfs, transforms
from .errors import NumericalError, ValidationError
from .marginals import TRUNC_EPS, MixedErlang, _check_level, trim_tail
from .portfolio import Portfolio

MIN_DENSITY = 1e-300


@dataclass(frozen=True)
class AllocationResult:
    """Per-risk contributions with the quantity they decompose."""

    contributions: np.ndarray
    context: dict
    reference: float
    provenance: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(np.sum(self.contributions))


@dataclass(frozen=True, eq=False)
class AllocationSeries:
    """Shape-indexed series ``c[m, l] = E[L_m 1{L = l}]`` and ``q[l] = Pr(L = l)``."""

    rate: float
    c: np.ndarray
    q: np.ndarray
    trunc_eps: float

    @property
    def aggregate(self) -> MixedErlang:
        w = trim_tail(self.q[1:], self.trunc_eps)
        return MixedErlang(self.rate, w / w.sum())


def allocation_series(portfolio: Portfolio, eps: float = TRUNC_EPS) -> AllocationSeries:
    rate, pmfs = order_stat_shape_pmfs(portfolio, eps)
    support = sum(max(lo.size, hi.size) - 1 for lo, hi in pmfs)
    n = _next_pow2(support + 1)
    scheme = portfolio.scheme
    g = transforms(pmfs, n)
    q = invert(np.asarray(scheme.expected_product(g)))
    c = np.empty((portfolio.d, n))
    for m, (lo, hi) in enumerate(pmfs):
        gm = g.copy()
        gm[m, 0] = np.fft.fft(np.arange(lo.size) * lo, n)
        gm[m, 1] = np.fft.fft(np.arange(hi.size) * hi, n)
        c[m] = invert(np.asarray(scheme.expected_product(gm)), f"allocation series for risk {m}")
    return AllocationSeries(rate, c, q, eps)


def _series(portfolio, series, eps):
    return allocation_series(portfolio, eps) if series is None else series


def _check_s(s: float) -> float:
    s = float(s)
    if not np.isfinite(s) or s < 0:
        raise ValidationError(f"s must be nonnegative, got {s}")
    return s


def expected_allocation_density(
    portfolio: Portfolio, m: int, s: float, series: AllocationSeries | None = None, eps: float = TRUNC_EPS
) -> float:
    """``E[X_m 1{S = s}]`` as a density in ``s`` (``m`` is 0-based)."""
    if not 0 <= m < portfolio.d:
        raise ValidationError(f"risk index must lie in 0..{portfolio.d - 1}")
    sr = _series(portfolio, series, eps)
    return float(_numerators(sr, _check_s(s))[m])


def _numerators(sr: AllocationSeries, s: float) -> np.ndarray:
    l = np.arange(sr.c.shape[1])
    return sr.c @ stats.gamma.pdf(s, l + 1, scale=1.0 / sr.rate) / sr.rate


def density(sr: AllocationSeries, s: float) -> float:
    l = np.arange(1, sr.q.size)
    return float(sr.q[1:] @ stats.gamma.pdf(s, l, scale=1.0 / sr.rate))


def cmrs(portfolio: Portfolio, s: float, series: AllocationSeries | None = None, eps: float = TRUNC_EPS) -> AllocationResult:
    """Conditional mean risk sharing ``E[X_k | S = s]`` for every risk."""
    s = _check_s(s)
    sr = _series(portfolio, series, eps)
    f = density(sr, s)
    if f < MIN_DENSITY:
        raise NumericalError(f"f_S({s}) = {f:.3g} is below {MIN_DENSITY}; s is outside the effective support")
    contrib = _numerators(sr, s) / f
    return AllocationResult(contrib, {"s": s}, f, {"trunc_eps": sr.trunc_eps, "rate": sr.rate})


def tvar_allocation(
    portfolio: Portfolio, kappa: float, series: AllocationSeries | None = None, eps: float = TRUNC_EPS
) -> AllocationResult:
    """Euler contributions ``E[X_k 1{S > VaR}] / (1 - kappa)``, summing to ``TVaR_kappa(S)``."""
    kappa = float(_check_level(kappa))
    sr = _series(portfolio, series, eps)
    agg = sr.aggregate
    var = agg.var_risk(kappa)
    tv = agg.tvar(kappa, var)
    l = np.arange(sr.c.shape[1])
    tail = stats.poisson.cdf(l, sr.rate * var)  # Erlang(l + 1) survival at var
    contrib = sr.c @ tail / sr.rate / (1.0 - kappa)
    return AllocationResult(contrib, {"kappa": kappa, "var": var}, tv, {"trunc_eps": sr.trunc_eps, "rate": sr.rate})
