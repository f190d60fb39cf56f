"""Exact moments of the aggregate ``S`` under FGM dependence.

``E[S^m]`` is expanded over compositions ``j_1 + ... + j_d = m``.  Each term
is a multinomial coefficient times ``prod_k E[X_k^{j_k}]`` times a dependence
factor, evaluated either through the Bernoulli scheme (stochastic forms) or
through the stored theta parameters (natural forms).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .bernoulli import BernoulliScheme
from .copula import FgmCopula, mask_of, subset_of
from .errors import ValidationError
from .portfolio import Portfolio

REPRESENTATIONS = ("stochastic_min", "stochastic_max", "natural_A1", "natural_A2")
COMPOSITION_CAP = 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class MomentRequest:
    portfolio: Portfolio
    order: int
    representation: str = "stochastic_max"
    cap: int = COMPOSITION_CAP

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValidationError(f"moment order must be a positive integer, got {self.order}")
        if self.representation not in REPRESENTATIONS:
            raise ValidationError(f"representation must be one of {REPRESENTATIONS}")
        count = math.comb(self.order + self.portfolio.d - 1, self.portfolio.d - 1)
        if count > self.cap:
            raise ValidationError(f"{count} compositions exceed the cap of {self.cap}")


def compositions(m: int, d: int):
    """Yield ``(chunk, d)`` integer arrays covering all compositions of ``m`` into ``d`` parts."""
    bars = itertools.combinations(range(m + d - 1), d - 1)
    while True:
        block = list(itertools.islice(bars, _CHUNK))
        if not block:
            return
        if d == 1:
            yield np.full((len(block), 1), m, dtype=np.int64)
            continue
        b = np.asarray(block, dtype=np.int64)
        edges = np.concatenate([np.full((len(b), 1), -1), b, np.full((len(b), 1), m + d - 1)], axis=1)
        yield np.diff(edges, axis=1) - 1


def _moment_tables(portfolio: Portfolio, m: int):
    """Per-risk arrays over orders 0..m: raw moments, min and max order-stat moments."""
    d = portfolio.d
    raw = np.ones((d, m + 1))
    lo = np.ones((d, m + 1))
    hi = np.ones((d, m + 1))
    for k, x in enumerate(portfolio.marginals):
        for j in range(1, m + 1):
            raw[k, j] = x.moment(j)
            lo[k, j] = x.os_moment(1, j)
            hi[k, j] = x.os_moment(2, j)
    return raw, lo, hi


def aggregate_moment(
    portfolio: Portfolio | MomentRequest,
    m: int | None = None,
    representation: str = "stochastic_max",
    cap: int = COMPOSITION_CAP,
) -> float:
    """``E[S^m]`` using one of the four equivalent representations."""
    req = portfolio if isinstance(portfolio, MomentRequest) else MomentRequest(portfolio, m, representation, cap)
    p, m = req.portfolio, int(req.order)
    raw, lo, hi = _moment_tables(p, m)
    rows = np.arange(p.d)
    log_fact = special.gammaln(np.arange(m + 1) + 1.0)
    if req.representation.startswith("natural"):
        copula = p.copula
        if req.representation == "natural_A1":
            c = lo / raw - 1.0
        else:
            c = 1.0 - hi / raw
        thetas = [(list(subset_of(mask)), v) for mask, v in copula.theta.items()]
    else:
        scheme = p.scheme
        if req.representation == "stochastic_min":
            r = 1.0 - lo / raw
            g_lo, g_hi = 1.0 - r, 1.0 + r
        else:
            r = 1.0 - hi / raw
            g_lo, g_hi = 1.0 + r, 1.0 - r
    parts = []
    for comp in compositions(m, p.d):
        coef = np.exp(log_fact[m] - log_fact[comp].sum(axis=1))
        base = np.prod(raw[rows, comp], axis=1)
        if req.representation.startswith("natural"):
            cc = c[rows, comp]
            dep = np.ones(len(comp))
            for subset, value in thetas:
                dep = dep + value * np.prod(cc[:, subset], axis=1)
        else:
            g = np.stack([g_lo[rows, comp].T, g_hi[rows, comp].T], axis=1)  # (d, 2, chunk)
            dep = np.real(scheme.expected_product(g))
        parts.append(coef * base * dep)
    return float(np.sum(np.concatenate(parts)))


def variance(portfolio: Portfolio, representation: str = "stochastic_max") -> float:
    m1 = aggregate_moment(portfolio, 1, representation)
    return aggregate_moment(portfolio, 2, representation) - m1 * m1


def pair_theta(dependence: BernoulliScheme | FgmCopula, j: int, k: int) -> float:
    if isinstance(dependence, FgmCopula):
        return dependence.theta.get(mask_of((j, k)), 0.0)
    return 4.0 * dependence.central_mixed_moment((j, k))


def covariance(portfolio: Portfolio, j: int, k: int) -> float:
    """``Cov(X_j, X_k)`` for ``j != k``; the variance of ``X_j`` when ``j == k``."""
    d = portfolio.d
    if not (0 <= j < d and 0 <= k < d):
        raise ValidationError(f"indices must lie in 0..{d - 1}")
    xj, xk = portfolio.marginals[j], portfolio.marginals[k]
    if j == k:
        return xj.variance
    theta = pair_theta(portfolio.dependence, j, k)
    if theta == 0.0:
        return 0.0
    return theta * (xj.mean - xj.os_moment(1, 1)) * (xk.mean - xk.os_moment(1, 1))
