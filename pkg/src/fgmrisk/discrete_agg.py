"""Aggregation of lattice risks, discretization and TVaR bounds.

The pmf of ``S`` for lattice marginals on a common span follows the same
recipe as the mixed Erlang case: DFT the min/max order-statistic pmfs,
combine node by node with the Bernoulli kernel, invert.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .aggregate_me import _next_pow2, invert
from .bernoulli import BernoulliScheme
from .errors import TruncationError, ValidationError
from .marginals import GRID_TOL, TRUNC_EPS, Discrete, Marginal, _check_level, discrete_os_pmf
from .portfolio import Portfolio

log = logging.getLogger(__name__)

METHODS = ("lower", "upper")
MAX_CELLS = 1 << 24


@dataclass(frozen=True)
class DiscretizationSpec:
    method: str
    h: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"method must be 'lower' or 'upper', got {self.method!r}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValidationError(f"span h must be positive, got {self.h}")


def _last_cell(m: Marginal, h: float, eps: float) -> int:
    """Smallest ``J`` with ``Pr(X > J h) <= eps``."""
    J = max(int(np.ceil(float(m.quantile(0.5)) / h)), 1)
    while float(m.sf(J * h)) > eps:
        J *= 2
        if J > MAX_CELLS:
            raise TruncationError(f"more than {MAX_CELLS} cells needed at span {h}")
    lo = J // 2
    while J - lo > 1:  # shrink back to the first cell below eps
        mid = (lo + J) // 2
        if float(m.sf(mid * h)) > eps:
            lo = mid
        else:
            J = mid
    return J


def discretize(m: Marginal, spec: DiscretizationSpec | str, h: float | None = None, eps: float = TRUNC_EPS) -> Discrete:
    """Lattice version of ``m`` on ``{0, h, 2h, ...}``.

    ``lower`` rounds mass up to the next grid point (the result dominates
    ``m``); ``upper`` rounds down (the result is dominated by ``m``).  The
    tail beyond the last cell, below ``eps``, is folded into that cell.
    """
    if isinstance(spec, str):
        spec = DiscretizationSpec(spec, h)
    h = spec.h
    J = _last_cell(m, h, eps)
    F = np.asarray(m.cdf(h * np.arange(J + 1)), dtype=float)
    f = np.empty(J + 1)
    if spec.method == "lower":
        f[0] = 0.0
        f[1:] = np.diff(F)
        f[J] += 1.0 - F[J]
    else:
        f[:J] = np.diff(F)
        f[J] = 1.0 - F[J]
    return Discrete(h, np.clip(f, 0.0, None))


def _common_span(marginals) -> float:
    if not all(isinstance(x, Discrete) for x in marginals):
        raise ValidationError("aggregate_pmf needs Discrete marginals; discretize continuous ones first")
    h = marginals[0].span
    if any(abs(x.span - h) > 1e-12 * h for x in marginals):
        raise ValidationError("all discrete marginals must share the same span")
    return h


def aggregate_pmf(portfolio: Portfolio, scheme: BernoulliScheme | None = None) -> Discrete:
    """Pmf of ``S`` for lattice marginals on a shared span."""
    marginals = portfolio.marginals
    scheme = portfolio.scheme if scheme is None else scheme
    if scheme.d != len(marginals):
        raise ValidationError(f"scheme dimension {scheme.d} does not match {len(marginals)} marginals")
    h = _common_span(marginals)
    support = sum(x.masses.size - 1 for x in marginals) + 1
    n = _next_pow2(support)
    g = np.empty((len(marginals), 2, n), dtype=complex)
    for k, x in enumerate(marginals):
        g[k, 0] = np.fft.fft(discrete_os_pmf(x, 1).masses, n)
        g[k, 1] = np.fft.fft(discrete_os_pmf(x, 2).masses, n)
    f = invert(np.asarray(scheme.expected_product(g)), "aggregate_pmf")[:support]
    return Discrete(h, f / f.sum())


def risk_measures(pmf: Discrete, kappa: float) -> tuple[float, float]:
    """``(VaR, TVaR)`` of a lattice law, splitting the atom at VaR."""
    kappa = float(_check_level(kappa))
    x = pmf.support
    f = pmf.masses
    cum = np.cumsum(f)
    idx = min(int(np.searchsorted(cum, kappa - GRID_TOL)), f.size - 1)
    var = float(x[idx])
    tail = float(np.sum(x[idx + 1 :] * f[idx + 1 :]))
    tvar = (tail + var * (cum[idx] - kappa)) / (1.0 - kappa)
    return var, max(tvar, var)


def tvar_sandwich(portfolio: Portfolio, h: float, kappa: float, eps: float = TRUNC_EPS) -> tuple[float, float]:
    """``(TVaR of the upper-method aggregate, TVaR of the lower-method aggregate)``."""
    out = []
    for method in ("upper", "lower"):
        spec = DiscretizationSpec(method, h)
        disc = Portfolio(tuple(discretize(x, spec, eps=eps) for x in portfolio.marginals), portfolio.dependence)
        out.append(risk_measures(aggregate_pmf(disc), kappa)[1])
    return out[0], out[1]
