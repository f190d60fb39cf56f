"""Monte Carlo sampling of FGM portfolios through the Bernoulli representation.

Draw ``I`` from the scheme, then for each coordinate the minimum
(``I_k = 0``) or maximum (``I_k = 1``) of two iid copies of the marginal.
The order statistic comes from its quantile transform: ``U = 1 - sqrt(1 - V)``
is the minimum of two uniforms and ``U = sqrt(V)`` the maximum.  Mixed
Erlang marginals have no cheap quantile, so the two copies are drawn from
the gamma mixture and ordered directly.

The generator is numpy's Philox (counter based).  A ``SeedSequence`` built
from the user seed is split into one child for ``I`` and one per coordinate,
so batches replay bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ValidationError
from .marginals import MixedErlang
from .portfolio import Portfolio

GENERATOR = f"numpy {np.__version__} Philox4x64-10"


def _rng(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int
    description: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def total(self) -> np.ndarray:
        return self.values.sum(axis=1)


def _order_stat_draw(marginal, pick_max: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = pick_max.size
    if isinstance(marginal, MixedErlang):
        pair = marginal.rvs(rng, (n, 2))
        return np.where(pick_max, pair.max(axis=1), pair.min(axis=1))
    v = rng.random(n)
    u = np.where(pick_max, np.sqrt(v), 1.0 - np.sqrt(1.0 - v))
    u = np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    return np.asarray(marginal.quantile(u), dtype=float)


def sample_portfolio(portfolio: Portfolio, n: int, seed: int = 0) -> SampleBatch:
    """``n`` joint realizations of the portfolio, reproducible under ``seed``."""
    n = int(n)
    if n < 1:
        raise ValidationError("sample size must be positive")
    children = np.random.SeedSequence(int(seed)).spawn(portfolio.d + 1)
    flags = portfolio.scheme.sample(_rng(children[0]), n).astype(bool)
    x = np.empty((n, portfolio.d))
    for k, m in enumerate(portfolio.marginals):
        x[:, k] = _order_stat_draw(m, flags[:, k], _rng(children[k + 1]))
    desc = {
        "generator": GENERATOR,
        "scheme": repr(portfolio.dependence),
        "marginals": [repr(m) for m in portfolio.marginals],
    }
    return SampleBatch(x, int(seed), desc)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def default_band(batch: SampleBatch) -> float:
    """Conditioning half-width ``0.25 sd(S) / n^(1/4)``."""
    return 0.25 * float(batch.total.std(ddof=1)) / batch.n**0.25


def estimate(batch: SampleBatch, statistic: str, **params) -> tuple[float, float]:
    """Point estimate and standard error of a statistic of the batch.

    ``statistic`` is one of ``mean``, ``variance``, ``moment`` (``order``),
    ``cdf`` (``x``), ``tvar`` (``kappa``), ``tail_contribution`` (``k``,
    ``t``) or ``conditional_mean`` (``k``, ``s``, optional ``delta``).
    Risk indices are 0-based.
    """
    if batch.n < 2:
        raise ValidationError("estimates need at least two samples")
    s = batch.total
    if statistic == "mean":
        return _mean_se(s)
    if statistic == "variance":
        c = s - s.mean()
        var = float(c @ c / (s.size - 1))
        m4 = float(np.mean(c**4))
        return var, math.sqrt(max(m4 - var * var, 0.0) / s.size)
    if statistic == "moment":
        return _mean_se(s ** int(params["order"]))
    if statistic == "cdf":
        p = float(np.mean(s <= params["x"]))
        return p, math.sqrt(p * (1 - p) / s.size)
    if statistic == "tvar":
        kappa = float(params["kappa"])
        if not 0 < kappa < 1:
            raise ValidationError("kappa must lie in (0, 1)")
        var = float(np.quantile(s, kappa))
        # influence function of TVaR: VaR + (S - VaR)_+ / (1 - kappa)
        return _mean_se(var + np.maximum(s - var, 0.0) / (1.0 - kappa))
    if statistic == "tail_contribution":
        k = int(params["k"])
        return _mean_se(batch.values[:, k] * (s > params["t"]))
    if statistic == "conditional_mean":
        k = int(params["k"])
        delta = params.get("delta") or default_band(batch)
        inside = np.abs(s - params["s"]) < delta
        if inside.sum() < 2:
            raise ValidationError(f"fewer than two samples within {delta:.4g} of s = {params['s']}")
        return _mean_se(batch.values[inside, k])
    raise ValidationError(f"unknown statistic {statistic!r}")


def spearman(batch: SampleBatch, j: int, k: int) -> float:
    return float(stats.spearmanr(batch.values[:, j], batch.values[:, k])[0])


def kendall(batch: SampleBatch, j: int, k: int) -> float:
    return float(stats.kendalltau(batch.values[:, j], batch.values[:, k])[0])


def empirical_copula(batch: SampleBatch, u: np.ndarray) -> np.ndarray:
    """Empirical copula of the batch at the rows of ``u``."""
    ranks = np.argsort(np.argsort(batch.values, axis=0), axis=0) + 1.0
    pseudo = ranks / batch.n
    u = np.atleast_2d(u)
    return np.array([np.mean(np.all(pseudo <= row, axis=1)) for row in u])
