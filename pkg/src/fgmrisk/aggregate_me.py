"""Exact aggregation of mixed Erlang risks under FGM dependence.

All marginals are first brought to the common rate ``beta = max_k beta_k``;
their minimum/maximum order statistics then live at rate ``2 beta``.  The
aggregate's shape distribution ``q_S`` is obtained in transform space: the
DFT of every order-statistic shape pmf is combined node by node through the
Bernoulli kernel and inverted once.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .bernoulli import BernoulliScheme, Exchangeable
from .errors import NumericalError, TruncationError, ValidationError
from .marginals import (
    TRUNC_EPS,
    MixedErlang,
    as_mixed_erlang,
    me_order_weights,
    rescale_rate,
    trim_tail,
)
from .portfolio import Portfolio

log = logging.getLogger(__name__)

IMAG_TOL = 1e-9
NEG_TOL = 1e-9
MAX_DFT = 1 << 24


@dataclass(frozen=True, eq=False)
class AggregateME(MixedErlang):
    """Mixed Erlang law of ``S`` with a record of how it was computed."""

    provenance: dict = field(default_factory=dict)


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()


def _portfolio_hash(portfolio: Portfolio) -> str:
    h = hashlib.sha256()
    for m in portfolio.marginals:
        me = as_mixed_erlang(m)
        h.update(np.float64(me.rate).tobytes())
        h.update(me.weights.tobytes())
    h.update(repr(portfolio.dependence).encode())
    return h.hexdigest()[:16]


def order_stat_shape_pmfs(portfolio: Portfolio, eps: float = TRUNC_EPS):
    """Common order-statistic rate and, per risk, the (min, max) shape pmfs.

    Each pmf is indexed by shape (entry 0 is the empty shape, always 0).
    """
    mes = [as_mixed_erlang(m) for m in portfolio.marginals]
    rate = max(m.rate for m in mes)
    pmfs = []
    for m in mes:
        lo, hi = me_order_weights(rescale_rate(m, rate, eps), eps)
        pmfs.append((np.concatenate([[0.0], lo.weights]), np.concatenate([[0.0], hi.weights])))
    return 2.0 * rate, pmfs


def transforms(pmfs, n: int) -> np.ndarray:
    """``(d, 2, n)`` array of DFTs of the (min, max) pmfs, zero-padded to length ``n``."""
    g = np.empty((len(pmfs), 2, n), dtype=complex)
    for k, (lo, hi) in enumerate(pmfs):
        g[k, 0] = np.fft.fft(lo, n)
        g[k, 1] = np.fft.fft(hi, n)
    return g


def invert(phi: np.ndarray, what: str = "aggregate") -> np.ndarray:
    """Inverse DFT to a real pmf; fails loudly on a large imaginary residue."""
    p = np.fft.ifft(phi)
    resid = float(np.max(np.abs(p.imag))) if p.size else 0.0
    if resid > IMAG_TOL:
        raise NumericalError(f"{what}: imaginary residue {resid:.3g} after inverse DFT")
    p = p.real
    worst = float(p.min())
    if worst < -NEG_TOL:
        raise NumericalError(f"{what}: negative mass {worst:.3g} after inverse DFT")
    if worst < 0:
        log.debug("%s: clipped negative masses down to %.3g", what, worst)
    return np.clip(p, 0.0, None)


def aggregate(portfolio: Portfolio, eps: float = TRUNC_EPS, max_dft: int = MAX_DFT) -> AggregateME:
    """Mixed Erlang distribution of ``S = X_1 + ... + X_d``."""
    rate2, pmfs = order_stat_shape_pmfs(portfolio, eps)
    support = sum(max(lo.size, hi.size) - 1 for lo, hi in pmfs)
    n = _next_pow2(support + 1)
    scheme = portfolio.scheme
    while True:
        if n > max_dft:
            raise TruncationError(f"DFT length {n} exceeds the cap {max_dft}")
        phi = scheme.expected_product(transforms(pmfs, n))
        q = invert(np.asarray(phi))
        if q[-1] <= eps:
            break
        log.info("aggregate: mass %.3g at the last DFT index, doubling length to %d", q[-1], 2 * n)
        n *= 2
    q = trim_tail(q[1:], eps)
    q = q / q.sum()
    prov = {"portfolio": _portfolio_hash(portfolio), "trunc_eps": eps, "dft_length": n}
    return AggregateME(rate2, q, provenance=prov)


def exp_iid_fast(d: int, beta: float, scheme: BernoulliScheme | np.ndarray, eps: float = TRUNC_EPS) -> AggregateME:
    """Aggregate of ``d`` iid Exponential(beta) risks under an exchangeable scheme.

    At rate ``2 beta`` the shape count is ``M = d + K`` where, given
    ``N_d = n``, ``K`` is a sum of ``n`` independent Geometric(1/2) counts on
    {1, 2, ...}, i.e. negative binomial.
    """
    if isinstance(scheme, Exchangeable):
        nd = scheme.nd_pmf
    else:
        nd = np.asarray(scheme, dtype=float)
    if nd.size != d + 1:
        raise ValidationError(f"N_d pmf must have length d + 1 = {d + 1}")
    ns = np.nonzero(nd > 0)[0]
    n_max = int(ns.max())
    kmax = n_max + int(stats.nbinom.isf(eps * 1e-3, max(n_max, 1), 0.5)) + 2
    K = np.arange(kmax + 1)
    pk = np.zeros(kmax + 1)
    for n in ns:
        if n == 0:
            pk[0] += nd[0]
        else:
            pk += nd[n] * stats.nbinom.pmf(K - n, n, 0.5)
    q = np.concatenate([np.zeros(d - 1), pk])  # shape j = d + K, stored at j - 1
    q = trim_tail(q, eps)
    q = q / q.sum()
    return AggregateME(2.0 * beta, q, provenance={"method": "exp_iid_fast", "trunc_eps": eps})


def cdf(agg: MixedErlang, x):
    return agg.cdf(x)


def var_risk(agg: MixedErlang, kappa: float) -> float:
    return agg.var_risk(kappa)


def tvar(agg: MixedErlang, kappa: float) -> float:
    return agg.tvar(kappa)
