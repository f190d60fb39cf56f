"""Marginal distributions and their order-statistic views.

For each marginal ``X``, ``X[1]`` and ``X[2]`` denote the minimum and maximum
of two iid copies.  Mixed Erlang weight vectors are stored with
``weights[j - 1]`` the probability of shape ``j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .errors import NumericalError, TruncationError, ValidationError

TRUNC_EPS = 1e-12
MAX_SHAPE = 1 << 16
WEIGHT_TOL = 1e-9
# slack when comparing a float cdf against a level on a discrete grid
GRID_TOL = 1e-12


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be positive and finite, got {value}")
    return value


def _check_level(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)) or np.any(np.isnan(u)):
        raise ValidationError("probability level must lie in (0, 1)")
    return u


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def trim_tail(weights: np.ndarray, eps: float = TRUNC_EPS) -> np.ndarray:
    """Drop trailing entries whose total mass is below ``eps``."""
    w = np.asarray(weights, dtype=float)
    tail = np.cumsum(w[::-1])[::-1]  # tail[i] = sum(w[i:])
    keep = np.nonzero(tail >= eps)[0]
    n = keep[-1] + 1 if keep.size else 1
    return w[: max(n, 1)].copy()


def invert_monotone(sf, level_sf: float, mean: float, scale: float, rtol: float = 1e-12) -> float:
    """Smallest ``x >= 0`` with ``sf(x) <= level_sf`` for a continuous decreasing ``sf``.

    The bracket starts at ``mean`` and grows geometrically.
    """
    lo, hi = 0.0, max(mean, scale, 1e-300)
    if sf(lo) <= level_sf:
        return 0.0
    for _ in range(200):
        if sf(hi) <= level_sf:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalError("could not bracket the quantile")
    return optimize.brentq(lambda x: sf(x) - level_sf, lo, hi, xtol=rtol * max(scale, 1e-300), rtol=1e-15, maxiter=500)


class Marginal:
    """Common interface: cdf/sf/quantile, raw moments and order-statistic views."""

    def cdf(self, x):
        return _scalar(1.0 - np.asarray(self.sf(x)))

    def sf(self, x):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def moment(self, k: int) -> float:
        raise NotImplementedError

    def os_moment(self, j: int, k: int) -> float:
        """``k``-th moment of the minimum (j=1) or maximum (j=2) of two iid copies."""
        raise ValidationError(
            f"{type(self).__name__} has no closed-form order-statistic moments; "
            "discretize it and use the discrete aggregation path"
        )

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def variance(self) -> float:
        return self.moment(2) - self.moment(1) ** 2

    def order_stat(self, j: int) -> "OrderStatView":
        return OrderStatView(self, j)

    def rvs(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.asarray(self.quantile(rng.random(size)))


def _check_os(j: int, k: int) -> None:
    if j not in (1, 2):
        raise ValidationError("order statistic index must be 1 (minimum) or 2 (maximum)")
    if k < 0:
        raise ValidationError("moment order must be nonnegative")


@dataclass(frozen=True)
class OrderStatView:
    """Minimum (``j = 1``) or maximum (``j = 2``) of two iid copies of ``source``."""

    source: Marginal
    j: int

    def __post_init__(self):
        _check_os(self.j, 0)

    def cdf(self, x):
        F = np.asarray(self.source.cdf(x))
        if self.j == 1:
            return _scalar(1.0 - np.asarray(self.source.sf(x)) ** 2)
        return _scalar(F**2)

    def sf(self, x):
        return _scalar(1.0 - np.asarray(self.cdf(x)))

    def moment(self, k: int) -> float:
        return self.source.os_moment(self.j, k)


@dataclass(frozen=True)
class Exponential(Marginal):
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar(np.where(x < 0, 1.0, np.exp(-self.rate * np.clip(x, 0, None))))

    def quantile(self, u):
        return _scalar(-np.log1p(-_check_level(u)) / self.rate)

    def moment(self, k: int) -> float:
        return math.factorial(k) / self.rate**k

    def os_moment(self, j: int, k: int) -> float:
        _check_os(j, k)
        m_min = math.factorial(k) / (2 * self.rate) ** k
        return m_min if j == 1 else 2 * self.moment(k) - m_min

    def to_mixed_erlang(self) -> "MixedErlang":
        return MixedErlang(self.rate, np.array([1.0]))


@dataclass(frozen=True, eq=False)
class MixedErlang(Marginal):
    """Countable mixture of Erlang(j, rate) laws, truncated to finite support."""

    rate: float
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise ValidationError("mixed Erlang needs at least one weight")
        if np.any(w < -1e-12):
            raise ValidationError("mixed Erlang weights must be nonnegative")
        w = np.clip(w, 0.0, None)
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"mixed Erlang weights sum to {w.sum():.15g}, expected 1")
        if w.size > MAX_SHAPE:
            raise TruncationError(f"{w.size} shapes exceed the cap of {MAX_SHAPE}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def shapes(self) -> np.ndarray:
        return np.arange(1, self.weights.size + 1)

    def _tail_weights(self) -> np.ndarray:
        # tail[n] = sum_{j > n} q_j, n = 0..J-1
        return np.cumsum(self.weights[::-1])[::-1]

    def sf(self, x):
        # Pr(X > x) = sum_n Pois(n; rate x) * Pr(L > n)
        x = np.asarray(x, dtype=float)
        xs = np.clip(x, 0, None)
        n = np.arange(self.weights.size).reshape((-1,) + (1,) * x.ndim)
        out = np.sum(stats.poisson.pmf(n, self.rate * xs) * self._tail_weights().reshape(n.shape), axis=0)
        return _scalar(np.where(x < 0, 1.0, np.minimum(out, 1.0)))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        j = self.shapes.reshape((-1,) + (1,) * x.ndim)
        dens = stats.gamma.pdf(np.clip(x, 0, None), j, scale=1.0 / self.rate)
        return _scalar(np.sum(self.weights.reshape(j.shape) * dens, axis=0))

    def quantile(self, u):
        u = _check_level(u)
        sd = math.sqrt(max(self.variance, 0.0))
        f = np.vectorize(lambda p: invert_monotone(self.sf, 1.0 - p, self.mean, max(sd, 1.0 / self.rate)))
        return _scalar(f(u))

    def moment(self, k: int) -> float:
        j = self.shapes
        logs = special.gammaln(j + k) - special.gammaln(j)
        return float(np.sum(self.weights * np.exp(logs))) / self.rate**k

    def os_moment(self, j: int, k: int) -> float:
        _check_os(j, k)
        m_min = me_order_weights(self)[0].moment(k)
        return m_min if j == 1 else 2 * self.moment(k) - m_min

    def var_risk(self, kappa: float) -> float:
        kappa = float(_check_level(kappa))
        sd = math.sqrt(max(self.variance, 0.0))
        return invert_monotone(self.sf, 1.0 - kappa, self.mean, max(sd, 1.0 / self.rate))

    def tvar(self, kappa: float, var: float | None = None) -> float:
        """``sum_j q_j (j / rate) Pr(Erlang(j+1) > VaR) / (1 - kappa)``."""
        kappa = float(_check_level(kappa))
        v = self.var_risk(kappa) if var is None else var
        j = self.shapes
        tail = stats.poisson.cdf(j, self.rate * v)
        return float(np.sum(self.weights * j * tail) / self.rate / (1.0 - kappa))

    def rvs(self, rng, size):
        shapes = rng.choice(self.shapes, size=size, p=self.weights / self.weights.sum())
        return rng.gamma(shapes, 1.0 / self.rate)

    @classmethod
    def from_counts(cls, rate: float, family: str, eps: float = 1e-15, **params) -> "MixedErlang":
        """Weights ``q_j = Pr(1 + K = j)`` for a count law ``K`` on {0, 1, ...}.

        ``family`` is one of ``dirac`` (``k``), ``geometric`` (``p``),
        ``poisson`` (``mu``) or ``negbin`` (``n``, ``p``).
        """
        dists = {
            "poisson": lambda: stats.poisson(params["mu"]),
            "geometric": lambda: stats.geom(params["p"], loc=-1),
            "negbin": lambda: stats.nbinom(params["n"], params["p"]),
        }
        if family == "dirac":
            k = int(params.get("k", 0))
            w = np.zeros(k + 1)
            w[k] = 1.0
            return cls(rate, w)
        if family not in dists:
            raise ValidationError(f"unknown count family {family!r}")
        dist = dists[family]()
        upper = int(dist.isf(eps / 4)) + 2
        if upper > MAX_SHAPE:
            raise TruncationError(f"count law needs {upper} shapes, above the cap {MAX_SHAPE}")
        w = trim_tail(dist.pmf(np.arange(upper)), eps)
        return cls(rate, w)


@dataclass(frozen=True)
class ParetoIV(Marginal):
    """Survival ``[1 + ((x - mu)/sigma)^(1/gamma)]^(-alpha)`` for ``x > mu``."""

    mu: float
    sigma: float
    gamma: float
    alpha: float

    def __post_init__(self):
        for name in ("sigma", "gamma", "alpha"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        object.__setattr__(self, "mu", float(self.mu))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.clip(x - self.mu, 0, None) / self.sigma
        return _scalar(np.where(x <= self.mu, 1.0, (1.0 + z ** (1.0 / self.gamma)) ** (-self.alpha)))

    def quantile(self, u):
        u = _check_level(u)
        return _scalar(self.mu + self.sigma * np.expm1(-np.log1p(-u) / self.alpha) ** self.gamma)

    def _check_order(self, k: int, alpha: float) -> None:
        if not k < alpha / self.gamma:
            raise ValidationError(
                f"Pareto(IV) moment of order {k} does not exist: need order < alpha/gamma = {alpha / self.gamma:.6g}"
            )

    def _shifted_moment(self, k: int, alpha: float) -> float:
        # E[(mu + Y)^k] with Y the mu = 0 version
        self._check_order(k, alpha)
        total = 0.0
        for i in range(k + 1):
            y = special.gammaln(alpha - self.gamma * i) + special.gammaln(1 + self.gamma * i) - special.gammaln(alpha)
            total += math.comb(k, i) * self.mu ** (k - i) * self.sigma**i * math.exp(y)
        return total

    def moment(self, k: int) -> float:
        return self._shifted_moment(k, self.alpha)

    def os_moment(self, j: int, k: int) -> float:
        _check_os(j, k)
        m_min = self._shifted_moment(k, 2 * self.alpha)
        if j == 1:
            return m_min
        return 2 * self.moment(k) - m_min


@dataclass(frozen=True)
class Weibull(Marginal):
    """Survival ``exp(-(rate x)^shape)``."""

    rate: float
    shape: float

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))
        object.__setattr__(self, "shape", _positive("shape", self.shape))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar(np.where(x < 0, 1.0, np.exp(-((self.rate * np.clip(x, 0, None)) ** self.shape))))

    def quantile(self, u):
        u = _check_level(u)
        return _scalar((-np.log1p(-u)) ** (1.0 / self.shape) / self.rate)

    def moment(self, k: int) -> float:
        return math.gamma(1 + k / self.shape) / self.rate**k

    def os_moment(self, j: int, k: int) -> float:
        # the minimum of two copies is Weibull with rate 2^(1/shape) * rate
        _check_os(j, k)
        m_min = self.moment(k) * 2.0 ** (-k / self.shape)
        return m_min if j == 1 else 2 * self.moment(k) - m_min


@dataclass(frozen=True)
class LogNormal(Marginal):
    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        object.__setattr__(self, "mu", float(self.mu))

    @classmethod
    def from_mean_var(cls, mean: float, var: float) -> "LogNormal":
        s2 = math.log1p(var / mean**2)
        return cls(math.log(mean) - s2 / 2, math.sqrt(s2))

    @property
    def _dist(self):
        return stats.lognorm(s=self.sigma, scale=math.exp(self.mu))

    def sf(self, x):
        return _scalar(self._dist.sf(np.asarray(x, dtype=float)))

    def cdf(self, x):
        return _scalar(self._dist.cdf(np.asarray(x, dtype=float)))

    def quantile(self, u):
        return _scalar(self._dist.ppf(_check_level(u)))

    def moment(self, k: int) -> float:
        return math.exp(k * self.mu + 0.5 * k * k * self.sigma**2)


@dataclass(frozen=True, eq=False)
class Discrete(Marginal):
    """Masses ``masses[j]`` on the lattice points ``j * span``."""

    span: float
    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "span", _positive("span", self.span))
        p = np.asarray(self.masses, dtype=float).ravel()
        if p.size == 0:
            raise ValidationError("discrete pmf needs at least one mass")
        if np.any(p < -1e-12):
            raise ValidationError("discrete masses must be nonnegative")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"discrete masses sum to {p.sum():.15g}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "masses", p)

    @property
    def support(self) -> np.ndarray:
        return self.span * np.arange(self.masses.size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.floor(x / self.span + 1e-9).astype(int)
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        out = np.where(idx < 0, 0.0, cum[np.clip(idx + 1, 0, self.masses.size)])
        return _scalar(np.minimum(out, 1.0))

    def sf(self, x):
        return _scalar(1.0 - np.asarray(self.cdf(x)))

    def quantile(self, u):
        u = _check_level(u)
        cum = np.cumsum(self.masses)
        idx = np.searchsorted(cum, u - GRID_TOL, side="left")
        return _scalar(self.span * np.minimum(idx, self.masses.size - 1))

    def moment(self, k: int) -> float:
        return float(np.sum(self.support**k * self.masses))

    def os_moment(self, j: int, k: int) -> float:
        _check_os(j, k)
        return discrete_os_pmf(self, j).moment(k)


def as_mixed_erlang(m: Marginal) -> MixedErlang:
    if isinstance(m, MixedErlang):
        return m
    if isinstance(m, Exponential):
        return m.to_mixed_erlang()
    raise ValidationError(f"{type(m).__name__} is not a mixed Erlang (or exponential) marginal")


def _grow(compute, start: int, eps: float, total: float = 1.0):
    """Evaluate ``compute(L)`` for doubling ``L`` until the mass missed is below ``eps``.

    ``total`` is the mass the untruncated output would carry; inputs that
    were themselves truncated fall slightly short of 1.
    """
    L = start
    while True:
        w = compute(L)
        if w.sum() >= total - eps or L >= MAX_SHAPE:
            break
        L = min(2 * L, MAX_SHAPE)
    if w.sum() < total - max(eps, WEIGHT_TOL):
        raise TruncationError(f"weights still miss {total - w.sum():.3g} of mass at the shape cap {MAX_SHAPE}")
    return trim_tail(w, eps)


def me_order_weights(m: MixedErlang, eps: float = TRUNC_EPS) -> tuple[MixedErlang, MixedErlang]:
    """Mixed Erlang laws of the minimum and maximum of two iid copies, at rate ``2 * rate``."""
    m = as_mixed_erlang(m)
    q = m.weights
    J = q.size
    Q = np.concatenate([[0.0], np.cumsum(q)])  # Q[n] = q_1 + ... + q_n
    Qbar = np.concatenate([m._tail_weights(), [0.0]])  # Qbar[n] = 1 - Q[n], n = 0..J

    def block(L, cum):
        # sum_m C(j-1, m) 2^(1-j) q_{m+1} cum[j-1-m], j = 1..L
        j = np.arange(1, L + 1)[:, None]
        mm = np.arange(J)[None, :]
        rest = j - 1 - mm
        coef = stats.binom.pmf(mm, j - 1, 0.5) * q[None, :]
        return np.sum(np.where(rest >= 0, coef * cum[np.clip(rest, 0, J)], 0.0), axis=1)

    # the minimum lives on shapes 1..2J-1 exactly; the maximum has a geometric tail
    lo = block(2 * J - 1, Qbar)
    hi = _grow(lambda L: block(L, Q), 2 * J + 64, eps, Q[-1] ** 2)
    return MixedErlang(2 * m.rate, lo), MixedErlang(2 * m.rate, hi)


def rescale_rate(m: MixedErlang, new_rate: float, eps: float = TRUNC_EPS) -> MixedErlang:
    """Re-express a mixed Erlang at a larger rate; the distribution is unchanged."""
    m = as_mixed_erlang(m)
    new_rate = _positive("new_rate", new_rate)
    if new_rate < m.rate * (1 - 1e-15):
        raise ValidationError(f"new rate {new_rate} is below the current rate {m.rate}")
    if new_rate <= m.rate:
        return m
    p = m.rate / new_rate
    q = m.weights
    J = q.size

    def compute(L):
        n = np.arange(1, L + 1)[:, None]
        j = np.arange(1, J + 1)[None, :]
        # Pr(n trials for j successes) = C(n-1, j-1) p^j (1-p)^(n-j)
        return np.sum(q[None, :] * stats.nbinom.pmf(n - j, j, p), axis=1)

    start = int(J / p + 10 * math.sqrt(J * (1 - p)) / p) + 64
    return MixedErlang(new_rate, _grow(compute, min(start, MAX_SHAPE), eps, q.sum()))


def discrete_os_pmf(m: Discrete, j: int) -> Discrete:
    """Pmf of the minimum (``j = 1``) or maximum (``j = 2``) of two iid copies."""
    _check_os(j, 0)
    p = m.masses
    P = np.cumsum(p)
    if j == 1:
        sf = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])  # Pr(X > j)
        out = 2 * p * sf + p * p
    else:
        out = p * (P + (P - p))
    return Discrete(m.span, out)
