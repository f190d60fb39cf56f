"""Symmetric multivariate Bernoulli vectors driving FGM dependence.

Every scheme exposes ``expected_product(g)``, which evaluates

    E[ prod_k g_k(I_k) ]

for a ``(d, 2, *batch)`` array ``g`` with ``g[k, 0] = g_k(0)`` and
``g[k, 1] = g_k(1)``.  Values may be complex and carry arbitrary trailing
batch dimensions (DFT nodes, moment compositions, ...), so one call covers a
whole transform.  Coordinates are 0-based: coordinate ``k`` is bit ``k`` of a
bitmask index into dense mass tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import special, stats

from .errors import ValidationError

MAX_DENSE_DIM = 20
_MASS_TOL = 1e-12
# cap on elements held by the dense contraction at once
_DENSE_CHUNK = 1 << 23


def _as_g(g, d: int) -> np.ndarray:
    arr = np.asarray(g)
    if arr.ndim < 2 or arr.shape[0] != d or arr.shape[1] != 2:
        raise ValidationError(f"g must have shape (d={d}, 2, ...), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("g values must be finite")
    return arr


def _finish(out):
    out = np.asarray(out)
    if out.ndim == 0:
        return out.item()
    return out


def _bits(index: np.ndarray, d: int) -> np.ndarray:
    return ((np.asarray(index)[..., None] >> np.arange(d)) & 1).astype(np.uint8)


def _check_bits(i, d: int) -> np.ndarray:
    arr = np.asarray(i, dtype=int)
    if arr.shape != (d,):
        raise ValidationError(f"expected a bit-vector of length {d}, got shape {arr.shape}")
    if np.any((arr != 0) & (arr != 1)):
        raise ValidationError("bit-vector entries must be 0 or 1")
    return arr


class BernoulliScheme:
    """Base class; subclasses implement the per-structure kernels."""

    d: int

    def expected_product(self, g):
        raise NotImplementedError

    def pmf(self, i) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        raise NotImplementedError

    def pmf_table(self) -> np.ndarray:
        """Masses over ``{0,1}^d`` indexed by bitmask (requires ``d <= 20``)."""
        _check_dense_dim(self.d)
        return np.array([self.pmf(_bits(m, self.d)) for m in range(1 << self.d)])

    def central_mixed_moment(self, subset: Iterable[int]) -> float:
        """``E[prod_{n in subset} (I_n - 1/2)]`` for a set of 0-based coordinates."""
        idx = sorted(set(int(k) for k in subset))
        if not idx:
            raise ValidationError("subset must be non-empty")
        if idx[0] < 0 or idx[-1] >= self.d:
            raise ValidationError(f"subset indices must lie in [0, {self.d - 1}]")
        if len(idx) == 1:
            return 0.0
        g = np.ones((self.d, 2))
        g[idx, 0] = -0.5
        g[idx, 1] = 0.5
        return float(np.real(self.expected_product(g)))

    def to_dense(self) -> "Dense":
        return Dense(self.pmf_table())


def _check_dense_dim(d: int) -> None:
    if d > MAX_DENSE_DIM:
        raise ValidationError(
            f"dense mass tables are limited to d <= {MAX_DENSE_DIM} (got d={d}); "
            "use a structured scheme (Exchangeable, Markov, ...) instead"
        )


@dataclass(frozen=True, eq=False)
class Dense(BernoulliScheme):
    """Explicit mass table over ``{0,1}^d``, index = sum_k i_k 2^k."""

    masses: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size < 2 or m.size & (m.size - 1):
            raise ValidationError("dense masses must be a 1-D array of length 2^d")
        d = m.size.bit_length() - 1
        _check_dense_dim(d)
        if np.any(m < -_MASS_TOL):
            raise ValidationError("dense masses must be nonnegative")
        m = np.clip(m, 0.0, None)
        if abs(m.sum() - 1.0) > _MASS_TOL:
            raise ValidationError(f"dense masses sum to {m.sum():.15g}, expected 1")
        index = np.arange(m.size)
        for k in range(d):
            p1 = m[(index >> k) & 1 == 1].sum()
            if abs(p1 - 0.5) > _MASS_TOL:
                raise ValidationError(f"margin {k} has Pr(I=1) = {p1:.15g}, expected 1/2")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "d", d)

    def expected_product(self, g):
        g = _as_g(g, self.d)
        batch = g.shape[2:]
        gf = g.reshape(self.d, 2, -1)
        B = gf.shape[2]
        half = self.masses.size // 2
        step = max(1, _DENSE_CHUNK // max(half, 1))
        out = np.empty(B, dtype=np.result_type(gf, float))
        for start in range(0, B, step):
            sl = slice(start, start + step)
            arr = self.masses.reshape(-1, 2)
            arr = arr[:, 0, None] * gf[0, 0, sl] + arr[:, 1, None] * gf[0, 1, sl]
            for k in range(1, self.d):
                arr = arr.reshape(-1, 2, arr.shape[-1])
                arr = arr[:, 0, :] * gf[k, 0, sl] + arr[:, 1, :] * gf[k, 1, sl]
            out[sl] = arr[0]
        return _finish(out.reshape(batch))

    def pmf(self, i) -> float:
        bits = _check_bits(i, self.d)
        return float(self.masses[int(np.sum(bits << np.arange(self.d)))])

    def pmf_table(self) -> np.ndarray:
        return self.masses.copy()

    def to_dense(self) -> "Dense":
        return self

    def sample(self, rng, n=1):
        idx = rng.choice(self.masses.size, size=n, p=self.masses)
        return _bits(idx, self.d)


@dataclass(frozen=True, eq=False)
class Exchangeable(BernoulliScheme):
    """Exchangeable scheme described by the pmf of ``N_d = sum_k I_k``.

    Given ``N_d = n`` the vector is uniform over the ``C(d, n)`` arrangements.
    """

    nd_pmf: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.nd_pmf, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValidationError("nd_pmf must be a 1-D array of length d + 1 >= 2")
        if np.any(p < -_MASS_TOL):
            raise ValidationError("nd_pmf must be nonnegative")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > _MASS_TOL:
            raise ValidationError(f"nd_pmf sums to {p.sum():.15g}, expected 1")
        d = p.size - 1
        mean = float(np.dot(np.arange(d + 1), p))
        if abs(mean - d / 2) > _MASS_TOL * max(d, 1):
            raise ValidationError(f"E[N_d] = {mean:.15g} but symmetric margins need d/2 = {d / 2}")
        p.setflags(write=False)
        object.__setattr__(self, "nd_pmf", p)
        object.__setattr__(self, "d", d)

    def expected_product(self, g):
        # a[n] = e_n(g) / C(k, n) after k coordinates, e_n the elementary
        # symmetric sum of prod g over arrangements with n ones; every update
        # is a convex combination, so |a| stays bounded for |g| <= 1.
        g = _as_g(g, self.d)
        batch = g.shape[2:]
        a = np.zeros((self.d + 1,) + batch, dtype=np.result_type(g, float))
        a[0] = 1.0
        n = np.arange(self.d + 1).reshape((-1,) + (1,) * len(batch))
        for k in range(1, self.d + 1):
            shifted = np.zeros_like(a)
            shifted[1:] = a[:-1]
            a = ((k - n) / k) * a * g[k - 1, 0] + (n / k) * shifted * g[k - 1, 1]
        w = self.nd_pmf.reshape(n.shape)
        return _finish(np.sum(w * a, axis=0))

    def pmf(self, i) -> float:
        n = int(_check_bits(i, self.d).sum())
        return float(self.nd_pmf[n] / math.comb(self.d, n))

    def pmf_table(self) -> np.ndarray:
        _check_dense_dim(self.d)
        counts = np.bitwise_count(np.arange(1 << self.d, dtype=np.uint32)).astype(int)
        binom = special.comb(self.d, np.arange(self.d + 1), exact=False)
        return self.nd_pmf[counts] / binom[counts]

    def sample(self, rng, n=1):
        counts = rng.choice(self.d + 1, size=n, p=self.nd_pmf)
        ranks = np.argsort(np.argsort(rng.random((n, self.d)), axis=1), axis=1)
        return (ranks < counts[:, None]).astype(np.uint8)


class Independent(Exchangeable):
    """Independent symmetric Bernoulli coordinates."""

    def __init__(self, d: int):
        if d < 1:
            raise ValidationError("d must be positive")
        super().__init__(stats.binom.pmf(np.arange(d + 1), d, 0.5))

    def expected_product(self, g):
        g = _as_g(g, self.d)
        return _finish(np.prod((g[:, 0] + g[:, 1]) / 2, axis=0))

    def pmf(self, i) -> float:
        _check_bits(i, self.d)
        return 0.5**self.d

    def sample(self, rng, n=1):
        return rng.integers(0, 2, size=(n, self.d), dtype=np.uint8)

    def __repr__(self):
        return f"Independent(d={self.d})"


class Comonotone(Exchangeable):
    """All coordinates equal: mass 1/2 on all-zeros and on all-ones (EPD)."""

    def __init__(self, d: int):
        if d < 1:
            raise ValidationError("d must be positive")
        p = np.zeros(d + 1)
        p[0] = p[d] = 0.5
        super().__init__(p)

    def expected_product(self, g):
        g = _as_g(g, self.d)
        return _finish((np.prod(g[:, 0], axis=0) + np.prod(g[:, 1], axis=0)) / 2)

    def sample(self, rng, n=1):
        b = rng.integers(0, 2, size=n, dtype=np.uint8)
        return np.repeat(b[:, None], self.d, axis=1)

    def __repr__(self):
        return f"Comonotone(d={self.d})"


def end_nd_pmf(d: int) -> np.ndarray:
    p = np.zeros(d + 1)
    if d % 2 == 0:
        p[d // 2] = 1.0
    else:
        p[(d - 1) // 2] = p[(d + 1) // 2] = 0.5
    return p


class EndExchangeable(Exchangeable):
    """Extreme negative dependence: ``N_d`` as concentrated around d/2 as possible."""

    def __init__(self, d: int):
        if d < 1:
            raise ValidationError("d must be positive")
        super().__init__(end_nd_pmf(d))

    def __repr__(self):
        return f"EndExchangeable(d={self.d})"


@dataclass(frozen=True, eq=False)
class Markov(BernoulliScheme):
    """Stationary symmetric two-state chain with lag-one correlation ``alpha``.

    The chain starts uniform and stays in its state with probability
    ``(1 + alpha) / 2``; the induced FGM parameter of an even subset is
    ``alpha`` raised to its gap sum, odd subsets vanish.
    """

    d: int
    alpha: float

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("d must be positive")
        if not -1.0 <= self.alpha <= 1.0:
            raise ValidationError(f"Markov correlation must lie in [-1, 1], got {self.alpha}")

    @property
    def stay(self) -> float:
        return (1.0 + self.alpha) / 2.0

    def expected_product(self, g):
        g = _as_g(g, self.d)
        s, f = self.stay, 1.0 - self.stay
        v0 = 0.5 * g[0, 0]
        v1 = 0.5 * g[0, 1]
        for k in range(1, self.d):
            v0, v1 = (s * v0 + f * v1) * g[k, 0], (f * v0 + s * v1) * g[k, 1]
        return _finish(v0 + v1)

    def pmf(self, i) -> float:
        bits = _check_bits(i, self.d)
        changes = int(np.sum(bits[1:] != bits[:-1]))
        return 0.5 * (1 - self.stay) ** changes * self.stay ** (self.d - 1 - changes)

    def pmf_table(self) -> np.ndarray:
        _check_dense_dim(self.d)
        masks = np.arange(1 << self.d, dtype=np.uint32)
        lowmask = np.uint32((1 << (self.d - 1)) - 1)
        changes = np.bitwise_count((masks ^ (masks >> 1)) & lowmask).astype(int)
        return 0.5 * (1 - self.stay) ** changes * self.stay ** (self.d - 1 - changes)

    def sample(self, rng, n=1):
        first = rng.integers(0, 2, size=(n, 1), dtype=np.uint8)
        flips = (rng.random((n, self.d - 1)) >= self.stay).astype(np.uint8)
        parity = np.cumsum(flips, axis=1) & 1
        return np.concatenate([first, first ^ parity.astype(np.uint8)], axis=1)


def expected_product(scheme: BernoulliScheme, g):
    return scheme.expected_product(g)


def pmf(scheme: BernoulliScheme, i: Sequence[int]) -> float:
    return scheme.pmf(i)


def central_mixed_moment(scheme: BernoulliScheme, subset: Iterable[int]) -> float:
    return scheme.central_mixed_moment(subset)


def sample(scheme: BernoulliScheme, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    return scheme.sample(rng, n)
