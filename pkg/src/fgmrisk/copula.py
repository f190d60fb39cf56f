"""FGM copulas in natural (theta) form and the bridge to Bernoulli schemes.

Parameters are stored sparsely, keyed by the bitmask of their coordinate
subset (coordinate ``k`` is bit ``k``; absent keys mean zero).  The bridge
uses the Walsh expansion: with ``H`` the Sylvester-Hadamard matrix,

    theta = H @ masses        masses = H @ t / 2^d

where ``t[0] = 1`` and ``t[A] = theta_A``.  Both directions run as a fast
Walsh-Hadamard transform in ``O(d 2^d)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import special

from . import bernoulli
from .bernoulli import BernoulliScheme, Dense, Exchangeable, MAX_DENSE_DIM
from .errors import InadmissibleCopulaError, ValidationError

ADMISSIBLE_TOL = 1e-12
MAX_SUBSETS = 1 << 20


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform of a length-2^d vector."""
    a = np.array(values, dtype=float)
    h = 1
    while h < a.size:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1).reshape(-1)
        h *= 2
    return a


def mask_of(subset: Iterable[int]) -> int:
    m = 0
    for k in subset:
        m |= 1 << int(k)
    return m


def subset_of(mask: int) -> tuple[int, ...]:
    return tuple(k for k in range(mask.bit_length()) if mask >> k & 1)


@dataclass(frozen=True, eq=False)
class FgmCopula:
    """Natural FGM parameters ``theta_A`` for subsets ``|A| >= 2``.

    ``theta`` maps subset bitmasks to values.  Use :meth:`from_subsets` to
    build from tuples of 0-based indices.
    """

    d: int
    theta: Mapping[int, float] = field(default_factory=dict)
    admissible: bool | None = None

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("copula dimension must be positive")
        clean = {}
        for mask, value in self.theta.items():
            mask = int(mask)
            if mask <= 0 or mask >> self.d:
                raise ValidationError(f"subset {subset_of(mask)} is outside 0..{self.d - 1}")
            if bin(mask).count("1") < 2:
                raise ValidationError(f"subset {subset_of(mask)} must contain at least 2 indices")
            value = float(value)
            if not math.isfinite(value):
                raise ValidationError("theta values must be finite")
            if value != 0.0:
                clean[mask] = value
        object.__setattr__(self, "theta", clean)

    @classmethod
    def from_subsets(cls, d: int, thetas: Mapping[tuple[int, ...], float]) -> "FgmCopula":
        out = {}
        for subset, value in thetas.items():
            if len(set(subset)) != len(subset):
                raise ValidationError(f"repeated index in subset {subset}")
            out[mask_of(subset)] = value
        return cls(d, out)

    def get(self, subset: Iterable[int]) -> float:
        return self.theta.get(mask_of(subset), 0.0)

    def items(self):
        """``(subset tuple, value)`` pairs sorted by subset size then indices."""
        keyed = sorted(self.theta.items(), key=lambda kv: (bin(kv[0]).count("1"), subset_of(kv[0])))
        return [(subset_of(m), v) for m, v in keyed]

    def walsh_masses(self) -> np.ndarray:
        """Candidate Bernoulli masses; all nonnegative iff the copula is admissible."""
        bernoulli._check_dense_dim(self.d)
        t = np.zeros(1 << self.d)
        t[0] = 1.0
        for mask, value in self.theta.items():
            t[mask] = value
        return fwht(t) / (1 << self.d)

    def check_admissible(self) -> "FgmCopula":
        """Return a copy flagged admissible, or raise with the violating sign vector."""
        masses = self.walsh_masses()
        worst = int(np.argmin(masses))
        if masses[worst] < -ADMISSIBLE_TOL:
            # bit i_j = 1 corresponds to eps_j = -1
            eps = tuple(1 - 2 * int(b) for b in bernoulli._bits(worst, self.d))
            raise InadmissibleCopulaError(eps, masses[worst] * (1 << self.d))
        return FgmCopula(self.d, self.theta, admissible=True)

    def cdf(self, u) -> np.ndarray | float:
        """Natural-form copula ``prod u * (1 + sum theta_A prod_{j in A} (1 - u_j))``."""
        u = _check_u(u, self.d)
        ubar = 1.0 - u
        total = np.ones(u.shape[:-1])
        for mask, value in self.theta.items():
            total = total + value * np.prod(ubar[..., list(subset_of(mask))], axis=-1)
        out = np.prod(u, axis=-1) * total
        return out.item() if np.ndim(out) == 0 else out


def _check_u(u, d: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1:] != (d,):
        raise ValidationError(f"u must have trailing dimension {d}, got shape {u.shape}")
    if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
        raise ValidationError("u must lie in [0, 1]^d")
    return u


def theta_from_scheme(scheme: BernoulliScheme, max_order: int | None = None) -> FgmCopula:
    """FGM parameters induced by a Bernoulli scheme: ``(-2)^|A| E[prod (I_n - 1/2)]``."""
    d = scheme.d
    if d < 2:
        raise ValidationError("theta_from_scheme needs d >= 2")
    order = d if max_order is None else min(int(max_order), d)
    if d <= MAX_DENSE_DIM:
        theta_all = fwht(scheme.pmf_table())
        theta = {}
        for mask in range(1, 1 << d):
            size = bin(mask).count("1")
            if 2 <= size <= order and abs(theta_all[mask]) > 1e-15:
                theta[mask] = theta_all[mask]
        return FgmCopula(d, theta, admissible=True)
    count = sum(math.comb(d, k) for k in range(2, order + 1))
    if count > MAX_SUBSETS:
        raise ValidationError(
            f"{count} subsets up to order {order} exceed the cap of {MAX_SUBSETS}; lower max_order"
        )
    theta = {}
    if isinstance(scheme, Exchangeable):
        for k in range(2, order + 1):
            value = (-2) ** k * scheme.central_mixed_moment(range(k))
            if abs(value) > 1e-15:
                for subset in itertools.combinations(range(d), k):
                    theta[mask_of(subset)] = value
    else:
        for k in range(2, order + 1):
            for subset in itertools.combinations(range(d), k):
                value = (-2) ** k * scheme.central_mixed_moment(subset)
                if abs(value) > 1e-15:
                    theta[mask_of(subset)] = value
    return FgmCopula(d, theta, admissible=True)


def scheme_from_theta(copula: FgmCopula) -> Dense:
    """Dense Bernoulli scheme reproducing ``copula``; raises if inadmissible."""
    copula.check_admissible()
    masses = np.clip(copula.walsh_masses(), 0.0, None)
    return Dense(masses / masses.sum())


def copula_cdf(dependence: FgmCopula | BernoulliScheme, u):
    """Copula value from either representation.

    For a scheme this evaluates ``E_I[prod_k F_{U[I_k + 1]}(u_k)]`` with
    ``F_{U[1]}(u) = 1 - (1 - u)^2`` and ``F_{U[2]}(u) = u^2``.
    """
    if isinstance(dependence, FgmCopula):
        return dependence.cdf(u)
    u = _check_u(u, dependence.d)
    g = np.stack([1.0 - (1.0 - u) ** 2, u**2], axis=-1)  # (..., d, 2)
    g = np.moveaxis(g, (-2, -1), (0, 1))
    out = dependence.expected_product(g)
    return float(np.real(out)) if np.ndim(out) == 0 else np.real(out)


def end_thetas(d: int) -> dict[int, float]:
    """``theta_k`` (by subset size k = 2..d) of the exchangeable END copula.

    Evaluated through log-gamma with explicit signs, since the gamma factors
    sit at negative half-integers where direct evaluation overflows.
    """
    if d < 2:
        raise ValidationError("end_thetas needs d >= 2")
    D = (d + 1) // 2
    out = {}
    for k in range(2, d + 1):
        if k % 2:
            out[k] = 0.0
            continue
        a = 0.5 - D
        b = (k + 1) / 2 - D
        log_mag = (
            special.gammaln(k + 1)
            + special.gammaln(a)
            - k * math.log(2)
            - special.gammaln(k / 2 + 1)
            - special.gammaln(b)
        )
        sign = special.gammasgn(a) * special.gammasgn(b)
        out[k] = float(sign * math.exp(log_mag))
    return out


def exchangeable_copula(d: int, thetas_by_size: Mapping[int, float]) -> FgmCopula:
    theta = {}
    for k, value in thetas_by_size.items():
        if value:
            for subset in itertools.combinations(range(d), k):
                theta[mask_of(subset)] = value
    return FgmCopula(d, theta)
