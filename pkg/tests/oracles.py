"""Independent reference computations shared by the tests."""

import itertools

import numpy as np

from fgmrisk.copula import FgmCopula, mask_of


def brute_expected_product(scheme, g):
    """Sum over all 2^d states of pmf(i) * prod_k g_k(i_k)."""
    d = scheme.d
    total = 0.0
    for bits in itertools.product((0, 1), repeat=d):
        term = scheme.pmf(bits)
        for k, b in enumerate(bits):
            term = term * g[k][b]
        total = total + term
    return total


def random_copula(rng, d, budget=0.9, max_order=None):
    """Random theta map with sum |theta| = budget < 1, hence admissible."""
    max_order = d if max_order is None else max_order
    subsets = [s for k in range(2, max_order + 1) for s in itertools.combinations(range(d), k)]
    raw = rng.uniform(-1, 1, size=len(subsets))
    raw *= budget / np.abs(raw).sum()
    return FgmCopula(d, {mask_of(s): v for s, v in zip(subsets, raw)})


def random_symmetric_masses(rng, d):
    """Dense masses symmetric under complementing every bit (margins exactly 1/2)."""
    p = rng.dirichlet(np.ones(1 << d))
    return (p + p[::-1]) / 2


def rectangle_prob(cdf, lower, upper):
    """Pr(lower < U <= upper) by inclusion-exclusion over the 2^d corners."""
    d = len(lower)
    total = 0.0
    for corner in itertools.product((0, 1), repeat=d):
        u = np.where(np.array(corner) == 1, upper, lower)
        sign = (-1) ** (d - sum(corner))
        total += sign * cdf(u)
    return total
