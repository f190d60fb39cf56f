import itertools

import numpy as np
import pytest

from fgmrisk.bernoulli import (
    Comonotone,
    Dense,
    EndExchangeable,
    Exchangeable,
    Independent,
    Markov,
    central_mixed_moment,
    expected_product,
    pmf,
)
from fgmrisk.copula import end_thetas
from fgmrisk.errors import ValidationError

from oracles import brute_expected_product, random_symmetric_masses


def _schemes(rng, d):
    nd = rng.dirichlet(np.ones(d + 1))
    nd = (nd + nd[::-1]) / 2  # symmetric N_d pmf has mean d/2
    return [
        Independent(d),
        Comonotone(d),
        EndExchangeable(d),
        Exchangeable(nd),
        Markov(d, float(rng.uniform(-1, 1))),
        Dense(random_symmetric_masses(rng, d)),
    ]


def test_independent_factorizes(rng):
    g = rng.normal(size=(4, 2))
    assert expected_product(Independent(4), g) == pytest.approx(np.prod(g.sum(axis=1) / 2), rel=1e-14)


def test_comonotone_two_atoms(rng):
    g = rng.normal(size=(5, 2))
    want = (np.prod(g[:, 0]) + np.prod(g[:, 1])) / 2
    assert expected_product(Comonotone(5), g) == pytest.approx(want, rel=1e-14)


def test_markov_two_state_example():
    assert expected_product(Markov(2, 0.5), [[1, 2], [1, 2]]) == pytest.approx(2.375, abs=1e-15)
    table = Markov(2, 0.5).pmf_table()
    assert np.allclose(table, [0.375, 0.125, 0.125, 0.375])


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 10])
def test_kernel_matches_enumeration(rng, d):
    g = rng.normal(size=(d, 2)) + 1j * rng.normal(size=(d, 2))
    for scheme in _schemes(rng, d):
        want = brute_expected_product(scheme, g)
        got = scheme.expected_product(g)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want)), scheme


def test_kernel_batched_matches_loop(rng):
    d = 6
    g = rng.normal(size=(d, 2, 7, 3))
    for scheme in _schemes(rng, d):
        out = scheme.expected_product(g)
        assert out.shape == (7, 3)
        assert out[4, 1] == pytest.approx(scheme.expected_product(g[:, :, 4, 1]), rel=1e-12)


def test_exchangeable_zero_g0_entries(rng):
    g = rng.normal(size=(5, 2))
    g[1, 0] = 0.0
    g[3, 0] = 0.0
    scheme = EndExchangeable(5)
    assert scheme.expected_product(g) == pytest.approx(brute_expected_product(scheme, g), rel=1e-12)


@pytest.mark.parametrize("cls", [Comonotone, EndExchangeable, Independent])
def test_permutation_invariance(rng, cls):
    g = rng.normal(size=(7, 2))
    scheme = cls(7)
    base = scheme.expected_product(g)
    for _ in range(5):
        perm = rng.permutation(7)
        assert scheme.expected_product(g[perm]) == pytest.approx(base, rel=1e-12)


@pytest.mark.parametrize("d", [2, 3, 6, 9])
def test_pmf_sums_to_one_and_margins_symmetric(rng, d):
    for scheme in _schemes(rng, d):
        table = scheme.pmf_table()
        assert table.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(table >= 0)
        idx = np.arange(table.size)
        for k in range(d):
            assert table[(idx >> k) & 1 == 1].sum() == pytest.approx(0.5, abs=1e-12)


def test_pmf_examples():
    assert pmf(Independent(3), [0, 1, 1]) == pytest.approx(1 / 8)
    assert pmf(Comonotone(4), [1, 1, 1, 1]) == 0.5
    assert pmf(Comonotone(4), [1, 0, 0, 0]) == 0.0
    assert pmf(EndExchangeable(3), [1, 0, 0]) == pytest.approx(1 / 6)


def test_central_mixed_moment_examples():
    assert central_mixed_moment(Independent(4), [0, 2]) == 0.0
    assert central_mixed_moment(Comonotone(4), [0, 1]) == pytest.approx(0.25)
    assert central_mixed_moment(Comonotone(4), [0, 1, 3]) == pytest.approx(0.0, abs=1e-16)
    assert central_mixed_moment(Markov(3, 0.4), [1, 2]) == pytest.approx(0.1)
    assert central_mixed_moment(Markov(3, 0.4), [1]) == 0.0
    with pytest.raises(ValidationError):
        central_mixed_moment(Markov(3, 0.4), [])


@pytest.mark.parametrize("d", [*range(2, 9), 12, 25, 60])
def test_comonotone_and_end_reproduce_closed_form_thetas(d):
    epd, end = Comonotone(d), EndExchangeable(d)
    want = end_thetas(d)
    for k in range(2, d + 1):
        subset = range(k)
        assert (-2) ** k * epd.central_mixed_moment(subset) == pytest.approx((1 + (-1) ** k) / 2, abs=1e-12)
        assert (-2) ** k * end.central_mixed_moment(subset) == pytest.approx(want[k], abs=1e-10)


def test_markov_gap_sum_thetas():
    alpha = -0.7
    scheme = Markov(6, alpha)
    for subset in itertools.combinations(range(6), 4):
        gaps = (subset[1] - subset[0]) + (subset[3] - subset[2])
        assert 16 * scheme.central_mixed_moment(subset) == pytest.approx(alpha**gaps, abs=1e-12)


def test_sampling_frequencies():
    n = 100_000
    draws = Independent(3).sample(np.random.default_rng(1), n)
    assert np.all(np.abs(draws.mean(axis=0) - 0.5) < 0.005)
    draws = Comonotone(5).sample(np.random.default_rng(2), 1000)
    assert set(draws.sum(axis=1)) <= {0, 5}
    draws = Markov(2, 0.5).sample(np.random.default_rng(3), n)
    assert abs(np.mean(draws[:, 0] == draws[:, 1]) - 0.75) < 0.005


def test_sampling_matches_pmf(rng):
    n = 200_000
    for scheme in _schemes(rng, 3):
        draws = scheme.sample(np.random.default_rng(7), n)
        idx = draws @ (1 << np.arange(3))
        freq = np.bincount(idx, minlength=8) / n
        table = scheme.pmf_table()
        assert np.all(np.abs(freq - table) < 4 * np.sqrt(table * (1 - table) / n) + 1e-12), scheme


def test_sampling_is_reproducible():
    a = Markov(4, 0.3).sample(np.random.default_rng(11), 50)
    b = Markov(4, 0.3).sample(np.random.default_rng(11), 50)
    assert np.array_equal(a, b)


def test_validation_errors():
    with pytest.raises(ValidationError):
        Independent(3).expected_product(np.ones((2, 2)))
    with pytest.raises(ValidationError):
        Dense(np.full(1 << 21, 1 / (1 << 21)))
    with pytest.raises(ValidationError):
        Dense([0.5, 0.5, 0.0, 0.0])  # margin of coordinate 1 is degenerate
    with pytest.raises(ValidationError):
        Exchangeable([0.5, 0.0, 0.0, 0.5 - 0.1, 0.1])  # mean differs from d/2
    with pytest.raises(ValidationError):
        Markov(3, 1.5)
    with pytest.raises(ValidationError):
        pmf(Independent(2), [0, 2])


def test_structured_schemes_scale_beyond_dense_cap(rng):
    g = np.tile([[0.9, 1.1]], (500, 1))
    assert Independent(500).expected_product(g) == pytest.approx(1.0)
    assert np.isfinite(EndExchangeable(500).expected_product(g))
    assert np.isfinite(Markov(500, 0.2).expected_product(g))
