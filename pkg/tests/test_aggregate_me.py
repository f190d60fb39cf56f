import numpy as np
import pytest
from scipy import stats

from fgmrisk.aggregate_me import AggregateME, aggregate, exp_iid_fast
from fgmrisk.bernoulli import Comonotone, EndExchangeable, Exchangeable, Independent, Markov
from fgmrisk.copula import FgmCopula
from fgmrisk.errors import ValidationError
from fgmrisk.marginals import Exponential, MixedErlang
from fgmrisk.moments import aggregate_moment
from fgmrisk.portfolio import Portfolio
from fgmrisk.tables import six_risk_marginals


def _lst(agg, t):
    # E[exp(-t S)] for a mixed Erlang law
    return float(np.sum(agg.weights * (agg.rate / (agg.rate + t)) ** agg.shapes))


def test_independent_pair_of_exponentials():
    beta = 0.7
    agg = aggregate(Portfolio([Exponential(beta)] * 2, Independent(2)))
    assert isinstance(agg, AggregateME)
    assert agg.rate == pytest.approx(2 * beta)
    assert agg.mean == pytest.approx(2 / beta, rel=1e-10)
    x = np.linspace(0, 15, 31)
    assert np.allclose(agg.cdf(x), stats.gamma.cdf(x, 2, scale=1 / beta), atol=1e-10)


@pytest.mark.parametrize("d", [2, 5, 9])
def test_epd_transform_matches_closed_form(d):
    beta = 0.4
    agg = aggregate(Portfolio([Exponential(beta)] * d, Comonotone(d)))
    for t in np.linspace(0.05, 3.0, 10):
        a = 2 * beta / (2 * beta + t)
        b = beta / (beta + t)
        want = a**d * (0.5 + 0.5 * b**d)
        assert _lst(agg, t) == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 6, 7])
def test_end_transform_matches_closed_form(d):
    beta = 1.1
    agg = aggregate(Portfolio([Exponential(beta)] * d, EndExchangeable(d)))
    for t in np.linspace(0.05, 3.0, 10):
        a = 2 * beta / (2 * beta + t)
        b = beta / (beta + t)
        if d % 2 == 0:
            want = a**d * b ** (d / 2)
        else:
            want = a**d * (0.5 * b ** ((d - 1) / 2) + 0.5 * b ** ((d + 1) / 2))
        assert _lst(agg, t) == pytest.approx(want, abs=1e-10)


def test_six_risk_independent_variance():
    agg = aggregate(Portfolio(six_risk_marginals(), Independent(6)))
    assert agg.mean == pytest.approx(80.0, rel=1e-8)
    assert agg.variance == pytest.approx(564.0, rel=1e-8)
    assert agg.weights.sum() >= 1 - 1e-12
    assert agg.provenance["dft_length"] >= agg.weights.size


def test_risk_measure_examples():
    one = aggregate(Portfolio([Exponential(0.1)], Independent(1)))
    assert one.var_risk(0.9) == pytest.approx(23.03, abs=0.005)
    assert one.tvar(0.9) == pytest.approx(33.03, abs=0.005)
    two = aggregate(Portfolio([Exponential(0.1)] * 2, Comonotone(2)))
    assert two.var_risk(0.9) / 2 == pytest.approx(20.90, abs=0.005)
    assert two.tvar(0.9) / 2 == pytest.approx(27.37, abs=0.005)
    assert two.tvar(1e-10) == pytest.approx(two.mean, rel=1e-8)
    for kappa in (0.1, 0.5, 0.95):
        assert two.tvar(kappa) >= two.var_risk(kappa)
    with pytest.raises(ValidationError):
        two.var_risk(1.0)


def test_exp_iid_fast_degenerate_count():
    d, beta = 4, 0.5
    nd = np.zeros(d + 1)
    nd[0] = 1.0
    agg = exp_iid_fast(d, beta, nd)
    x = np.linspace(0, 20, 21)
    assert np.allclose(agg.cdf(x), stats.gamma.cdf(x, d, scale=1 / (2 * beta)), atol=1e-12)


@pytest.mark.parametrize("d", [2, 10, 100])
@pytest.mark.parametrize("cls", [EndExchangeable, Independent, Comonotone])
def test_dual_path_equality(d, cls):
    if d == 100 and cls is not Comonotone:
        pytest.skip("covered by the acceptance suite")
    beta = 0.1
    scheme = cls(d)
    slow = aggregate(Portfolio([Exponential(beta)] * d, scheme))
    fast = exp_iid_fast(d, beta, scheme)
    x = np.linspace(0, 40 * d, 300)
    assert np.max(np.abs(slow.cdf(x) - fast.cdf(x))) <= 1e-9


def test_end_thousand_fast_path():
    agg = exp_iid_fast(1000, 0.1, EndExchangeable(1000))
    assert agg.var_risk(0.9) / 1000 == pytest.approx(10.35, abs=0.005)


def test_moments_agree_with_moment_engine(rng):
    ms = [MixedErlang(1.0, [0.3, 0.2, 0.5]), Exponential(0.5), MixedErlang(2.0, [0.1, 0.0, 0.0, 0.9])]
    nd = rng.dirichlet(np.ones(4))
    nd = (nd + nd[::-1]) / 2
    for dep in (Independent(3), Comonotone(3), EndExchangeable(3), Markov(3, -0.4), Exchangeable(nd),
                FgmCopula.from_subsets(3, {(0, 1): 0.3, (0, 1, 2): -0.5})):
        p = Portfolio(ms, dep)
        agg = aggregate(p)
        for m in (1, 2, 3):
            assert agg.moment(m) == pytest.approx(aggregate_moment(p, m), rel=1e-8)


@pytest.mark.parametrize("d", [2, 10])
def test_convex_order_of_tvar(d):
    kappas = (0.5, 0.9, 0.99, 0.999)
    tv = {cls: [exp_iid_fast(d, 0.1, cls(d)).tvar(k) for k in kappas] for cls in (EndExchangeable, Independent, Comonotone)}
    for i in range(len(kappas)):
        assert tv[EndExchangeable][i] < tv[Independent][i] - 1e-9
        assert tv[Independent][i] < tv[Comonotone][i] - 1e-9


def test_heterogeneous_rates_are_unified():
    p = Portfolio([Exponential(0.5), Exponential(2.0)], Independent(2))
    agg = aggregate(p)
    assert agg.rate == pytest.approx(4.0)
    x = np.linspace(0.01, 12, 25)
    # hypoexponential cdf for distinct rates
    a, b = 0.5, 2.0
    want = 1 - (b * np.exp(-a * x) - a * np.exp(-b * x)) / (b - a)
    assert np.allclose(agg.cdf(x), want, atol=1e-10)


def test_rejects_non_mixed_erlang():
    from fgmrisk.marginals import Weibull

    with pytest.raises(ValidationError):
        aggregate(Portfolio([Weibull(1.0, 2.0)] * 2, Independent(2)))
