"""Risk aggregation and allocation for portfolios with FGM copula dependence."""

from .aggregate_me import AggregateME, aggregate, exp_iid_fast
from .allocation import AllocationResult, cmrs, expected_allocation_density, tvar_allocation
from .bernoulli import (
    BernoulliScheme,
    Comonotone,
    Dense,
    EndExchangeable,
    Exchangeable,
    Independent,
    Markov,
)
from .copula import FgmCopula, copula_cdf, scheme_from_theta, theta_from_scheme
from .discrete_agg import DiscretizationSpec, aggregate_pmf, discretize, risk_measures, tvar_sandwich
from .errors import FGMError, InadmissibleCopulaError, NumericalError, TruncationError, ValidationError
from .marginals import Discrete, Exponential, LogNormal, MixedErlang, ParetoIV, Weibull
from .mc_oracle import SampleBatch, estimate, sample_portfolio
from .moments import aggregate_moment, covariance
from .portfolio import Portfolio

__version__ = "0.1.0"
