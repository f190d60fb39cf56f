"""Portfolio configuration files (JSON, strict schema).

Risk indices in config files are 1-based, e.g. ``"1,3": 0.2`` sets the
parameter on the first and third risks.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt
from pydantic import ValidationError as PydanticValidationError

from . import bernoulli, marginals
from .copula import FgmCopula
from .errors import ValidationError
from .portfolio import Portfolio

CONFIG_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ExponentialCfg(_Strict):
    type: Literal["exponential"]
    rate: PositiveFloat


class ShapeDistCfg(_Strict):
    """Count law ``K`` whose shift ``1 + K`` gives the Erlang shapes."""

    family: Literal["dirac", "geometric", "poisson", "negbin"]
    k: Optional[int] = None
    p: Optional[float] = None
    mu: Optional[float] = None
    n: Optional[float] = None

    def params(self) -> dict:
        return {key: v for key, v in self.model_dump(exclude={"family"}).items() if v is not None}


class MixedErlangCfg(_Strict):
    type: Literal["mixed_erlang"]
    rate: PositiveFloat
    weights: Optional[list[float]] = None
    shape_dist: Optional[ShapeDistCfg] = None


class ParetoIVCfg(_Strict):
    type: Literal["pareto_iv"]
    mu: float = 0.0
    sigma: PositiveFloat
    gamma: PositiveFloat
    alpha: PositiveFloat


class WeibullCfg(_Strict):
    type: Literal["weibull"]
    rate: PositiveFloat
    shape: PositiveFloat


class LogNormalCfg(_Strict):
    type: Literal["lognormal"]
    mu: Optional[float] = None
    sigma: Optional[PositiveFloat] = None
    mean: Optional[PositiveFloat] = None
    variance: Optional[PositiveFloat] = None


class DiscreteCfg(_Strict):
    type: Literal["discrete"]
    span: PositiveFloat
    masses: list[float]


MarginalCfg = Annotated[
    Union[ExponentialCfg, MixedErlangCfg, ParetoIVCfg, WeibullCfg, LogNormalCfg, DiscreteCfg],
    Field(discriminator="type"),
]


class IndependentCfg(_Strict):
    type: Literal["independent"]


class ThetasCfg(_Strict):
    type: Literal["thetas"]
    thetas: dict[str, float]


class ExchangeableCfg(_Strict):
    type: Literal["exchangeable"]
    nd_pmf: list[float]


class EpdCfg(_Strict):
    type: Literal["epd"]


class EndCfg(_Strict):
    type: Literal["end"]


class MarkovCfg(_Strict):
    type: Literal["markov"]
    alpha: float = Field(ge=-1.0, le=1.0)


DependenceCfg = Annotated[
    Union[IndependentCfg, ThetasCfg, ExchangeableCfg, EpdCfg, EndCfg, MarkovCfg],
    Field(discriminator="type"),
]


class OptionsCfg(_Strict):
    trunc_eps: PositiveFloat = marginals.TRUNC_EPS
    dft_cap: PositiveInt = 1 << 24
    bisection_rtol: PositiveFloat = 1e-12
    seed: int = 0


class PortfolioConfig(_Strict):
    version: Literal[1]
    marginals: list[MarginalCfg] = Field(min_length=1)
    dependence: DependenceCfg
    options: OptionsCfg = OptionsCfg()


def parse(text: str) -> PortfolioConfig:
    """Validate a JSON document; errors carry the offending schema path."""
    try:
        return PortfolioConfig.model_validate_json(text)
    except PydanticValidationError as exc:
        lines = []
        for err in exc.errors():
            path = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{path}: {err['msg']}")
        raise ValidationError("invalid config:\n  " + "\n  ".join(lines)) from None


def load(path: str | Path) -> PortfolioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    return parse(text)


def dump(cfg: PortfolioConfig) -> str:
    return json.dumps(cfg.model_dump(mode="json", exclude_none=True), indent=2)


def build_marginal(cfg) -> marginals.Marginal:
    if cfg.type == "exponential":
        return marginals.Exponential(cfg.rate)
    if cfg.type == "mixed_erlang":
        if (cfg.weights is None) == (cfg.shape_dist is None):
            raise ValidationError("mixed_erlang needs exactly one of 'weights' or 'shape_dist'")
        if cfg.weights is not None:
            return marginals.MixedErlang(cfg.rate, cfg.weights)
        return marginals.MixedErlang.from_counts(cfg.rate, cfg.shape_dist.family, **cfg.shape_dist.params())
    if cfg.type == "pareto_iv":
        return marginals.ParetoIV(cfg.mu, cfg.sigma, cfg.gamma, cfg.alpha)
    if cfg.type == "weibull":
        return marginals.Weibull(cfg.rate, cfg.shape)
    if cfg.type == "lognormal":
        if cfg.mu is not None and cfg.sigma is not None and cfg.mean is None and cfg.variance is None:
            return marginals.LogNormal(cfg.mu, cfg.sigma)
        if cfg.mean is not None and cfg.variance is not None and cfg.mu is None and cfg.sigma is None:
            return marginals.LogNormal.from_mean_var(cfg.mean, cfg.variance)
        raise ValidationError("lognormal needs either (mu, sigma) or (mean, variance)")
    return marginals.Discrete(cfg.span, cfg.masses)


def _subset(key: str, d: int) -> tuple[int, ...]:
    try:
        idx = tuple(int(tok) - 1 for tok in key.split(","))
    except ValueError:
        raise ValidationError(f"dependence.thetas: bad subset key {key!r}; use e.g. \"1,2\"") from None
    if any(not 0 <= k < d for k in idx):
        raise ValidationError(f"dependence.thetas: subset {key!r} outside 1..{d}")
    return idx


def build_dependence(cfg, d: int):
    kind = cfg.type
    if kind == "independent":
        return bernoulli.Independent(d)
    if kind == "thetas":
        return FgmCopula.from_subsets(d, {_subset(k, d): v for k, v in cfg.thetas.items()})
    if kind == "exchangeable":
        if len(cfg.nd_pmf) != d + 1:
            raise ValidationError(f"dependence.nd_pmf: expected {d + 1} entries, got {len(cfg.nd_pmf)}")
        return bernoulli.Exchangeable(cfg.nd_pmf)
    if kind == "epd":
        return bernoulli.Comonotone(d)
    if kind == "end":
        return bernoulli.EndExchangeable(d)
    return bernoulli.Markov(d, cfg.alpha)


def to_portfolio(cfg: PortfolioConfig) -> Portfolio:
    ms = tuple(build_marginal(m) for m in cfg.marginals)
    return Portfolio(ms, build_dependence(cfg.dependence, len(ms)))
