"""Portfolio: marginals plus one FGM dependence structure."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .bernoulli import BernoulliScheme
from .copula import FgmCopula, scheme_from_theta, theta_from_scheme
from .errors import ValidationError
from .marginals import Marginal


@dataclass(frozen=True, eq=False)
class Portfolio:
    """``d`` marginals joined by either a Bernoulli scheme or natural FGM parameters."""

    marginals: tuple[Marginal, ...]
    dependence: BernoulliScheme | FgmCopula

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if not self.marginals:
            raise ValidationError("a portfolio needs at least one marginal")
        if self.dependence.d != len(self.marginals):
            raise ValidationError(
                f"dependence has dimension {self.dependence.d} but there are {len(self.marginals)} marginals"
            )

    @classmethod
    def of(cls, marginals: Sequence[Marginal], dependence) -> "Portfolio":
        return cls(tuple(marginals), dependence)

    @property
    def d(self) -> int:
        return len(self.marginals)

    @cached_property
    def scheme(self) -> BernoulliScheme:
        if isinstance(self.dependence, FgmCopula):
            return scheme_from_theta(self.dependence)
        return self.dependence

    @cached_property
    def copula(self) -> FgmCopula:
        if isinstance(self.dependence, FgmCopula):
            return self.dependence.check_admissible()
        if self.d < 2:
            return FgmCopula(self.d, {}, admissible=True)
        return theta_from_scheme(self.dependence)

    def with_dependence(self, dependence) -> "Portfolio":
        return Portfolio(self.marginals, dependence)
