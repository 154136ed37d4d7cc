"""Parameterized distribution families.

Each family validates its parameters, evaluates its mass (discrete) or
density (continuous), draws seeded samples and, when the support is finite,
enumerates it with exact rational probabilities.

Discrete samplers compare raw 53-bit integers against rational parameters, so
``Flip[1/3]`` is sampled exactly, not through a float approximation of 1/3.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .kernels import Rng
from .values import NUMERIC_TAGS, Value, format_value, is_rational, value_tag

__all__ = [
    "Distribution", "Flip", "Binomial", "Poisson", "Gaussian", "ShiftedDirac",
    "FAMILIES", "lookup", "validate_params", "eval_mass", "sample", "support",
    "DistributionError", "ParameterOutOfRange", "InfiniteSupport",
    "IrrationalParameter", "UnknownDistribution", "Rng",
    "FINITE", "COUNTABLE", "CONTINUOUS",
]

FINITE = "finite-discrete"
COUNTABLE = "countable-discrete"
CONTINUOUS = "continuous"

_TWO53 = 1 << 53
_ANY_NUMBER = NUMERIC_TAGS
_INTEGER = frozenset({"int"})


class DistributionError(Exception):
    pass


class UnknownDistribution(DistributionError):
    pass


class ParameterOutOfRange(DistributionError):
    def __init__(self, family: str, component: int, value, reason: str):
        self.family = family
        self.component = component
        self.value = value
        super().__init__(
            f"{family}: parameter {component} = {_show(value)} {reason}")


class InfiniteSupport(DistributionError):
    pass


class IrrationalParameter(DistributionError):
    """Exact evaluation was requested with a binary64 parameter."""


def _show(v):
    try:
        return format_value(v)
    except TypeError:
        return repr(v)


class Distribution:
    """A named parameterized family.

    ``param_tags[i]`` is the set of value domains accepted for parameter
    ``i``; the parameter space is the product of the per-component ranges
    checked in :meth:`_check_component`.
    """

    name: str = ""
    param_tags: tuple = ()
    support_kind: str = FINITE
    outcome_tag: str = "int"

    @property
    def pardim(self) -> int:
        return len(self.param_tags)

    @property
    def is_finite(self) -> bool:
        return self.support_kind == FINITE

    def validate(self, params: tuple) -> None:
        if len(params) != self.pardim:
            raise ParameterOutOfRange(
                self.name, len(params), None,
                f"expected {self.pardim} parameter(s), got {len(params)}")
        for i, (p, tags) in enumerate(zip(params, self.param_tags)):
            try:
                tag = value_tag(p)
            except TypeError:
                raise ParameterOutOfRange(self.name, i, p, "is not a value") from None
            if tag not in tags:
                raise ParameterOutOfRange(self.name, i, p, f"has domain {tag}")
            if tag == "real" and math.isinf(p):
                raise ParameterOutOfRange(self.name, i, p, "is not finite")
            self._check_component(i, p)

    def _check_component(self, i: int, p) -> None:
        pass

    def mass(self, params: tuple, outcome: Value):
        raise NotImplementedError

    def sample(self, params: tuple, rng: Rng) -> Value:
        raise NotImplementedError

    def support(self, params: tuple) -> list:
        raise InfiniteSupport(f"{self.name} has no finite support")

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _bernoulli(p, rng) -> int:
    if type(p) is float:
        return 1 if rng.random() < p else 0
    p = Fraction(p)
    return 1 if rng.bits53() * p.denominator < p.numerator * _TWO53 else 0


def _exact(family, params):
    for i, p in enumerate(params):
        if not is_rational(p):
            raise IrrationalParameter(
                f"{family}: parameter {i} = {_show(p)} is not rational")
    return tuple(Fraction(p) for p in params)


def _unit_interval(name, i, p):
    if not 0 <= p <= 1:
        raise ParameterOutOfRange(name, i, p, "lies outside [0, 1]")


class Flip(Distribution):
    name = "Flip"
    param_tags = (_ANY_NUMBER,)

    def _check_component(self, i, p):
        _unit_interval(self.name, i, p)

    def mass(self, params, outcome):
        (p,) = params
        if is_rational(p):
            p = Fraction(p)
            one, zero = Fraction(1), Fraction(0)
        else:
            one, zero = 1.0, 0.0
        if outcome == 1:
            return p
        if outcome == 0:
            return one - p
        return zero

    def sample(self, params, rng):
        return _bernoulli(params[0], rng)

    def support(self, params):
        (p,) = _exact(self.name, params)
        return [(w, m) for w, m in ((0, 1 - p), (1, p)) if m]


class Binomial(Distribution):
    name = "Binomial"
    param_tags = (_INTEGER, _ANY_NUMBER)

    def _check_component(self, i, p):
        if i == 0 and p < 1:
            raise ParameterOutOfRange(self.name, i, p, "must be a positive integer")
        if i == 1:
            _unit_interval(self.name, i, p)

    def mass(self, params, outcome):
        n, p = params
        exact = is_rational(p)
        if type(outcome) is not int or not 0 <= outcome <= n:
            return Fraction(0) if exact else 0.0
        if exact:
            p = Fraction(p)
            return math.comb(n, outcome) * p ** outcome * (1 - p) ** (n - outcome)
        return math.comb(n, outcome) * p ** outcome * (1.0 - p) ** (n - outcome)

    def sample(self, params, rng):
        n, p = params
        return sum(_bernoulli(p, rng) for _ in range(n))

    def support(self, params):
        n, p = params
        _exact(self.name, (p,))
        out = []
        for k in range(n + 1):
            m = self.mass(params, k)
            if m:
                out.append((k, m))
        return out


class Poisson(Distribution):
    name = "Poisson"
    param_tags = (_ANY_NUMBER,)
    support_kind = COUNTABLE

    # inversion is numerically safe while exp(-lam) stays well above 0
    _CHUNK = 500.0

    def _check_component(self, i, p):
        if not p > 0:
            raise ParameterOutOfRange(self.name, i, p, "must be positive")

    def mass(self, params, outcome):
        lam = float(params[0])
        if type(outcome) is not int or outcome < 0:
            return 0.0
        return math.exp(outcome * math.log(lam) - lam - math.lgamma(outcome + 1))

    def sample(self, params, rng):
        # sum of independent Poisson pieces, one uniform each
        lam = float(params[0])
        pieces = max(1, math.ceil(lam / self._CHUNK))
        part = lam / pieces
        return sum(_poisson_inversion(part, rng.random()) for _ in range(pieces))


def _poisson_inversion(lam: float, u: float) -> int:
    k = 0
    p = math.exp(-lam)
    cdf = p
    while u >= cdf:
        k += 1
        p *= lam / k
        if p == 0.0 and k > lam:
            break
        cdf += p
    return k


class Gaussian(Distribution):
    """Normal family parameterized by mean and variance."""

    name = "Gaussian"
    param_tags = (_ANY_NUMBER, _ANY_NUMBER)
    support_kind = CONTINUOUS
    outcome_tag = "real"

    def _check_component(self, i, p):
        if i == 1 and p < 0:
            raise ParameterOutOfRange(self.name, i, p, "is a negative variance")

    def mass(self, params, outcome):
        mu, var = float(params[0]), float(params[1])
        x = float(outcome)
        if var == 0.0:
            return math.inf if x == mu else 0.0
        return math.exp(-(x - mu) ** 2 / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)

    def sample(self, params, rng):
        # Box-Muller, cosine branch only: exactly two draws per sample
        u1 = 1.0 - rng.random()
        u2 = rng.random()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return float(params[0]) + math.sqrt(float(params[1])) * z


class ShiftedDirac(Distribution):
    """Point mass on ``i + 1``."""

    name = "ShiftedDirac"
    param_tags = (_INTEGER,)

    def mass(self, params, outcome):
        return Fraction(1) if outcome == params[0] + 1 and type(outcome) is int else Fraction(0)

    def sample(self, params, rng):
        return params[0] + 1

    def support(self, params):
        return [(params[0] + 1, Fraction(1))]


FAMILIES: dict[str, Distribution] = {
    d.name: d for d in (Flip(), Binomial(), Poisson(), Gaussian(), ShiftedDirac())
}


def lookup(name: str, aliases=None) -> Distribution:
    """Resolve a family name, following ``aliases`` (alias -> family name)."""
    if aliases:
        name = dict(aliases).get(name, name)
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownDistribution(f"unknown distribution {name!r}") from None


def _resolve(dist) -> Distribution:
    return dist if isinstance(dist, Distribution) else lookup(dist)


def validate_params(dist, params) -> None:
    """Raise :class:`ParameterOutOfRange` unless ``params`` lies in the parameter space."""
    _resolve(dist).validate(tuple(params))


def eval_mass(dist, params, outcome):
    d = _resolve(dist)
    params = tuple(params)
    d.validate(params)
    return d.mass(params, outcome)


def sample(dist, params, rng: Rng):
    d = _resolve(dist)
    params = tuple(params)
    d.validate(params)
    return d.sample(params, rng)


def support(dist, params) -> list:
    """Finite support as ``(outcome, Fraction)`` pairs, zero-mass outcomes omitted."""
    d = _resolve(dist)
    params = tuple(params)
    d.validate(params)
    return d.support(params)
