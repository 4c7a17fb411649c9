"""Scalar distribution families.

Parameters may be floats or :class:`~handlebar.autodiff.Dual` values, in
which case ``log_prob`` and reparameterized ``sample`` carry gradients.
Continuous families return ``-inf`` outside their support; Binomial raises
:class:`OutOfSupport` for non-integer values.
"""
import math
from dataclasses import dataclass
from typing import Any

from . import autodiff as ad
from .bijectors import Bijector
from .errors import InvalidParams, OutOfSupport
from .special import lgamma
from .support import POSITIVE_REALS, REAL_LINE, UNIT_INTERVAL, integer_range

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_TWO_OVER_PI = math.log(2.0 / math.pi)


def _finite(name, x):
    v = ad.primal(x)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidParams(f"{name} must be a finite number, got {v!r}")
    return v


def _xlogy(coef, y):
    """coef * log(y) with 0 * log(0) = 0."""
    if ad.primal(coef) == 0.0:
        return 0.0
    if ad.primal(y) == 0.0:
        return -math.inf if ad.primal(coef) > 0 else math.inf
    return coef * ad.log(y)


def _xlog1my(coef, y):
    """coef * log(1 - y) with 0 * log(0) = 0."""
    if ad.primal(coef) == 0.0:
        return 0.0
    if ad.primal(y) == 1.0:
        return -math.inf if ad.primal(coef) > 0 else math.inf
    return coef * ad.log1p(-y)


class Distribution:
    family = "Distribution"

    @property
    def support(self):
        raise NotImplementedError

    def log_prob(self, value):
        raise NotImplementedError

    def sample(self, rng):
        raise NotImplementedError


@dataclass(frozen=True)
class Beta(Distribution):
    alpha: Any
    beta: Any
    family = "Beta"

    def __post_init__(self):
        if not _finite("alpha", self.alpha) > 0.0 or not _finite("beta", self.beta) > 0.0:
            raise InvalidParams(f"Beta needs alpha > 0 and beta > 0, got ({self.alpha}, {self.beta})")

    @property
    def support(self):
        return UNIT_INTERVAL

    def log_prob(self, value):
        v = ad.primal(value)
        if not 0.0 <= v <= 1.0:
            return -math.inf
        a, b = self.alpha, self.beta
        norm = ad.lgamma(a) + ad.lgamma(b) - ad.lgamma(a + b)
        return _xlogy(a - 1.0, value) + _xlog1my(b - 1.0, value) - norm

    def sample(self, rng):
        return float(rng.beta(ad.primal(self.alpha), ad.primal(self.beta)))


@dataclass(frozen=True)
class Binomial(Distribution):
    """Count of successes in ``n`` trials with success probability ``p``."""

    n: int
    p: Any
    family = "Binomial"

    def __post_init__(self):
        n = _finite("n", self.n)
        if n < 0 or n != int(n):
            raise InvalidParams(f"Binomial trial count must be a non-negative integer, got {n}")
        object.__setattr__(self, "n", int(n))
        if not 0.0 <= _finite("p", self.p) <= 1.0:
            raise InvalidParams(f"Binomial probability must lie in [0, 1], got {ad.primal(self.p)}")

    @property
    def support(self):
        return integer_range(self.n)

    def log_prob(self, value):
        k = ad.primal(value)
        if isinstance(k, bool) or not isinstance(k, (int, float)) or not float(k).is_integer():
            raise OutOfSupport(f"Binomial value must be an integer, got {k!r}")
        k = int(k)
        n, p = self.n, self.p
        if k < 0 or k > n:
            return -math.inf
        pv = ad.primal(p)
        if pv == 0.0:
            return 0.0 if k == 0 else -math.inf
        if pv == 1.0:
            return 0.0 if k == n else -math.inf
        log_choose = lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0)
        return log_choose + _xlogy(float(k), p) + _xlog1my(float(n - k), p)

    def sample(self, rng):
        return float(rng.binomial(self.n, ad.primal(self.p)))


@dataclass(frozen=True)
class Normal(Distribution):
    loc: Any
    scale: Any
    family = "Normal"

    def __post_init__(self):
        _finite("loc", self.loc)
        if not _finite("scale", self.scale) > 0.0:
            raise InvalidParams(f"Normal scale must be positive, got {ad.primal(self.scale)}")

    @property
    def support(self):
        return REAL_LINE

    def log_prob(self, value):
        v = ad.primal(value)
        if math.isinf(v):
            return -math.inf
        z = (value - self.loc) / self.scale
        return -0.5 * z * z - ad.log(self.scale) - _HALF_LOG_TWO_PI

    def sample(self, rng):
        # pathwise: gradients flow through loc and scale
        return self.loc + self.scale * float(rng.standard_normal())


@dataclass(frozen=True)
class HalfCauchy(Distribution):
    scale: Any
    family = "HalfCauchy"

    def __post_init__(self):
        if not _finite("scale", self.scale) > 0.0:
            raise InvalidParams(f"HalfCauchy scale must be positive, got {ad.primal(self.scale)}")

    @property
    def support(self):
        return POSITIVE_REALS

    def log_prob(self, value):
        v = ad.primal(value)
        if not 0.0 <= v < math.inf:
            return -math.inf
        z = value / self.scale
        return _LOG_TWO_OVER_PI - ad.log(self.scale) - ad.log1p(z * z)

    def sample(self, rng):
        return self.scale * abs(float(rng.standard_cauchy()))


@dataclass(frozen=True)
class Transformed(Distribution):
    """Pushforward of ``base`` through ``bijector``."""

    base: Distribution
    bijector: Bijector
    family = "Transformed"

    @property
    def support(self):
        return self.bijector.image(self.base.support)

    def log_prob(self, value):
        x = self.bijector.inverse(value)
        base_lp = self.base.log_prob(x)
        if ad.primal(base_lp) == math.inf:
            # a finite value reaches a singular endpoint only through underflow
            return -math.inf
        return base_lp + self.bijector.inverse_log_det_jacobian(value)

    def sample(self, rng):
        return self.bijector.forward(self.base.sample(rng))


def log_prob(dist, value):
    return dist.log_prob(value)


def sample(dist, rng):
    return dist.sample(rng)


def support_of(dist):
    return dist.support
