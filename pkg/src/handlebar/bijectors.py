"""Scalar bijectors with log-det-Jacobians.

Every map accepts floats or :class:`~handlebar.autodiff.Dual` values.
``Chain([f, g])`` applies ``g`` first, so ``Chain([f, g]).forward(x) ==
f.forward(g.forward(x))``.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from . import autodiff as ad
from .errors import DomainError, InvalidParams, Unsupported
from .support import POSITIVE_REALS, REAL_LINE, TRANSFORMED, UNIT_INTERVAL


class Bijector:
    def forward(self, x):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def forward_log_det_jacobian(self, x):
        raise NotImplementedError

    def inverse_log_det_jacobian(self, y):
        return -self.forward_log_det_jacobian(self.inverse(y))

    def image(self, support):
        """Support of ``forward(X)`` when ``X`` has ``support``."""
        return TRANSFORMED


def _check_real(x):
    v = ad.primal(x)
    if math.isnan(v):
        raise DomainError("NaN input")


@dataclass(frozen=True)
class Sigmoid(Bijector):
    """Logistic map from the real line onto (0, 1)."""

    def forward(self, x):
        _check_real(x)
        return ad.sigmoid(x)

    def inverse(self, y):
        v = ad.primal(y)
        if not 0.0 < v < 1.0:
            raise DomainError(f"logit is undefined at {v}")
        return ad.log(y) - ad.log1p(-y)

    def forward_log_det_jacobian(self, x):
        _check_real(x)
        # log s(x)(1 - s(x)), stable for large |x|
        return -ad.softplus(-x) - ad.softplus(x)

    def image(self, support):
        return UNIT_INTERVAL if support == REAL_LINE else TRANSFORMED


@dataclass(frozen=True)
class Exp(Bijector):
    def forward(self, x):
        _check_real(x)
        return ad.exp(x)

    def inverse(self, y):
        if not ad.primal(y) > 0.0:
            raise DomainError(f"log is undefined at {ad.primal(y)}")
        return ad.log(y)

    def forward_log_det_jacobian(self, x):
        _check_real(x)
        return x

    def image(self, support):
        return POSITIVE_REALS if support == REAL_LINE else TRANSFORMED


@dataclass(frozen=True)
class Affine(Bijector):
    """``x -> scale * x + shift``."""

    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.scale == 0.0 or not math.isfinite(self.scale) or not math.isfinite(self.shift):
            raise InvalidParams(f"Affine needs a finite non-zero scale, got {self.scale}")

    def forward(self, x):
        _check_real(x)
        return self.scale * x + self.shift

    def inverse(self, y):
        _check_real(y)
        return (y - self.shift) / self.scale

    def forward_log_det_jacobian(self, x):
        return math.log(abs(self.scale))

    def image(self, support):
        if support == REAL_LINE:
            return REAL_LINE
        if support == POSITIVE_REALS and self.scale > 0.0 and self.shift == 0.0:
            return POSITIVE_REALS
        if support == UNIT_INTERVAL and self.scale == 1.0 and self.shift == 0.0:
            return UNIT_INTERVAL
        return TRANSFORMED


IDENTITY = Affine(1.0, 0.0)


@dataclass(frozen=True)
class Invert(Bijector):
    inner: Bijector

    def forward(self, x):
        return self.inner.inverse(x)

    def inverse(self, y):
        return self.inner.forward(y)

    def forward_log_det_jacobian(self, x):
        return -self.inner.forward_log_det_jacobian(self.inner.inverse(x))

    def inverse_log_det_jacobian(self, y):
        return self.inner.forward_log_det_jacobian(y)

    def image(self, support):
        # the inner map sends its natural domain (the real line here) onto support
        if self.inner.image(REAL_LINE) == support:
            return REAL_LINE
        return TRANSFORMED


@dataclass(frozen=True)
class Chain(Bijector):
    bijectors: Tuple[Bijector, ...]

    def __init__(self, bijectors):
        object.__setattr__(self, "bijectors", tuple(bijectors))

    def forward(self, x):
        for b in reversed(self.bijectors):
            x = b.forward(x)
        return x

    def inverse(self, y):
        for b in self.bijectors:
            y = b.inverse(y)
        return y

    def forward_log_det_jacobian(self, x):
        total = 0.0
        for b in reversed(self.bijectors):
            total = total + b.forward_log_det_jacobian(x)
            x = b.forward(x)
        return total

    def image(self, support):
        for b in reversed(self.bijectors):
            support = b.image(support)
        return support


_CONSTRAINING = {
    UNIT_INTERVAL: Sigmoid(),
    POSITIVE_REALS: Exp(),
    REAL_LINE: IDENTITY,
}


def constraining_transform(support):
    """Bijector mapping the real line onto ``support``."""
    try:
        return _CONSTRAINING[support]
    except KeyError:
        raise Unsupported(f"no constraining transform for support {support}") from None
