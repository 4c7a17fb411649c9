"""Log-gamma and digamma for real scalars.

lgamma uses the Lanczos approximation with g=7 and nine coefficients;
digamma shifts the argument up past 6 by recurrence and then applies the
asymptotic series.
"""
import math

from .errors import DomainError

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# B_2k / (2k) for k = 1..6
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
)


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def lgamma(x):
    """Natural log of |Gamma(x)|."""
    x = float(x)
    if math.isnan(x):
        return x
    if _is_pole(x):
        raise DomainError(f"lgamma has a pole at {x}")
    if x == math.inf:
        return math.inf
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.log(math.pi / abs(math.sin(math.pi * x))) - lgamma(1.0 - x)
    x -= 1.0
    acc = LANCZOS_COEFFICIENTS[0]
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        acc += c / (x + i)
    t = x + LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def digamma(x):
    """Derivative of lgamma."""
    x = float(x)
    if math.isnan(x):
        return x
    if _is_pole(x):
        raise DomainError(f"digamma has a pole at {x}")
    if x < 0.0:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    shift = 0.0
    while x < 6.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for coef in _DIGAMMA_SERIES:
        series += coef * power
        power *= inv2
    return shift + math.log(x) - 0.5 / x - series


def lbeta(a, b):
    return lgamma(a) + lgamma(b) - lgamma(a + b)
