"""Scalar reverse-mode automatic differentiation.

A :class:`Tape` records one node per elementary operation. :class:`Dual`
values point back into the tape that created them; plain floats act as
constants. The math functions in this module accept either and return a
float for float input, so densities and bijectors can be written once and
evaluated with or without gradients.

    >>> gradient(lambda v: v[0] * v[1] + log(v[1]), [2.0, 5.0])
    [5.0, 2.2]
"""
import math

from . import special
from .errors import DomainError


class Tape:
    """Growable Wengert list of (parents, local partials) pairs."""

    __slots__ = ("parents", "partials")

    def __init__(self):
        self.parents = []
        self.partials = []

    def __len__(self):
        return len(self.parents)

    def _push(self, value, parents, partials):
        self.parents.append(parents)
        self.partials.append(partials)
        return Dual(value, self, len(self.parents) - 1)

    def variable(self, value):
        return self._push(float(value), (), ())

    def variables(self, values):
        return [self.variable(v) for v in values]

    def backward(self, output, wrt):
        """Adjoints of ``output`` with respect to each Dual in ``wrt``."""
        if not isinstance(output, Dual):
            return [0.0] * len(wrt)
        if output.tape is not self:
            raise ValueError("output was not recorded on this tape")
        adjoint = [0.0] * (output.index + 1)
        adjoint[output.index] = 1.0
        parents, partials = self.parents, self.partials
        for i in range(output.index, -1, -1):
            a = adjoint[i]
            if a == 0.0:
                continue
            for p, d in zip(parents[i], partials[i]):
                adjoint[p] += a * d
        return [adjoint[w.index] if w.index <= output.index else 0.0 for w in wrt]

    def reset(self):
        self.parents.clear()
        self.partials.clear()


class Dual:
    """A scalar primal value plus its node index on a tape."""

    __slots__ = ("value", "tape", "index")

    def __init__(self, value, tape, index):
        self.value = value
        self.tape = tape
        self.index = index

    def __repr__(self):
        return f"Dual({self.value!r}, node={self.index})"

    def __float__(self):
        return float(self.value)

    def _binary(self, other, value, d_self, d_other):
        if isinstance(other, Dual):
            if other.tape is not self.tape:
                raise ValueError("cannot combine values from different tapes")
            return self.tape._push(value, (self.index, other.index), (d_self, d_other))
        return self.tape._push(value, (self.index,), (d_self,))

    def __add__(self, other):
        return self._binary(other, self.value + primal(other), 1.0, 1.0)

    def __radd__(self, other):
        return self.tape._push(other + self.value, (self.index,), (1.0,))

    def __sub__(self, other):
        return self._binary(other, self.value - primal(other), 1.0, -1.0)

    def __rsub__(self, other):
        return self.tape._push(other - self.value, (self.index,), (-1.0,))

    def __mul__(self, other):
        o = primal(other)
        return self._binary(other, self.value * o, o, self.value)

    def __rmul__(self, other):
        return self.tape._push(other * self.value, (self.index,), (other,))

    def __truediv__(self, other):
        o = primal(other)
        if o == 0.0:
            raise ZeroDivisionError("division by zero")
        return self._binary(other, self.value / o, 1.0 / o, -self.value / (o * o))

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise ZeroDivisionError("division by zero")
        return self.tape._push(other / self.value, (self.index,), (-other / self.value**2,))

    def __neg__(self):
        return self.tape._push(-self.value, (self.index,), (-1.0,))

    def __pos__(self):
        return self

    def __pow__(self, other):
        if isinstance(other, Dual):
            # x ** y with both varying: d/dy needs log x
            if self.value <= 0.0:
                raise DomainError("Dual ** Dual requires a positive base")
            value = self.value**other.value
            return self._binary(
                other,
                value,
                other.value * self.value ** (other.value - 1.0),
                value * math.log(self.value),
            )
        value = self.value**other
        if isinstance(value, complex):
            raise DomainError(f"{self.value} ** {other} is not real")
        return self.tape._push(value, (self.index,), (other * self.value ** (other - 1.0),))

    def __rpow__(self, other):
        if other <= 0.0:
            raise DomainError("const ** Dual requires a positive base")
        value = other**self.value
        return self.tape._push(value, (self.index,), (value * math.log(other),))

    def __lt__(self, other):
        return self.value < primal(other)

    def __le__(self, other):
        return self.value <= primal(other)

    def __gt__(self, other):
        return self.value > primal(other)

    def __ge__(self, other):
        return self.value >= primal(other)


def primal(x):
    """The plain float underlying ``x``."""
    return x.value if isinstance(x, Dual) else x


def is_dual(x):
    return isinstance(x, Dual)


def _unary(x, value, derivative):
    return x.tape._push(value, (x.index,), (derivative,))


def log(x):
    v = primal(x)
    if not v > 0.0:
        raise DomainError(f"log of non-positive value {v}")
    if isinstance(x, Dual):
        return _unary(x, math.log(v), 1.0 / v)
    return math.log(v)


def log1p(x):
    v = primal(x)
    if not v > -1.0:
        raise DomainError(f"log1p of value {v} <= -1")
    if isinstance(x, Dual):
        return _unary(x, math.log1p(v), 1.0 / (1.0 + v))
    return math.log1p(v)


def _exp(v):
    try:
        return math.exp(v)
    except OverflowError:
        return math.inf


def exp(x):
    if isinstance(x, Dual):
        value = _exp(x.value)
        return _unary(x, value, value)
    return _exp(x)


def sqrt(x):
    v = primal(x)
    if v < 0.0:
        raise DomainError(f"sqrt of negative value {v}")
    if isinstance(x, Dual):
        value = math.sqrt(v)
        if value == 0.0:
            raise DomainError("sqrt is not differentiable at 0")
        return _unary(x, value, 0.5 / value)
    return math.sqrt(v)


def _sigmoid(v):
    if v >= 0.0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def _softplus(v):
    return max(v, 0.0) + math.log1p(math.exp(-abs(v)))


def sigmoid(x):
    if isinstance(x, Dual):
        s = _sigmoid(x.value)
        return _unary(x, s, s * (1.0 - s))
    return _sigmoid(x)


def softplus(x):
    if isinstance(x, Dual):
        return _unary(x, _softplus(x.value), _sigmoid(x.value))
    return _softplus(x)


def lgamma(x):
    if isinstance(x, Dual):
        return _unary(x, special.lgamma(x.value), special.digamma(x.value))
    return special.lgamma(x)


def value_and_grad(f, x):
    """Evaluate ``f`` on a fresh tape and return ``(f(x), grad f(x))``.

    ``f`` receives a list of Duals, one per entry of ``x``, and must return
    a scalar. The tape is discarded afterwards.
    """
    tape = Tape()
    inputs = tape.variables(x)
    out = f(inputs)
    grad = tape.backward(out, inputs)
    tape.reset()
    return float(primal(out)), grad


def gradient(f, x):
    return value_and_grad(f, x)[1]
