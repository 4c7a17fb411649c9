"""Handler stack and the sample-operation dispatch protocol.

A model is a callable taking an execution :class:`Context` and calling
``ctx.sample(name, dist)`` for each random variable. Each call becomes a
:class:`SampleSite` that travels from the innermost active handler outward.
A handler sees the site together with a :class:`Forwarder` and decides what
the site means. It may rewrite the site and ``forward`` it, so that handlers
further out observe the rewritten operation. It may also call ``direct``,
which runs the base sampling behaviour and hides the site from every
handler further out. A handler may resume its operation at most once.

    >>> from handlebar.distributions import Beta
    >>> ctx = Context(seed=0)
    >>> with ctx.handle(Handler()):
    ...     0.0 < ctx.sample("z", Beta(1.0, 1.0)) < 1.0
    True
"""
import contextlib
import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import autodiff as ad
from .distributions import Distribution
from .errors import DuplicateName, InvalidParams, MultiShot, NonFiniteValue


@dataclass(frozen=True)
class SampleSite:
    name: str
    dist: Distribution
    pinned_value: Optional[Any] = None
    observed: bool = False

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("site name must be a non-empty string")
        if self.observed and self.pinned_value is None:
            raise ValueError(f"observed site {self.name!r} needs a pinned value")

    @property
    def is_pinned(self):
        return self.pinned_value is not None

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SiteResult:
    value: Any
    site: SampleSite


class Handler:
    """Base handler: forwards every site unchanged.

    Subclasses override :meth:`intercept`. :meth:`begin` and :meth:`end` run
    when a ``ctx.handle`` scope opens and closes normally; handlers use them
    to reset per-execution state and check end-of-execution conditions.
    """

    def intercept(self, site, fwd):
        return fwd.forward(site)

    def begin(self):
        pass

    def end(self):
        pass


class Forwarder:
    """One-shot capability to resume an intercepted operation."""

    __slots__ = ("_ctx", "_level", "_used")

    def __init__(self, ctx, level):
        self._ctx = ctx
        self._level = level
        self._used = False

    def _claim(self):
        if self._used:
            raise MultiShot("an intercepted site may be forwarded or executed only once")
        self._used = True

    def forward(self, site):
        """Deliver ``site`` to the next-outer handler."""
        self._claim()
        return self._ctx._dispatch(site, self._level)

    def direct(self, site):
        """Execute ``site`` with no further interception."""
        self._claim()
        return base_execute(site, self._ctx)


def _check_finite(value, name):
    v = ad.primal(value)
    if not math.isfinite(v):
        raise NonFiniteValue(f"site {name!r} realized non-finite value {v}")


def base_execute(site, ctx):
    """Default meaning of a sample statement: return the pin or draw."""
    if site.is_pinned:
        return SiteResult(site.pinned_value, site)
    value = site.dist.sample(ctx.rng())
    _check_finite(value, site.name)
    return SiteResult(value, site)


class Context:
    """Execution context: the handler stack plus a counter-based PRNG.

    ``key`` is a tuple of non-negative integers (an int is accepted as a
    one-element key). The generator for a draw is derived from
    ``(*key, execution, ordinal)`` where ``execution`` counts calls to
    :meth:`run` and ``ordinal`` counts sites performed in the current
    execution, so draws do not depend on how many values handlers consume.

    A context is single-threaded; create one per thread or chain.
    """

    def __init__(self, seed=0):
        key = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
        if not key or any(int(k) != k or k < 0 for k in key):
            raise InvalidParams(f"seed must be non-negative integers, got {seed!r}")
        self.key = tuple(int(k) for k in key)
        self._stack = []  # innermost first
        self._names = set()
        self._ordinal = 0
        self._execution = 0

    @property
    def stack(self):
        """Active handlers, innermost first."""
        return tuple(self._stack)

    @contextlib.contextmanager
    def handle(self, handler):
        """Make ``handler`` innermost for the duration of the block."""
        saved = list(self._stack)
        self._stack.insert(0, handler)
        try:
            handler.begin()
            yield handler
            handler.end()
        finally:
            self._stack[:] = saved

    def run(self, model, *args, **kwargs):
        """Execute ``model(ctx, ...)`` as one fresh execution."""
        self._execution += 1
        self._names = set()
        self._ordinal = 0
        return model(self, *args, **kwargs)

    def rng(self):
        seq = np.random.SeedSequence([*self.key, self._execution, self._ordinal])
        return np.random.Generator(np.random.Philox(seq))

    def perform(self, site):
        if site.name in self._names:
            raise DuplicateName(site.name)
        self._names.add(site.name)
        self._ordinal += 1
        return self._dispatch(site, 0)

    def sample(self, name, dist):
        """Perform a sample site and return its realized value to the model."""
        return self.perform(SampleSite(name, dist)).value

    def _dispatch(self, site, level):
        if level > 0 and site.name not in self._names:
            # a handler introduced a new site name (e.g. non-centering)
            self._names.add(site.name)
        if level >= len(self._stack):
            return base_execute(site, self)
        result = self._stack[level].intercept(site, Forwarder(self, level + 1))
        if not isinstance(result, SiteResult):
            raise TypeError(f"handler {self._stack[level]!r} returned {type(result).__name__}")
        return result


def with_handler(ctx, handler, body, *args, **kwargs):
    """Run ``body(ctx, ...)`` with ``handler`` innermost on the stack."""
    with ctx.handle(handler):
        return body(ctx, *args, **kwargs)


def perform(ctx, site):
    return ctx.perform(site)


@contextlib.contextmanager
def handlers(ctx, *stack):
    """Enter several handlers at once, listed outermost first.

    ``handlers(ctx, a, b, c)`` reads like ``with a handle with b handle with
    c handle ...``: ``c`` sees each site first.
    """
    with contextlib.ExitStack() as es:
        for h in stack:
            es.enter_context(ctx.handle(h))
        yield
