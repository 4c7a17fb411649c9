"""Handler library: condition, substitute, trace, log-joint accumulation,
unconstraining, non-centering and the mean-field variational guide.

Values given to :class:`Condition` and :class:`Substitute` are always in the
model's own (constrained) space. A handler placed outside :class:`Unconstrain`
sees the transformed sites instead, so values it pins are unconstrained.
"""
import math
from dataclasses import dataclass
from typing import Any

from . import autodiff as ad
from .bijectors import Invert, constraining_transform
from .distributions import Distribution, Normal, Transformed
from .effects import Context, Handler, SiteResult, handlers
from .errors import (
    ConstrainedLatent,
    Disjointness,
    InvalidParams,
    DuplicateName,
    MissingValue,
    UnusedCondition,
    UnusedSubstitution,
)
from .support import REAL_LINE


class _Pinning(Handler):
    observe = False
    unused_error = UnusedSubstitution

    def __init__(self, values):
        self.values = dict(values)
        self._seen = set()

    def begin(self):
        self._seen = set()

    def end(self):
        unused = set(self.values) - self._seen
        if unused:
            raise self.unused_error(unused)

    def intercept(self, site, fwd):
        if site.name in self.values:
            self._seen.add(site.name)
            site = site.replace(pinned_value=self.values[site.name], observed=self.observe or site.observed)
        return fwd.forward(site)


class Condition(_Pinning):
    """Turn sample statements into observe statements."""

    observe = True
    unused_error = UnusedCondition


class Substitute(_Pinning):
    """Pin latent values without marking them observed."""


def make_condition(values):
    return Condition(values)


def make_substitute(values):
    return Substitute(values)


@dataclass
class TraceRecord:
    name: str
    value: Any
    log_prob: Any
    observed: bool
    dist: Distribution

    def to_json(self):
        return {
            "name": self.name,
            "value": float(ad.primal(self.value)),
            "log_prob": float(ad.primal(self.log_prob)),
            "observed": self.observed,
            "family": self.dist.family,
        }


class Trace(dict):
    """Site name -> :class:`TraceRecord`, in execution order."""

    @property
    def total_log_prob(self):
        return sum((r.log_prob for r in self.values()), 0.0)

    @property
    def latent_names(self):
        return [n for n, r in self.items() if not r.observed]

    def to_json(self):
        return [r.to_json() for r in self.values()]


class TraceHandler(Handler):
    def __init__(self):
        self.trace = Trace()

    def begin(self):
        self.trace.clear()

    def intercept(self, site, fwd):
        result = fwd.forward(site)
        if site.name in self.trace:
            raise DuplicateName(site.name)
        dist = result.site.dist
        self.trace[site.name] = TraceRecord(
            site.name, result.value, dist.log_prob(result.value), result.site.observed, dist
        )
        return result


def make_trace():
    """Return a trace handler and the :class:`Trace` it fills in place."""
    h = TraceHandler()
    return h, h.trace


class LogJoint(Handler):
    """Pin ``latents`` and accumulate the log density of every site.

    Every site reaching this handler must be pinned, either here or by a
    handler further in; otherwise :class:`MissingValue` is raised.
    """

    def __init__(self, latents=None):
        self.latents = dict(latents or {})
        self.total = 0.0
        self._seen = set()

    def begin(self):
        self.total = 0.0
        self._seen = set()

    def end(self):
        unused = set(self.latents) - self._seen
        if unused:
            raise UnusedSubstitution(unused)

    def intercept(self, site, fwd):
        if site.name in self.latents:
            self._seen.add(site.name)
            site = site.replace(pinned_value=self.latents[site.name])
        if not site.is_pinned:
            raise MissingValue(site.name)
        result = fwd.forward(site)
        self.total = self.total + result.site.dist.log_prob(result.value)
        return result


def make_log_joint(latents=None):
    return LogJoint(latents)


def log_joint(model, latents, observations, unconstrained=False, seed=0):
    """Log joint density of ``model`` with every site pinned.

    With ``unconstrained=True`` the model runs under :class:`Unconstrain`
    and ``latents`` are read as unconstrained values, so the result includes
    the log-det-Jacobian of each constraining transform.
    """
    overlap = set(latents) & set(observations)
    if overlap:
        raise Disjointness(overlap)
    ctx = Context(seed)
    acc = LogJoint(latents)
    stack = [acc, Unconstrain()] if unconstrained else [acc]
    try:
        with handlers(ctx, *stack, Condition(observations)):
            ctx.run(model)
    except InvalidParams:
        # an out-of-support latent can make downstream parameters invalid;
        # the joint density is already zero
        if ad.primal(acc.total) == -math.inf:
            return -math.inf
        raise
    return acc.total


class Unconstrain(Handler):
    """Move continuous constrained latents to the real line.

    The site is re-issued under the same name as
    ``Transformed(base, Invert(b))`` with ``b = constraining_transform``,
    and the model receives ``b.forward`` of the unconstrained value. The
    original site is never forwarded. Discrete, observed and already
    unconstrained sites pass through.
    """

    def intercept(self, site, fwd):
        support = site.dist.support
        if site.observed or support.is_discrete or support == REAL_LINE:
            return fwd.forward(site)
        try:
            b = constraining_transform(support)
        except Exception:
            return fwd.forward(site)
        pinned = site.pinned_value
        new_site = site.replace(
            dist=Transformed(site.dist, Invert(b)),
            pinned_value=None if pinned is None else b.inverse(pinned),
        )
        result = fwd.forward(new_site)
        return SiteResult(b.forward(result.value), result.site)


def make_unconstrain():
    return Unconstrain()


class NonCenter(Handler):
    """Rewrite latent ``Normal(loc, scale)`` site ``s`` as ``loc + scale * s_std``."""

    suffix = "_std"

    def intercept(self, site, fwd):
        dist = site.dist
        if site.observed or not isinstance(dist, Normal):
            return fwd.forward(site)
        pinned = site.pinned_value
        std_site = site.replace(
            name=site.name + self.suffix,
            dist=Normal(0.0, 1.0),
            pinned_value=None if pinned is None else (pinned - dist.loc) / dist.scale,
        )
        result = fwd.forward(std_site)
        return SiteResult(dist.loc + dist.scale * result.value, result.site)


def make_noncenter():
    return NonCenter()


class MeanFieldGuide(Handler):
    """Replace each latent site by ``Normal(mu, exp(log_sigma))``.

    ``params`` maps site names to ``(mu, log_sigma)`` and is filled lazily
    with ``(0.0, 0.0)`` for unseen latents. Must run outside
    :class:`Unconstrain`; a latent with non-real support raises
    :class:`ConstrainedLatent`.
    """

    def __init__(self, params):
        self.params = params

    def intercept(self, site, fwd):
        if site.observed:
            return fwd.forward(site)
        support = site.dist.support
        if support != REAL_LINE:
            raise ConstrainedLatent(site.name, support)
        if site.name not in self.params:
            self.params[site.name] = (0.0, 0.0)
        mu, log_sigma = self.params[site.name]
        return fwd.forward(site.replace(dist=Normal(mu, ad.exp(log_sigma))))


def make_mean_field_guide(params):
    return MeanFieldGuide(params)


def trace_model(model, *stack, seed=0):
    """Run ``model`` once under ``stack`` (outermost first) and trace it.

    The trace handler sits outside every handler in ``stack``.
    """
    ctx = Context(seed)
    th, tr = make_trace()
    with handlers(ctx, th, *stack):
        ctx.run(model)
    return tr
