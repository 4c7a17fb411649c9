"""Inference built from composed handlers.

Both engines work in unconstrained space. Random-walk Metropolis-Hastings
evaluates ``log_joint(unconstrain(condition(model)))``. ADVI fits a
mean-field Gaussian guide with Adam on the reparameterized ELBO.
"""
import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from . import autodiff as ad
from .distributions import Transformed
from .effects import Context, Handler, handlers
from .errors import AllRejectedWarning, InvalidParams, NonFinite, Unsupported
from .handlers import Condition, LogJoint, MeanFieldGuide, Unconstrain, trace_model


@dataclass(frozen=True)
class MHConfig:
    steps: int = 10000
    burn_in: int = 1000
    step_size: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not (self.steps > self.burn_in >= 0):
            raise InvalidParams(f"need steps > burn_in >= 0, got {self.steps}, {self.burn_in}")
        if not self.step_size > 0:
            raise InvalidParams(f"step_size must be positive, got {self.step_size}")


@dataclass(frozen=True)
class ADVIConfig:
    steps: int = 3000
    learning_rate: float = 0.05
    mc_samples: int = 1
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.steps < 0 or not self.learning_rate > 0 or self.mc_samples < 1:
            raise InvalidParams("ADVI needs steps >= 0, learning_rate > 0, mc_samples >= 1")


@dataclass
class PosteriorSamples:
    draws: Dict[str, List[float]]
    acceptance_rate: float
    chain: int = 0

    def mean(self, name):
        return float(np.mean(self.draws[name]))

    def variance(self, name):
        return float(np.var(self.draws[name]))

    def __len__(self):
        return len(next(iter(self.draws.values()), []))

    def to_json(self):
        return {**{k: list(v) for k, v in self.draws.items()}, "acceptance_rate": self.acceptance_rate}

    def csv_rows(self, with_chain=False):
        names = list(self.draws)
        header = (["chain"] if with_chain else []) + ["draw"] + names
        rows = []
        for i in range(len(self)):
            row = ([self.chain] if with_chain else []) + [i]
            rows.append(row + [f"{self.draws[n][i]:.6f}" for n in names])
        return header, rows


@dataclass
class ADVIResult:
    params: Dict[str, tuple]
    history: List[float] = field(default_factory=list)

    def __iter__(self):
        return iter((self.params, self.history))

    def history_json(self):
        return [{"step": i, "elbo": e} for i, e in enumerate(self.history)]


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _latent_layout(model, observations):
    """Latent names and their unconstrained-to-model maps, in site order."""
    tr = trace_model(model, Unconstrain(), Condition(observations), seed=0)
    names, to_model = [], []
    for name, rec in tr.items():
        if rec.observed:
            continue
        if rec.dist.support.is_discrete:
            raise Unsupported(f"latent site {name!r} is discrete")
        names.append(name)
        if isinstance(rec.dist, Transformed):
            to_model.append(rec.dist.bijector.inverse)
        else:
            to_model.append(lambda u: u)
    return names, to_model


class UnconstrainedDensity:
    """``u -> log p(u, observations)`` for a fixed model, reusing one context."""

    def __init__(self, model, observations):
        self.model = model
        self.names, self.to_model = _latent_layout(model, observations)
        self._ctx = Context(0)
        self._acc = LogJoint()
        self._unconstrain = Unconstrain()
        self._condition = Condition(observations)

    def __call__(self, u):
        self._acc.latents = dict(zip(self.names, u))
        with handlers(self._ctx, self._acc, self._unconstrain, self._condition):
            self._ctx.run(self.model)
        return self._acc.total

    def constrain(self, u):
        return [f(x) for f, x in zip(self.to_model, u)]


def mh_run(model, observations, cfg):
    """Symmetric random-walk Metropolis-Hastings started at u = 0."""
    target = UnconstrainedDensity(model, observations)
    d = len(target.names)
    rng = np.random.default_rng(cfg.seed)
    noise = rng.standard_normal((cfg.steps, d)) * cfg.step_size
    log_u = np.log(rng.random(cfg.steps))

    u = [0.0] * d
    logp = float(target(u))
    accepted = 0
    draws = {n: [] for n in target.names}
    for t in range(cfg.steps):
        proposal = [a + b for a, b in zip(u, noise[t].tolist())]
        logp_new = float(target(proposal))
        # NaN compares false: rejected
        if log_u[t] < logp_new - logp:
            u, logp = proposal, logp_new
            accepted += 1
        if t >= cfg.burn_in:
            for n, v in zip(target.names, target.constrain(u)):
                draws[n].append(float(v))
    rate = accepted / cfg.steps
    if rate < 1e-3:
        warnings.warn(
            f"acceptance rate {rate:.2e}; step_size {cfg.step_size} is likely too large",
            AllRejectedWarning,
            stacklevel=2,
        )
    return PosteriorSamples(draws, rate)


class _FixedNoise(Handler):
    """Pin each guide site to ``loc + scale * eps[name]`` (common random numbers)."""

    def __init__(self, eps):
        self.eps = eps

    def intercept(self, site, fwd):
        if not site.observed and site.name in self.eps:
            d = site.dist
            site = site.replace(pinned_value=d.loc + d.scale * self.eps[site.name])
        return fwd.forward(site)


def elbo_estimate(model, observations, params, seed=0, mc_samples=1, noise=None):
    """Reparameterized Monte-Carlo estimate of E_q[log p(u, x) - log q(u)].

    The guide runs as ``trace(guide(unconstrain(condition(model))))``; its
    draws are then scored with the unconstrained log joint. ``params``
    values may be Duals, in which case the estimate carries gradients.
    ``noise`` fixes the standard-normal draws per latent name.
    """
    key = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
    total = 0.0
    for k in range(mc_samples):
        stack = [MeanFieldGuide(params), Unconstrain(), Condition(observations)]
        if noise is not None:
            stack.insert(0, _FixedNoise(noise))
        tr = trace_model(model, *stack, seed=(*key, k))
        latents = {n: r.value for n, r in tr.items() if not r.observed}
        log_q = sum((tr[n].log_prob for n in latents), 0.0)
        ctx = Context((*key, k))
        acc = LogJoint(latents)
        with handlers(ctx, acc, Unconstrain(), Condition(observations)):
            ctx.run(model)
        total = total + (acc.total - log_q)
    return total / mc_samples if mc_samples > 1 else total


def init_guide_params(model, observations):
    params = {}
    trace_model(model, MeanFieldGuide(params), Unconstrain(), Condition(observations))
    return params


def advi_fit(model, observations, cfg, params=None):
    """Maximize the ELBO with Adam; returns ``ADVIResult(params, history)``.

    The result unpacks as ``params, history = advi_fit(...)``.
    """
    params = dict(params) if params else {}
    params.update({k: v for k, v in init_guide_params(model, observations).items() if k not in params})
    names = list(params)
    theta = [float(x) for n in names for x in params[n]]
    m = [0.0] * len(theta)
    v = [0.0] * len(theta)
    history = []
    for step in range(cfg.steps):
        tape = ad.Tape()
        duals = tape.variables(theta)
        dual_params = {n: (duals[2 * i], duals[2 * i + 1]) for i, n in enumerate(names)}
        elbo = elbo_estimate(model, observations, dual_params, seed=(cfg.seed, step),
                             mc_samples=cfg.mc_samples)
        grad = tape.backward(elbo, duals)
        value = float(ad.primal(elbo))
        if not math.isfinite(value) or not all(math.isfinite(g) for g in grad):
            raise NonFinite(step, history)
        history.append(value)
        t = step + 1
        for i, g in enumerate(grad):
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g
            m_hat = m[i] / (1.0 - cfg.beta1**t)
            v_hat = v[i] / (1.0 - cfg.beta2**t)
            theta[i] += cfg.learning_rate * m_hat / (math.sqrt(v_hat) + cfg.eps)
    final = {n: (theta[2 * i], theta[2 * i + 1]) for i, n in enumerate(names)}
    return ADVIResult(final, history)
