"""Registry of example generative programs."""
from dataclasses import dataclass, field
from typing import Callable, Dict, List

from .distributions import Beta, Binomial, Normal
from .errors import InvalidParams, NotFound


def beta_binomial(n):
    """z ~ Beta(1, 1); x ~ Binomial(n, z); returns x."""
    if int(n) != n or n < 1:
        raise InvalidParams(f"beta_binomial needs an integer n >= 1, got {n}")
    n = int(n)

    def model(ctx):
        z = ctx.sample("z", Beta(1.0, 1.0))
        return ctx.sample("x", Binomial(n, z))

    return model


def normal_normal(prior_mu=0.0, prior_sigma=1.0, like_sigma=1.0):
    """theta ~ Normal(prior_mu, prior_sigma); y ~ Normal(theta, like_sigma)."""
    if not (prior_sigma > 0 and like_sigma > 0):
        raise InvalidParams("normal_normal needs positive scales")

    def model(ctx):
        theta = ctx.sample("theta", Normal(prior_mu, prior_sigma))
        return ctx.sample("y", Normal(theta, like_sigma))

    return model


@dataclass
class ModelEntry:
    name: str
    builder: Callable
    latent_names: List[str]
    observed_names: List[str]
    defaults: Dict[str, float] = field(default_factory=dict)
    description: str = ""

    def build(self, hyper=None):
        unknown = set(hyper or {}) - set(self.defaults)
        if unknown:
            raise InvalidParams(f"unknown hyperparameters for {self.name}: {sorted(unknown)}")
        return self.builder(**{**self.defaults, **(hyper or {})})


REGISTRY = {
    e.name: e
    for e in [
        ModelEntry("beta_binomial", beta_binomial, ["z"], ["x"], {"n": 10},
                   "z ~ Beta(1,1); x ~ Binomial(n, z)"),
        ModelEntry("normal_normal", normal_normal, ["theta"], ["y"],
                   {"prior_mu": 0.0, "prior_sigma": 1.0, "like_sigma": 1.0},
                   "theta ~ Normal(prior_mu, prior_sigma); y ~ Normal(theta, like_sigma)"),
    ]
}


def registry_lookup(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise NotFound(name, REGISTRY) from None
