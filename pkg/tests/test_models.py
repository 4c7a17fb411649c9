import pytest

from handlebar.distributions import Binomial
from handlebar.errors import InvalidParams, NotFound
from handlebar.handlers import Condition, NonCenter, Substitute, trace_model
from handlebar.models import REGISTRY, beta_binomial, normal_normal, registry_lookup


def test_beta_binomial_sites():
    assert list(trace_model(beta_binomial(10))) == ["z", "x"]
    tr = trace_model(beta_binomial(10), Condition({"x": 7}))
    assert tr["x"].value == 7 and tr["x"].observed
    tr = trace_model(beta_binomial(10), Substitute({"z": 0.3}))
    assert tr["x"].dist == Binomial(10, 0.3)


def test_beta_binomial_returns_x():
    from handlebar.effects import Context

    assert Context(0).run(beta_binomial(10)) in range(11)


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_beta_binomial_rejects_bad_n(n):
    with pytest.raises(InvalidParams):
        beta_binomial(n)


def test_normal_normal_noncentered():
    tr = trace_model(normal_normal(0.0, 1.0, 1.0), NonCenter(), Condition({"y": 2.0}))
    assert list(tr) == ["theta_std", "y"]


def test_registry():
    assert registry_lookup("beta_binomial").latent_names == ["z"]
    assert registry_lookup("beta_binomial").observed_names == ["x"]
    assert registry_lookup("normal_normal").latent_names == ["theta"]
    with pytest.raises(NotFound) as e:
        registry_lookup("nope")
    assert "beta_binomial" in str(e.value)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_declared_sites_match_trace(name):
    entry = REGISTRY[name]
    assert not set(entry.latent_names) & set(entry.observed_names)
    tr = trace_model(entry.build())
    assert set(tr) == set(entry.latent_names) | set(entry.observed_names)


def test_unknown_hyperparameter():
    with pytest.raises(InvalidParams):
        registry_lookup("beta_binomial").build({"m": 3})
