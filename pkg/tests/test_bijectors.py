import math

import numpy as np
import pytest

from handlebar import autodiff as ad
from handlebar.bijectors import (
    IDENTITY,
    Affine,
    Chain,
    Exp,
    Invert,
    Sigmoid,
    constraining_transform,
)
from handlebar.errors import DomainError, InvalidParams, Unsupported
from handlebar.support import POSITIVE_REALS, REAL_LINE, UNIT_INTERVAL, integer_range

from conftest import central_difference

REAL_GRID = np.linspace(-6.0, 6.0, 49)
UNIT_GRID = np.linspace(0.02, 0.98, 49)
POS_GRID = np.linspace(0.05, 8.0, 49)

CASES = [
    (Sigmoid(), REAL_GRID),
    (Exp(), REAL_GRID),
    (Affine(2.0, 1.0), REAL_GRID),
    (Affine(-3.0, 0.5), REAL_GRID),
    (Invert(Sigmoid()), UNIT_GRID),
    (Invert(Exp()), POS_GRID),
    (Chain([Affine(2.0, 0.0), Exp()]), REAL_GRID),
    (Chain([Sigmoid(), Affine(0.5, -1.0)]), REAL_GRID),
    (Chain([Invert(Sigmoid()), Sigmoid()]), REAL_GRID),
    (Invert(Invert(Sigmoid())), REAL_GRID),
]


def test_examples():
    assert Sigmoid().forward(0.0) == 0.5
    assert Exp().forward(0.0) == 1.0
    assert Invert(Sigmoid()).forward(0.5) == 0.0
    assert Sigmoid().inverse(0.5) == 0.0
    assert Affine(2.0, 1.0).inverse(5.0) == 2.0
    assert Chain([Affine(2.0, 0.0), Exp()]).inverse(2.0 * math.e) == pytest.approx(1.0, abs=1e-15)
    assert Sigmoid().forward_log_det_jacobian(0.0) == pytest.approx(math.log(0.25), abs=1e-15)
    assert Exp().forward_log_det_jacobian(1.7) == 1.7
    for x in (-2.0, 0.0, 11.0):
        assert Affine(-3.0, 4.0).forward_log_det_jacobian(x) == math.log(3.0)


def test_sigmoid_log_det_matches_finite_difference_at_zero():
    fd = central_difference(Sigmoid().forward, 0.0, h=1e-6)
    assert Sigmoid().forward_log_det_jacobian(0.0) == pytest.approx(math.log(fd), abs=1e-9)
    assert math.log(0.25) == pytest.approx(-1.386294, abs=1e-6)


@pytest.mark.parametrize("b,grid", CASES, ids=repr)
def test_round_trip(b, grid):
    for x in grid:
        assert abs(b.inverse(b.forward(x)) - x) <= 1e-9 * max(1.0, abs(x))


@pytest.mark.parametrize("b,grid", CASES, ids=repr)
def test_log_det_matches_finite_difference(b, grid):
    for x in grid:
        fd = central_difference(b.forward, x)
        assert abs(b.forward_log_det_jacobian(x) - math.log(abs(fd))) <= 1e-5 * max(1.0, abs(math.log(abs(fd))))


@pytest.mark.parametrize("b,grid", CASES, ids=repr)
def test_inverse_log_det_is_negated_forward(b, grid):
    for x in grid:
        y = b.forward(x)
        assert b.inverse_log_det_jacobian(y) == pytest.approx(-b.forward_log_det_jacobian(x), abs=1e-9)


@pytest.mark.parametrize("b,grid", CASES, ids=repr)
def test_invert_laws(b, grid):
    inv = Invert(b)
    twice = Invert(inv)
    for x in grid:
        y = b.forward(x)
        assert inv.forward(y) == b.inverse(y)
        assert inv.forward_log_det_jacobian(y) == pytest.approx(-b.forward_log_det_jacobian(b.inverse(y)), abs=1e-12)
        assert twice.forward(x) == b.forward(x)
        assert twice.forward_log_det_jacobian(x) == pytest.approx(b.forward_log_det_jacobian(x), abs=1e-12)


def test_chain_log_det_is_sum_at_propagated_points():
    parts = [Affine(0.5, -1.0), Exp(), Affine(2.0, 0.3)]
    chain = Chain(parts)
    for x in REAL_GRID[::4]:
        total, point = 0.0, x
        for b in reversed(parts):
            total += b.forward_log_det_jacobian(point)
            point = b.forward(point)
        assert abs(chain.forward_log_det_jacobian(x) - total) <= 1e-9
        assert chain.forward(x) == point


def test_sigmoid_log_det_does_not_overflow():
    for x in (-50.0, -35.0, 35.0, 50.0, 700.0):
        v = Sigmoid().forward_log_det_jacobian(x)
        assert math.isfinite(v)
        assert v == pytest.approx(-abs(x), rel=1e-6)


def test_domain_errors():
    for y in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            Invert(Sigmoid()).forward(y)
    with pytest.raises(DomainError):
        Exp().inverse(0.0)
    with pytest.raises(InvalidParams):
        Affine(0.0, 1.0)


def test_duals_propagate():
    g = ad.gradient(lambda v: Sigmoid().forward(v[0]), [0.0])
    assert g == [0.25]
    g = ad.gradient(lambda v: Invert(Sigmoid()).forward(v[0]), [0.5])
    assert g[0] == pytest.approx(4.0)


def test_constraining_transform():
    assert constraining_transform(UNIT_INTERVAL) == Sigmoid()
    assert constraining_transform(POSITIVE_REALS) == Exp()
    assert constraining_transform(REAL_LINE) == IDENTITY == Affine(1.0, 0.0)
    with pytest.raises(Unsupported):
        constraining_transform(integer_range(10))


def test_images():
    assert Invert(Sigmoid()).image(UNIT_INTERVAL) == REAL_LINE
    assert Invert(Exp()).image(POSITIVE_REALS) == REAL_LINE
    assert Sigmoid().image(REAL_LINE) == UNIT_INTERVAL
    assert Chain([Sigmoid(), Invert(Sigmoid())]).image(UNIT_INTERVAL) == UNIT_INTERVAL
