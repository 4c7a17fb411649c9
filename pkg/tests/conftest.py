import math

import pytest


def central_difference(f, x, h=None):
    h = 1e-6 * max(1.0, abs(x)) if h is None else h
    return (f(x + h) - f(x - h)) / (2.0 * h)


def rel_err(a, b):
    return abs(a - b) / max(1.0, abs(b))


@pytest.fixture
def fd():
    return central_difference


LOG_EVIDENCE_BB10 = math.log(1.0 / 11.0)
