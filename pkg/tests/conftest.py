import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def central_diff_jets(fn, points, h=1e-4):
    """FD oracle for (value, grad, pure second) of a scalar field.

    ``fn`` maps an (P, d) array to (P,) values.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    p, d = pts.shape
    value = fn(pts)
    grad = np.empty((p, d))
    second = np.empty((p, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        up, dn = fn(pts + e), fn(pts - e)
        grad[:, i] = (up - dn) / (2.0 * h)
        second[:, i] = (up - 2.0 * value + dn) / (h * h)
    return value, grad, second


def rel_err(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = max(float(np.max(np.abs(b))), 1.0)
    return float(np.max(np.abs(a - b))) / scale
