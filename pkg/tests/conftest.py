import itertools

import numpy as np
import pytest
from scipy.optimize import brentq

from somogsa.problems import eval_rastrigin


@pytest.fixture(scope="session")
def rastrigin_minima():
    """All local minima of 2-d Rastrigin on [-5,5]^2, found independently.

    Rastrigin is separable, so its 2-d local minima are Cartesian products of
    the 1-d stationary points near the integers.  Those are located by root
    finding on the 1-d derivative 2t + 20*pi*sin(2*pi*t) (brentq brackets
    around each integer), which does not go through the package's own
    gradient or descent code.
    """

    def deriv(t):
        return 2.0 * t + 20.0 * np.pi * np.sin(2.0 * np.pi * t)

    roots = []
    for k in range(-5, 6):
        lo, hi = k - 0.35, k + 0.35
        assert deriv(lo) < 0 < deriv(hi)
        roots.append(brentq(deriv, lo, hi, xtol=1e-14))
    points = np.array(list(itertools.product(roots, roots)))
    values = np.array([eval_rastrigin(p) for p in points])
    return points, values


def nearest_minimum(points, x):
    d = np.linalg.norm(points - np.asarray(x, dtype=float), axis=1)
    return points[int(np.argmin(d))]
