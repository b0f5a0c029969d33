"""Test-only helpers: random element generators, plus re-exports of the
shipped surrogate constructors."""

from fractions import Fraction as F

import numpy as np

import cartanlab.exact as ex
from cartanlab import GroupElement
from cartanlab.surrogates import (  # noqa: F401  (re-exported for tests)
    boost_Y_so22,
    schottky_sl2_matrices,
    schottky_sl2_presentation,
    schottky_so22_presentation,
    so21_boost,
    so21_in_so22,
    sym2_rational,
    u11_boost,
)


def random_sl_element(rng, n, group):
    """Well-scaled random SL(n, R) element (float)."""
    m = rng.standard_normal((n, n))
    d = np.linalg.det(m)
    if d < 0:
        m[0] *= -1.0
        d = -d
    m = m / d ** (1.0 / n)
    return GroupElement(m, group, check=False)


def random_sl2_padic(rng, p, group, steps=4):
    """Random exact element of SL_2(Q_p) as a product of elementaries."""
    m = ex.identity(2)
    for _ in range(steps):
        kind = rng.integers(0, 3)
        if kind == 0:
            x = F(int(rng.integers(-8, 9)), int(rng.integers(1, 5)))
            e = ex.mat_from_rows([[1, x], [0, 1]])
        elif kind == 1:
            x = F(int(rng.integers(-8, 9)), int(rng.integers(1, 5)))
            e = ex.mat_from_rows([[1, 0], [x, 1]])
        else:
            k = int(rng.integers(-2, 3))
            e = ex.mat_from_rows([[F(p) ** k, 0], [0, F(p) ** (-k)]])
        m = ex.mat_mul(m, e)
    return GroupElement(m, group, check=False)
