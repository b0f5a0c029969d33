"""Cartan projections over R and Q_p, and the inequalities they satisfy.

The Cartan projection mu(g) is the chamber-valued polar part of g: over
the reals it lists the log singular values, over Q_p the invariant
factor data of the matrix.  This script walks through the basic values
and then spot-checks the subadditivity and Lipschitz inequalities on
random elements.
"""

import math
from fractions import Fraction as F

import numpy as np

from cartanlab import (
    REAL,
    GroupElement,
    cartan,
    mu_norm,
    padic,
    special_linear,
    wedge_norm_log,
    weight_pairing,
)

# ---------------------------------------------------------------------------
# 1. the real case: log singular values
sl2 = special_linear(2, REAL)

for label, mat in [
    ("identity", [[F(1), 0], [0, F(1)]]),
    ("diag(2, 1/2)", [[F(2), 0], [0, F(1, 2)]]),
    ("unipotent [[1,1],[0,1]]", [[F(1), F(1)], [0, F(1)]]),
]:
    g = GroupElement(mat, sl2)
    mu = cartan(g)
    print(f"{label:28s} mu = {tuple(round(x, 6) for x in mu.coords)}"
          f"   ||mu|| = {mu_norm(mu):.6f}")

print(f"\nfor the unipotent, mu_1 = log golden ratio = "
      f"{math.log((1 + math.sqrt(5)) / 2):.6f}")

# ---------------------------------------------------------------------------
# 2. the p-adic case: exact integers from invariant factors
sl2q3 = special_linear(2, padic(3))
g = GroupElement([[F(3), 0], [0, F(1, 3)]], sl2q3)
print(f"\nover Q_3: mu(diag(3, 1/3)) = {cartan(g).coords} (exact integers)")
g = GroupElement([[F(1), F(1)], [F(3), F(4)]], sl2q3)
print(f"          mu([[1,1],[3,4]]) = {cartan(g).coords} (an integral unit)")

# ---------------------------------------------------------------------------
# 3. the wedge-power norm identity: the operator norm of the compound
#    matrix of k x k minors equals the weight pairing with mu
sl3 = special_linear(3, REAL)
rng = np.random.default_rng(0)
m = rng.standard_normal((3, 3))
m /= np.linalg.det(m) ** (1 / 3)
g = GroupElement(m, sl3, check=False)
mu = cartan(g)
for i0 in (1, 2):
    lhs = wedge_norm_log(g, i0)
    rhs = weight_pairing(i0, mu)
    print(f"\nwedge power {i0}: log||compound|| = {lhs:.12f}")
    print(f"                 <chi_{i0}, mu(g)>  = {rhs:.12f}")

# ---------------------------------------------------------------------------
# 4. subadditivity and the Lipschitz bounds on random pairs
worst = 0.0
for _ in range(2000):
    a = rng.standard_normal((3, 3))
    a /= np.sign(np.linalg.det(a)) * abs(np.linalg.det(a)) ** (1 / 3)
    b = rng.standard_normal((3, 3))
    b /= np.sign(np.linalg.det(b)) * abs(np.linalg.det(b)) ** (1 / 3)
    ga, gb = GroupElement(a, sl3, check=False), GroupElement(b, sl3, check=False)
    va = np.asarray(cartan(ga).coords)
    vb = np.asarray(cartan(gb).coords)
    vab = np.asarray(cartan(ga @ gb).coords)
    worst = max(
        worst,
        np.linalg.norm(vab) - np.linalg.norm(va) - np.linalg.norm(vb),
        np.linalg.norm(vab - vb) - np.linalg.norm(va),
        np.linalg.norm(vab - va) - np.linalg.norm(vb),
    )
print(f"\nworst inequality slack over 2000 random pairs: {worst:.2e} "
      "(nonpositive up to rounding)")
