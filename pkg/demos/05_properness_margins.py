"""Properness margins: a Schottky group against the U(1,1) cone.

The properness criterion asks that the Cartan image of the acting group
stay boundedly away from the Cartan cone of the stabilizer subgroup.
At desk scale this becomes a fitted lower envelope on distance-to-cone
margins over a word ball: a strictly positive slope is the properness
signal, and sampling the subgroup itself gives the slope-0 containment
control.
"""

import math

from cartanlab import cartan, inclusion, mu_cone, properness_margin, word_ball

from cartanlab.surrogates import schottky_so22_presentation, so21_boost, u11_boost

# ---------------------------------------------------------------------------
# 1. the two cones in the rank-2 chamber {x1 >= x2 >= 0}
P = schottky_so22_presentation()
group = P.group
cone_u = mu_cone([u11_boost(1.0), u11_boost(2.0)], group)
cone_l = mu_cone([so21_boost(1.0), so21_boost(2.0)], group)
print(f"U(1,1) Cartan ray : {cone_u.rays[0].round(6)}")
print(f"SO(2,1) Cartan ray: {cone_l.rays[0].round(6)}")

# ---------------------------------------------------------------------------
# 2. margins of the Schottky ball against each cone
ball = word_ball(P, inclusion(P), 5)
samples = [cartan(e.element) for e in ball.entries]

rep = properness_margin(samples, cone_u, radius=5)
print(f"\nagainst the U(1,1) cone: fitted slope {rep.slope:.4f} "
      f"(margin >= slope * ||mu|| - {rep.intercept:.3f} on every sample)")
print(f"note: {rep.note}")

control = properness_margin(samples, cone_l, radius=5)
print(f"\ncontainment control (samples on their own cone): "
      f"slope {control.slope:.2e}")

# ---------------------------------------------------------------------------
# 3. the geometry behind the slope: SO(2,1) elements project to (t, 0),
#    the U(1,1) ray is the diagonal, so the margin is ||mu|| / sqrt(2)
worst = max(
    abs(r.margin - r.mu_norm / math.sqrt(2)) for r in rep.rows if r.mu_norm > 0
)
print(f"\nmax |margin - ||mu||/sqrt(2)| over the ball: {worst:.2e}")
