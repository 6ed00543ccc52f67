"""
L_p affine surface area of an ellipse
=====================================

Compare the library's value with a direct arc-length integral of
``kappa^(1/3)`` over the boundary.
"""

import math

import numpy as np
from scipy.integrate import quad

from convexdiv import Ellipsoid, lp_asa

a, b = 2.0, 1.0
E = Ellipsoid.from_axes([a, b])


def speed(t):
    return math.hypot(a * math.sin(t), b * math.cos(t))


oracle = quad(lambda t: (a * b / speed(t) ** 3) ** (1 / 3) * speed(t), 0, 2 * math.pi)[0]
print("arc-length integral:", oracle)
print("closed form 2 pi (ab)^(1/3):", 2 * math.pi * (a * b) ** (1 / 3))
print("lp_asa(1):", lp_asa(1, E).value, lp_asa(1, E).flags)

###############################################################################
# the p-family on the disk is 2 pi throughout
for p in np.array([-3.0, -0.5, 0.0, 1.0, 2.0, 10.0]):
    print(f"p = {p:5.1f}: {lp_asa(float(p), Ellipsoid.ball(2)).value:.15f}")
