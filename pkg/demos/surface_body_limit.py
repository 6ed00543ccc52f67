"""
Surface bodies and their volume deficit
=======================================

Cut caps of weighted boundary mass ``s`` off a planar body and watch
``deficit / s^2`` settle; the extrapolated limit matches the boundary
integral of ``kappa / g^2``.
"""

import math

from convexdiv import Ellipsoid, f_divergence, limit_estimate, power
from convexdiv.surface_body import curvature_weight_integral, divergence_via_limit

E = Ellipsoid.from_axes([2, 1])
est = limit_estimate(E, 1.0, s0=0.2, halvings=6, m=1024)
for s, scaled in zip(est.s, est.scaled):
    print(f"s = {s:.5f}   c2 * deficit / s^2 = {scaled:.6f}")
print("extrapolated:", est.value, "+/-", est.uncertainty)
print("integral of kappa:", curvature_weight_integral(E, 1.0), "  2 pi =", 2 * math.pi)

###############################################################################
# with the weight g_f the limit recovers the divergence itself
lim = divergence_via_limit(E, power(3))
print("via limit:", lim.value, "  direct:", f_divergence(power(3), E).value)
