"""
Ellipses, polygons and the jump between them
=============================================

Cone-measure divergences pin ellipses to ``f(1)`` and polytopes to
``f(0)``. Fine polygons get close to the disk in shape, yet their
divergence stays put.
"""

import math

from convexdiv import Ellipsoid, Polytope, SmoothBody2D, f_divergence, kl, power

# every centred ellipse sits at f(1), whatever the axes
for axes in [(1, 1), (2, 1), (5, 0.2)]:
    E = Ellipsoid.from_axes(axes)
    r = f_divergence(power(2), E)
    q = f_divergence(power(2), E, force_quadrature=True)
    print(f"ellipse {axes}: exact {r.value}, quadrature {q.value:.15f}")

# a bumpy body is strictly above
K = SmoothBody2D.from_fourier(1.0, cos=[0.0, 0.0, 0.1])
print("trefoil-ish body:", f_divergence(power(2), K).value)

###############################################################################
# Polygons: the cone measures are mutually singular, so D = f(0)
for k in (8, 64, 512):
    P = Polytope.regular_polygon(k)
    print(f"{k:4d}-gon  t^2: {f_divergence(power(2), P).value}  "
          f"kl reverse: {f_divergence(kl(), P, 'qp').value}")

print("disk t^2:", f_divergence(power(2), Ellipsoid.ball(2)).value)
print("area gap of the 512-gon:", math.pi - Polytope.regular_polygon(512).volume)
