"""
Flat flows and a small linear wave
==================================

Axis velocities of a flow without a wave give back a flat surface.  Axis
velocities of a small linear wave give back a cosine profile whose error
shrinks with the square of the amplitude.
"""

import numpy as np

from crestline import forward, recover
from crestline.forward import PhysParams

TWO_PI = 2 * np.pi

# still water and a linear shear current under a flat surface
for name, U, c, gamma in [("still", 0.0, 1.0, 0.0), ("shear", lambda y: y + 1.0, 2.0, 1.0)]:
    ff = forward.laminar_flow(U, PhysParams(d=1.0, c=c, lam=TWO_PI))
    axis = forward.extract_axis_data(ff, 0.0)
    rc = recover.recover_wave(axis, gamma)
    print(f"{name:6s} status {rc.status:9s} p0 {rc.p0:+.12f} sup|eta| {np.max(np.abs(rc.eta)):.1e}")

# the linear wave is only accurate to second order in eps, so is the round trip
print()
for eps in (0.01, 0.003):
    lw = forward.linear_wave(eps, PhysParams(d=1.0, c=1.0, lam=TWO_PI), ns=65)
    rc = recover.recover_wave(forward.extract_axis_data(lw, 0.0), 0.0)
    err = np.max(np.abs(rc.eta - eps * np.cos(rc.x)))
    print(f"eps {eps:5.3f}  status {rc.status}  trusted |q| <= {rc.q_trusted:.3f}  error {err:.2e}  error/eps^2 {err / eps**2:.2f}")
    print(f"           {rc.note}")
