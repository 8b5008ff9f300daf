"""
How far the series can be trusted
=================================

The recovered height is a power series in the horizontal coordinate about
the crest line.  Its coefficients give a root-test radius; the trusted
half-width is the smaller of half that radius and the width where the top
term and its curvature are negligible.

Linear theory is not an exact wave, so the residuals inside the disk sit at
the size of the neglected second-order terms, about eps^2 / 2 here.
"""

import numpy as np

from crestline import forward, recover, validate
from crestline.forward import PhysParams

lw = forward.linear_wave(0.01, PhysParams(d=1.0, c=1.0, lam=2 * np.pi), ns=65)
axis = forward.extract_axis_data(lw, 0.0)
rc = recover.recover_wave(axis, 0.0, extension="none")

print("root-test ratios |a_m|^(1/m):", ", ".join(f"{r:.3f}" for r in rc.radius.ratios[1::2]))
print(f"root-test limit L = {rc.radius.L:.4f}, q_trust from the radius {rc.radius.q_trust:.3f}")
print(f"trusted half-width {rc.q_trusted:.3f} against half a wavelength {np.pi:.3f}: status {rc.status}")

for frac in (0.5, 1.0):
    hf = rc.disk_height(width=frac * rc.q_trusted)
    ff = forward.flow_from_height(hf, rc.flow.params)
    print(
        f"|q| <= {frac:.1f} q_trusted: height {validate.height_eq_residual(hf).worst:.1e}, "
        f"euler {validate.euler_residual(ff).worst:.1e}"
    )

# beyond the trusted width the tail grows and summation is refused
try:
    recover.sum_series(rc.table, 3.0, 0.0)
except Exception as exc:
    print(f"q = 3: {type(exc).__name__}: {exc}")
