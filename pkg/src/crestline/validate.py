"""Residuals of the three equivalent formulations and profile metrics.

Each validator returns a :class:`ResidualReport`.  Every residual grid comes
with a scale built from the magnitudes of the terms that enter it, so a
scaled norm of 1e-6 means the relation holds to six digits relative to the
size of its own terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import grids
from .errors import InvalidInputError
from .forward import FlowField, HeightField, streamfunction
from .funcrep import FuncP


@dataclass(frozen=True, eq=False)
class ResidualReport:
    kind: str
    residuals: dict
    scales: dict
    margins: dict
    tol: float
    inf: dict = field(init=False)
    l2: dict = field(init=False)
    scaled: dict = field(init=False)

    def __post_init__(self):
        inf, l2, scaled = {}, {}, {}
        for name, r in self.residuals.items():
            r = np.asarray(r, dtype=float)
            inf[name] = float(np.max(np.abs(r))) if r.size else 0.0
            l2[name] = float(np.sqrt(np.mean(r**2))) if r.size else 0.0
            scaled[name] = inf[name] / self.scales[name]
        object.__setattr__(self, "inf", inf)
        object.__setattr__(self, "l2", l2)
        object.__setattr__(self, "scaled", scaled)

    @property
    def worst(self) -> float:
        return max(self.scaled.values()) if self.scaled else 0.0

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol and all(m > 0 for m in self.margins.values())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "tolerance": self.tol,
            "passed": self.passed,
            "norms": {
                k: {"inf": self.inf[k], "l2": self.l2[k], "scale": self.scales[k], "scaled": self.scaled[k]}
                for k in self.residuals
            },
            "margins": dict(self.margins),
        }


def _scale(*terms, floor: float) -> float:
    s = max(float(np.max(np.abs(t))) for t in terms)
    return max(s, floor, np.finfo(float).tiny)


def euler_residual(ff: FlowField, tol: float = 1e-6) -> ResidualReport:
    """Momentum, continuity and the three boundary relations of steady Euler flow."""
    if ff.x.size < 8:
        raise InvalidInputError("need at least 8 columns per period")
    prm = ff.params
    w = ff.u - prm.c
    ux, uy = ff.d_dx(ff.u), ff.d_dy(ff.u)
    vx, vy = ff.d_dx(ff.v), ff.d_dy(ff.v)
    Px, Py = ff.d_dx(ff.P), ff.d_dy(ff.P)
    eta_x = grids.derivative(ff.eta, ff.x, ff.x_kind, period=prm.lam)
    vel = max(float(np.max(np.abs(w))), 1e-300)
    acc = prm.g
    res = {
        "momentum_x": w * ux + ff.v * uy + Px,
        "momentum_y": w * vx + ff.v * vy + Py + prm.g,
        "continuity": ux + vy,
        "kinematic": ff.v[:, -1] - w[:, -1] * eta_x,
        "surface_pressure": ff.P[:, -1] - prm.P0,
        "bed": ff.v[:, 0],
    }
    scales = {
        "momentum_x": _scale(w * ux, ff.v * uy, Px, floor=acc),
        "momentum_y": _scale(w * vx, ff.v * vy, Py, floor=acc),
        "continuity": _scale(ux, vy, floor=vel / prm.d),
        "kinematic": _scale(ff.v[:, -1], w[:, -1] * eta_x, floor=vel),
        "surface_pressure": 1.0 + abs(prm.P0) + prm.g * prm.d,
        "bed": vel,
    }
    margins = {"c_minus_u": float(np.min(-w))}
    return ResidualReport("euler", res, scales, margins, tol)


def stream_residual(ff: FlowField, gamma: FuncP, Q: float, tol: float = 1e-6) -> ResidualReport:
    """Vorticity equation and boundary data for the streamfunction rebuilt from ``ff``."""
    prm = ff.params
    pvals, p0 = streamfunction(ff)
    psi = -pvals
    lap = ff.d_dx(ff.d_dx(psi)) + ff.d_dy(ff.d_dy(psi))
    rhs = gamma(np.clip(pvals, gamma.p0, 0.0))
    psi_y = ff.d_dy(psi)
    psi_x = ff.d_dx(psi)
    top = slice(None), -1
    bern = psi_x[top] ** 2 + psi_y[top] ** 2 + 2.0 * prm.g * (ff.y[top] + prm.d) - Q
    vel = max(float(np.max(np.abs(ff.u - prm.c))), 1e-300)
    res = {
        "vorticity": lap - rhs,
        "bernoulli": bern,
        "surface_psi": psi[top],
        "bed_psi": psi[:, 0] + p0,
    }
    scales = {
        "vorticity": _scale(lap, rhs, floor=vel / prm.d),
        "bernoulli": max(abs(Q), 1e-300),
        "surface_psi": abs(p0),
        "bed_psi": abs(p0),
    }
    margins = {"minus_psi_y": float(np.min(-psi_y))}
    return ResidualReport("stream", res, scales, margins, tol)


def height_eq_residual(hf: HeightField, tol: float = 1e-6) -> ResidualReport:
    """Interior equation, surface relation and bed condition of the height function."""
    d = hf.derivatives()
    hq, hp, hqq, hpp, hpq = d["hq"], d["hp"], d["hqq"], d["hpp"], d["hpq"]
    G = hf.gamma(hf.p)[None, :]
    t = [(1 + hq**2) * hpp, -2 * hp * hq * hpq, hp**2 * hqq, -G * hp**3]
    pde = t[0] + t[1] + t[2] + t[3]
    inner = slice(None), slice(1, -1)
    surf = 1 + hq[:, -1] ** 2 + (2 * hf.g * hf.h[:, -1] - hf.Q) * hp[:, -1] ** 2
    href = float(np.max(np.abs(hf.h)))
    res = {"interior": pde[inner], "surface": surf, "bed": hf.h[:, 0]}
    scales = {
        "interior": _scale(*(x[inner] for x in t), floor=href / hf.p0**2),
        "surface": _scale(np.ones(1), hq[:, -1] ** 2, 2 * hf.g * hf.h[:, -1] * hp[:, -1] ** 2, hf.Q * hp[:, -1] ** 2, floor=1.0),
        "bed": max(href, 1e-300),
    }
    margins = {"min_h_p": float(np.min(hp))}
    return ResidualReport("height", res, scales, margins, tol)


# ---------------------------------------------------------------- profiles


def _open_period(x, eta, period):
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if x.size != eta.size or x.size < 4:
        raise InvalidInputError("profile needs at least four (x, eta) samples")
    if abs(x[-1] - x[0] - period) <= 1e-9 * period:
        x, eta = x[:-1], eta[:-1]
    h = np.diff(x)
    if np.any(np.abs(h - period / x.size) > 1e-8 * period):
        raise InvalidInputError("profile samples must be uniform over one period")
    return x, eta


def compare_profiles(x1, eta1, x2, eta2, period: float, period2: float | None = None) -> dict:
    """Sup, L2 and phase-aligned sup differences of two periodic profiles.

    Profiles may be sampled on different uniform grids; both are resampled
    by trigonometric interpolation onto the finer one, anchored at x = 0.
    """
    if period2 is not None and abs(period2 - period) > 1e-9 * period:
        raise InvalidInputError(f"periods differ: {period} vs {period2}")
    if not period > 0:
        raise InvalidInputError("period must be positive")
    x1, e1 = _open_period(x1, eta1, period)
    x2, e2 = _open_period(x2, eta2, period)
    e1 = grids.trig_shift(e1, x1[0], period)
    e2 = grids.trig_shift(e2, x2[0], period)
    m = max(e1.size, e2.size)
    a = grids.trig_resample(e1, m) if e1.size != m else e1
    b = grids.trig_resample(e2, m) if e2.size != m else e2
    diff = a - b
    sup = float(np.max(np.abs(diff)))
    l2 = float(np.sqrt(np.mean(diff**2) * period))

    def misfit(delta):
        return float(np.mean((a - grids.trig_shift(b, delta, period)) ** 2))

    trial = np.linspace(-period / 2.0, period / 2.0, 4 * m + 1)
    best = trial[int(np.argmin([misfit(t) for t in trial]))]
    step = period / (4 * m)
    opt = minimize_scalar(misfit, bounds=(best - step, best + step), method="bounded", options={"xatol": 1e-14 * period})
    shift = float(opt.x) if opt.fun <= misfit(best) else float(best)
    if misfit(0.0) <= misfit(shift):
        shift = 0.0
    aligned = sup if shift == 0.0 else float(np.max(np.abs(a - grids.trig_shift(b, shift, period))))
    return {"sup": sup, "l2": l2, "aligned_sup": aligned, "shift": shift, "samples": m}
