"""Forward problem: laminar flows, the small-amplitude oracle and the
finite-difference Newton solver for the height function.

The height function ``h(q, p)`` lives on the strip ``p0 <= p <= 0``, with
``q`` periodic of period ``lam``.  It obeys

    (1 + h_q^2) h_pp - 2 h_p h_q h_pq + h_p^2 h_qq - gamma(p) h_p^3 = 0
    1 + h_q^2 + (2 g h - Q) h_p^2 = 0          on p = 0
    h = 0                                       on p = p0

with ``h_p > 0`` throughout.  Density is 1 everywhere in this package.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, minimize_scalar

from . import funcrep, grids
from .errors import (
    AdmissibilityError,
    InvalidInputError,
    LeftAdmissibleSetError,
    NonconvergenceError,
)
from .funcrep import FuncP

G_DEFAULT = 9.81


@dataclass(frozen=True)
class PhysParams:
    d: float
    c: float
    lam: float
    g: float = G_DEFAULT
    P0: float = 0.0

    def __post_init__(self):
        for name in ("d", "c", "lam", "g"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidInputError(f"{name} must be positive and finite, got {v}")
        if not np.isfinite(self.P0):
            raise InvalidInputError("P0 must be finite")

    @property
    def k(self) -> float:
        return 2.0 * np.pi / self.lam


@dataclass(frozen=True, eq=False)
class FlowField:
    """Velocity and pressure on a terrain-following grid.

    Column ``i`` sits at ``x[i]``; ``s`` runs from 0 (bed) to 1 (surface) and
    ``y[i, j]`` is the physical height of node ``(i, j)`` above ``y = 0``.
    """

    params: PhysParams
    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    P: np.ndarray
    eta: np.ndarray
    x_kind: str = "fourier"
    s_kind: str = "chebyshev"

    def d_s(self, f):
        return grids.derivative(f, self.s, self.s_kind, axis=1)

    def d_x_at_s(self, f):
        return grids.derivative(f, self.x, self.x_kind, axis=0, period=self.params.lam)

    def d_dy(self, f):
        return self.d_s(f) / self.d_s(self.y)

    def d_dx(self, f):
        """x-derivative at fixed y via the chain rule."""
        return self.d_x_at_s(f) - self.d_dy(f) * self.d_x_at_s(self.y)

    def column_index(self, x0: float) -> int | None:
        hit = np.flatnonzero(np.isclose(self.x, x0, rtol=0.0, atol=1e-12 * self.params.lam))
        return int(hit[0]) if hit.size else None


@dataclass(frozen=True, eq=False)
class HeightField:
    p0: float
    q: np.ndarray
    p: np.ndarray
    h: np.ndarray
    gamma: FuncP
    Q: float
    lam: float
    g: float = G_DEFAULT
    q_kind: str = "periodic-fd"
    p_kind: str = "uniform"
    info: dict = field(default_factory=dict)

    def derivatives(self) -> dict:
        d_q = lambda f: grids.derivative(f, self.q, self.q_kind, axis=0, period=self.lam)
        d_p = lambda f: grids.derivative(f, self.p, self.p_kind, axis=1)
        hp = d_p(self.h)
        return {
            "hq": d_q(self.h),
            "hp": hp,
            "hqq": grids.second_derivative(self.h, self.q, self.q_kind, axis=0, period=self.lam),
            "hpp": grids.second_derivative(self.h, self.p, self.p_kind, axis=1),
            "hpq": d_q(hp),
        }

    def mean_depth(self) -> float:
        return float(np.mean(self.h[:, -1]))


def _as_funcp(gamma, p0: float) -> FuncP:
    if isinstance(gamma, FuncP):
        if abs(gamma.p0 - p0) > 1e-12 * abs(p0):
            raise InvalidInputError(f"gamma is defined on [{gamma.p0}, 0], expected [{p0}, 0]")
        return gamma
    if callable(gamma):
        return funcrep.chop(funcrep.from_function(gamma, p0, funcrep.M_DEFAULT))
    return funcrep.constant(float(gamma), p0)


# ---------------------------------------------------------------- laminar


def laminar_flow(U, params: PhysParams, nx: int = 16, ns: int = 33) -> FlowField:
    """Shear flow ``u = U(y)`` under a flat surface; hydrostatic pressure."""
    Uf = U if callable(U) else (lambda y, _u=float(U): np.full_like(np.asarray(y, float), _u))
    d, c = params.d, params.c
    probe = np.linspace(-d, 0.0, 2001)
    if np.max(Uf(probe)) >= c:
        raise AdmissibilityError(f"sup U = {np.max(Uf(probe)):.6g} is not below c = {c:.6g}")
    x = np.arange(nx) * params.lam / nx
    s = 0.5 - 0.5 * np.cos(np.pi * np.arange(ns) / (ns - 1))
    y = np.broadcast_to(-d + s * d, (nx, ns)).copy()
    u = np.asarray(Uf(y), dtype=float) * np.ones_like(y)
    return FlowField(params, x, s, y, u, np.zeros_like(y), params.P0 - params.g * y, np.zeros(nx))


def _laminar_head(gam: FuncP, p0: float, g: float):
    """Head ``Q(t)`` as a function of ``t = log(s0 - s_min)`` and its minimiser."""
    A = funcrep.antiderivative(gam)
    G = funcrep.constant(A(0.0), p0) - A
    s_min = max(0.0, float(np.max(-2.0 * G(funcrep.p_nodes(p0, 256)))))

    def depth(s0):
        # near s_min the integrand is almost singular and quad reports roundoff
        # at the 1e-12 level; that only affects the ends of the search bracket
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda t: (s0 + 2.0 * G(t)) ** -0.5, p0, 0.0, limit=200, epsabs=1e-14, epsrel=1e-13)
        return val

    scale = max(1.0, s_min, 2.0 * g * abs(p0) ** (2.0 / 3.0))
    F = lambda t: s_min + np.exp(t) + 2.0 * g * depth(s_min + np.exp(t))
    lo, hi = np.log(1e-10 * scale), np.log(1e4 * scale)
    opt = minimize_scalar(F, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return G, s_min, F, (lo, float(opt.x), hi), float(opt.fun)


def laminar_height(gamma, Q: float, p0: float, g: float = G_DEFAULT, degree: int = 64):
    """Subcritical laminar height profile ``h(p)`` for given ``(gamma, Q, p0)``.

    With ``s0 = 1/h_p(0)^2`` one has ``1/h_p^2 = s0 + 2 G(p)`` where
    ``G(p)`` integrates gamma from p to 0, and the surface condition reads
    ``Q = s0 + 2 g h(0)``.  Of the two roots in ``s0`` the smaller (deeper,
    slower) one is returned.  Raises NonconvergenceError when Q lies below the
    minimum head ``Q_min`` for which a laminar flow exists.

    Returns ``(h, s0, Q_min)`` with ``h`` a FuncP.
    """
    gam = _as_funcp(gamma, p0)
    G, s_min, F, (lo, tmin, hi), Q_min = _laminar_head(gam, p0, g)
    if Q < Q_min:
        raise NonconvergenceError(f"no laminar flow: Q = {Q:.6g} is below Q_min = {Q_min:.6g}")
    if F(lo) > Q:
        t = brentq(lambda t: F(t) - Q, lo, tmin, xtol=1e-14)
    else:
        t = brentq(lambda t: F(t) - Q, tmin, hi, xtol=1e-14)
    return _profile(G, p0, s_min + float(np.exp(t)), degree), s_min + float(np.exp(t)), Q_min


def _profile(G: FuncP, p0: float, s0: float, degree: int) -> FuncP:
    integrand = funcrep.pointwise(G, lambda v: (s0 + 2.0 * v) ** -0.5, degree=degree)
    return funcrep.FuncP(p0, funcrep.antiderivative(integrand).coef, "analytic")


# ---------------------------------------------------------------- linear oracle


def dispersion_speed(g: float, d: float, lam: float) -> float:
    k = 2.0 * np.pi / lam
    return float(np.sqrt(g * np.tanh(k * d) / k))


def linear_constants(eps: float, params: PhysParams) -> tuple[float, float, float]:
    """(c, p0, Q) of the small-amplitude wave, measured on the crest line."""
    k, d, g = params.k, params.d, params.g
    c = dispersion_speed(g, d, params.lam)
    p0 = -c * (d + eps) + eps * c * np.sinh(k * (d + eps)) / np.sinh(k * d)
    u_top = eps * c * k * np.cosh(k * (d + eps)) / np.sinh(k * d)
    return c, float(p0), float((c - u_top) ** 2 + 2.0 * g * (d + eps))


def linear_wave(eps: float, params: PhysParams, nx: int = 64, ns: int = 33) -> FlowField:
    """Small-amplitude irrotational wave of amplitude ``eps`` with crest at x = 0.

    ``params.c`` is replaced by the dispersion-relation speed.
    """
    if not np.isfinite(eps) or eps < 0:
        raise InvalidInputError(f"amplitude must be non-negative, got {eps}")
    c = dispersion_speed(params.g, params.d, params.lam)
    prm = replace(params, c=c)
    k, d = prm.k, prm.d
    x = np.arange(nx) * prm.lam / nx
    s = 0.5 - 0.5 * np.cos(np.pi * np.arange(ns) / (ns - 1))
    eta = eps * np.cos(k * x)
    y = -d + s[None, :] * (d + eta[:, None])
    amp = eps * c * k / np.sinh(k * d)
    u = amp * np.cosh(k * (y + d)) * np.cos(k * x)[:, None]
    v = amp * np.sinh(k * (y + d)) * np.sin(k * x)[:, None]
    # Bernoulli with the (exactly potential) linear velocities
    P = prm.P0 - prm.g * y + c * u - 0.5 * (u**2 + v**2)
    return FlowField(prm, x, s, y, u, v, P, eta)


# ---------------------------------------------------------------- Newton solver


def _fd_operators(nq: int, npi: int, dq: float, dp: float) -> dict:
    e = np.ones(nq)
    Dq = sp.diags([-e[:-1], e[:-1]], [-1, 1], shape=(nq, nq)).tolil()
    Dq[0, nq - 1], Dq[nq - 1, 0] = -1.0, 1.0
    Dq = Dq.tocsr() / (2.0 * dq)
    Dqq = sp.diags([e[:-1], -2.0 * e, e[:-1]], [-1, 0, 1], shape=(nq, nq)).tolil()
    Dqq[0, nq - 1], Dqq[nq - 1, 0] = 1.0, 1.0
    Dqq = Dqq.tocsr() / dq**2
    m = npi + 1
    f = np.ones(m)
    Dp = sp.diags([-f[:-1], f[:-1]], [-1, 1], shape=(m, m)).tolil()
    Dp[0, :3] = [-3.0, 4.0, -1.0]
    Dp[m - 1, m - 3 :] = [1.0, -4.0, 3.0]
    Dp = Dp.tocsr() / (2.0 * dp)
    Dpp = sp.diags([f[:-1], -2.0 * f, f[:-1]], [-1, 0, 1], shape=(m, m)).tocsr() / dp**2
    Iq, Ip = sp.identity(nq), sp.identity(m)
    return {
        "q": sp.kron(Dq, Ip).tocsr(),
        "qq": sp.kron(Dqq, Ip).tocsr(),
        "p": sp.kron(Iq, Dp).tocsr(),
        "pp": sp.kron(Iq, Dpp).tocsr(),
        "pq": sp.kron(Dq, Dp).tocsr(),
    }


def wave_initial_guess(hlam: FuncP, q, p, lam: float, amplitude: float) -> np.ndarray:
    """Laminar profile plus the linear-mode perturbation ``amplitude cos(kq)``."""
    k = 2.0 * np.pi / lam
    hl = hlam(np.asarray(p))
    d = hl[-1]
    return hl[None, :] + amplitude * (np.sinh(k * hl) / np.sinh(k * d))[None, :] * np.cos(k * np.asarray(q))[:, None]


def solve_height_equation(
    gamma,
    Q: float,
    p0: float,
    lam: float,
    nq: int = 64,
    npi: int = 32,
    h_init: np.ndarray | None = None,
    *,
    g: float = G_DEFAULT,
    wave_height: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 60,
    stall_limit: int = 5,
    symmetric: bool = True,
) -> HeightField:
    """Damped Newton for the second-order finite-difference discretization.

    Unknowns are ``h`` at ``p > p0`` on the grid ``q_i = i lam/nq``,
    ``p_j = p0 + j |p0|/npi``.  With ``wave_height`` set, the crest-to-trough
    height ``h(0,0) - h(lam/2,0)`` is imposed and ``Q`` becomes an unknown
    started from the given value.

    With ``symmetric`` every iterate is projected onto fields even about
    q = 0.  Near the laminar bifurcation the Jacobian is almost singular in
    the odd translation mode, and rounding alone would shift the crest.
    """
    if nq < 8 or npi < 8:
        raise InvalidInputError("grid must be at least 8 x 8")
    if not (p0 < 0 and lam > 0 and np.isfinite(Q)):
        raise InvalidInputError("need p0 < 0, lam > 0 and finite Q")
    if wave_height is not None and nq % 2:
        raise InvalidInputError("an imposed wave height needs an even number of q points")
    gam = _as_funcp(gamma, p0)
    m = npi + 1
    q = np.arange(nq) * lam / nq
    p = p0 + np.arange(m) * (-p0) / npi
    p[-1] = 0.0
    if h_init is None:
        try:
            hl, _, _ = laminar_height(gam, Q, p0, g)
        except NonconvergenceError:
            # below the laminar threshold: start from the critical profile and let Newton report
            hl = _critical_profile(gam, p0, g)
        H0 = np.broadcast_to(hl(p), (nq, m)).copy()
    else:
        H0 = np.array(h_init, dtype=float)
        if H0.shape != (nq, m):
            raise InvalidInputError(f"initial guess has shape {H0.shape}, expected {(nq, m)}")
    H0[:, 0] = 0.0
    mirror = (-np.arange(nq)) % nq
    even = (lambda A: 0.5 * (A + A.reshape(nq, m)[mirror].ravel())) if symmetric else (lambda A: A)
    H0 = even(H0.ravel()).reshape(nq, m)
    O = _fd_operators(nq, npi, lam / nq, -p0 / npi)
    if np.min(O["p"] @ H0.ravel()) <= 0:
        raise AdmissibilityError("initial guess violates h_p > 0")

    jj = np.tile(np.arange(m), nq)
    Gv = gam(np.tile(p, nq))
    unk = np.flatnonzero(jj > 0)
    is_surf = jj == npi
    surf = np.flatnonzero(is_surf)
    extra = wave_height is not None

    def resid(H, Qv):
        hq, hp, hqq, hpp, hpq = (O[key] @ H for key in ("q", "p", "qq", "pp", "pq"))
        Ri = (1 + hq**2) * hpp - 2 * hp * hq * hpq + hp**2 * hqq - Gv * hp**3
        Rs = 1 + hq**2 + (2 * g * H - Qv) * hp**2
        R = np.where(is_surf, Rs, Ri)[unk]
        if extra:
            R = np.append(R, H[surf[0]] - H[surf[nq // 2]] - wave_height)
        return R, (hq, hp, hqq, hpp, hpq)

    def jac(H, Qv, dv):
        hq, hp, hqq, hpp, hpq = dv
        D = sp.diags
        Ji = (
            D(2 * hq * hpp - 2 * hp * hpq) @ O["q"]
            + D(-2 * hq * hpq + 2 * hp * hqq - 3 * Gv * hp**2) @ O["p"]
            + D(1 + hq**2) @ O["pp"]
            + D(hp**2) @ O["qq"]
            + D(-2 * hp * hq) @ O["pq"]
        )
        Js = D(2 * hq) @ O["q"] + D(2 * (2 * g * H - Qv) * hp) @ O["p"] + D(2 * g * hp**2)
        w = is_surf.astype(float)
        J = (D(1 - w) @ Ji + D(w) @ Js).tocsr()[unk][:, unk]
        if extra:
            col = np.zeros(unk.size)
            col[np.searchsorted(unk, surf)] = -hp[surf] ** 2
            row = np.zeros(unk.size)
            row[np.searchsorted(unk, surf[0])] = 1.0
            row[np.searchsorted(unk, surf[nq // 2])] = -1.0
            J = sp.bmat([[J, sp.csr_matrix(col[:, None])], [sp.csr_matrix(row[None, :]), None]])
        return J.tocsc()

    H, Qv = H0.ravel().copy(), float(Q)
    best, stalls = np.inf, 0
    rn = np.inf
    for it in range(max_iter + 1):
        R, dv = resid(H, Qv)
        rn = float(np.max(np.abs(R)))
        if not np.isfinite(rn):
            raise NonconvergenceError("residual is not finite", rn)
        if rn <= tol * max(1.0, float(np.max(np.abs(H)))):
            h = H.reshape(nq, m)
            return HeightField(p0, q, p, h, gam, Qv, lam, g, info={"iterations": it, "residual": rn})
        if it == max_iter:
            break
        if rn < best:
            best, stalls = rn, 0
        else:
            stalls += 1
            if stalls >= stall_limit:
                raise NonconvergenceError(f"Newton stagnated after {it} iterations", rn)
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            try:
                delta = spla.spsolve(jac(H, Qv, dv), -R)
            except spla.MatrixRankWarning:
                raise NonconvergenceError("singular Newton system", rn) from None
        if not np.all(np.isfinite(delta)):
            raise NonconvergenceError("singular Newton system", rn)
        # Armijo halving; when no step decreases the residual the smallest
        # admissible one is taken and counts towards stagnation
        n0 = np.linalg.norm(R)
        t, trial = 1.0, None
        for _ in range(30):
            Hn = H.copy()
            Hn[unk] += t * delta[: unk.size]
            Hn = even(Hn)
            Qn = Qv + (t * delta[-1] if extra else 0.0)
            if np.min(O["p"] @ Hn) > 0:
                trial = (Hn, Qn)
                if np.linalg.norm(resid(Hn, Qn)[0]) <= (1 - 1e-4 * t) * n0:
                    break
            t *= 0.5
        if trial is None:
            raise LeftAdmissibleSetError(f"every damped step violates h_p > 0 (iteration {it})", rn)
        H, Qv = trial
    raise NonconvergenceError(f"no convergence in {max_iter} Newton iterations", rn)


def _critical_profile(gam: FuncP, p0: float, g: float) -> FuncP:
    """Laminar profile at the minimum head; only a last-resort initial guess."""
    G, s_min, _, (_, tmin, _), _ = _laminar_head(gam, p0, g)
    return _profile(G, p0, s_min + float(np.exp(tmin)), 64)


# ---------------------------------------------------------------- height -> flow


def params_from_height(hf: HeightField, c: float, P0: float = 0.0) -> PhysParams:
    return PhysParams(d=hf.mean_depth(), c=c, lam=hf.lam, g=hf.g, P0=P0)


def flow_from_height(hf: HeightField, params: PhysParams, derivatives: str = "grid") -> FlowField:
    """Physical flow of a height field.

    ``derivatives="grid"`` differentiates with the stencils of the field's
    grid kinds.  ``"smooth"`` replaces the p-derivative by that of a
    least-squares Chebyshev fit per column, which filters the grid-scale
    noise that finite differences leave in ``h_p``.
    """
    d = hf.derivatives()
    hq, hp = d["hq"], d["hp"]
    if derivatives == "smooth":
        hp = smooth_p_derivative(hf)
    elif derivatives != "grid":
        raise InvalidInputError(f"unknown derivative mode {derivatives!r}")
    if np.min(hp) <= 0:
        raise AdmissibilityError(f"h_p = {np.min(hp):.3g} <= 0 somewhere on the grid")
    c, g = params.c, params.g
    u = c - 1.0 / hp
    v = -hq / hp
    # Bernoulli along streamlines: the vorticity potential Gamma(p) = int_0^p gamma
    A = funcrep.antiderivative(hf.gamma)
    Gam = A(hf.p) - A(0.0)
    P = params.P0 + 0.5 * (hf.Q - (1 + hq**2) / hp**2 - 2 * g * hf.h) - Gam[None, :]
    s = (hf.p - hf.p0) / (-hf.p0)
    y = hf.h - params.d
    return FlowField(params, hf.q.copy(), s, y, u, v, P, y[:, -1].copy(), hf.q_kind, hf.p_kind)


def height_from_flow(ff: FlowField, gamma, Q: float | None = None) -> HeightField:
    """Inverse coordinate map: ``h(q, p) = y + d`` where ``-psi = p`` in column ``q = x``.

    The p grid is the image of the flow's ``s`` grid under the relative flux.
    ``Q`` defaults to the surface Bernoulli value averaged over the columns.
    """
    from scipy.interpolate import BarycentricInterpolator, CubicSpline

    pvals, p0 = streamfunction(ff)
    if np.any(np.diff(pvals, axis=1) <= 0):
        raise AdmissibilityError("-psi is not increasing upwards; u < c fails somewhere")
    p = p0 + ff.s * (-p0)
    p[0], p[-1] = p0, 0.0
    interp = BarycentricInterpolator if ff.s_kind == "chebyshev" else CubicSpline
    h = np.empty_like(ff.y)
    for i in range(ff.x.size):
        h[i] = interp(pvals[i], ff.y[i] + ff.params.d)(p)
    h[:, 0] = 0.0
    if Q is None:
        w, v = ff.u[:, -1] - ff.params.c, ff.v[:, -1]
        Q = float(np.mean(w**2 + v**2 + 2.0 * ff.params.g * (ff.y[:, -1] + ff.params.d)))
    return HeightField(p0, ff.x.copy(), p, h, _as_funcp(gamma, p0), Q, ff.params.lam, ff.params.g, ff.x_kind, ff.s_kind)


def smooth_p_derivative(hf: HeightField, degree: int | None = None) -> np.ndarray:
    from numpy.polynomial import chebyshev as C

    m = hf.p.size
    if degree is None:
        degree = min(m - 1, 2 * int(np.ceil(np.sqrt(m))) + 4)
    x = 1.0 + 2.0 * hf.p / (-hf.p0)
    coef = C.chebfit(x, hf.h.T, degree)
    return C.chebval(x, C.chebder(coef)) * 2.0 / (-hf.p0)


# ---------------------------------------------------------------- measurements


def extract_axis_data(ff: FlowField, x0: float = 0.0):
    """Relative horizontal velocity ``u - c`` along the vertical line x = x0."""
    from .recover import AxisData

    prm = ff.params
    flags = []
    i = ff.column_index(x0)
    if i is not None:
        y, w = ff.y[i].copy(), ff.u[i] - prm.c
    else:
        if ff.x_kind not in ("fourier", "periodic-fd"):
            raise InvalidInputError("interpolation between columns needs a periodic x grid")
        shift = lambda f: np.array([grids.trig_shift(f[:, j], -x0, prm.lam)[0] for j in range(f.shape[1])])
        y, w = shift(ff.y), shift(ff.u) - prm.c
        flags.append("interpolated")
    # a symmetry line has v = 0 and mirror-even eta; only the former is checkable here
    vcol = ff.v[i] if i is not None else None
    scale = 1e-8 * max(1.0, float(np.max(np.abs(ff.u - prm.c))))
    if vcol is None or np.max(np.abs(vcol)) > scale:
        flags.append("symmetry-unverified")
    return AxisData(y=y, w=w, d=prm.d, g=prm.g, lam=prm.lam, x0=float(x0), c=prm.c, flags=tuple(flags))


def streamfunction(ff: FlowField) -> tuple[np.ndarray, float]:
    """``-psi`` at every node and the relative flux ``p0``, by vertical quadrature."""
    ys = ff.d_s(ff.y)
    flux = grids.cumulative((ff.u - ff.params.c) * ys, ff.s, ff.s_kind, axis=1)
    p0 = float(np.mean(flux[:, -1]))
    return p0 - flux, p0


def gamma_from_flow(ff: FlowField, degree: int = 16) -> FuncP:
    """Vorticity as a function of ``p = -psi``, with a single-valuedness check."""
    omega = ff.d_dy(ff.u) - ff.d_dx(ff.v)
    pvals, p0 = streamfunction(ff)
    if p0 >= 0:
        raise AdmissibilityError("relative flux is not negative; u < c fails")
    pv = np.clip(pvals, p0, 0.0).ravel()
    deg = min(degree, ff.s.size - 1)
    gam = funcrep.fit(pv, omega.ravel(), deg, p0=p0, tag="derived")
    tol = 1e-6 * (1.0 + float(np.max(np.abs(omega))))
    if gam.residual > tol:
        warnings.warn(
            f"vorticity is not a function of the streamline (spread {gam.residual:.3g}); not a steady wave",
            UserWarning,
            stacklevel=2,
        )
    return gam
