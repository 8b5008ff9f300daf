"""Reconstruction of a symmetric steady wave from the relative horizontal
velocity ``w = u - c`` measured along its crest line.

Pipeline: flux ``p0`` -> streamfunction on the axis -> ``a0(p) = h(0, p)``
-> even Taylor coefficients ``a_2n(p)`` of ``h(q, p) = sum a_2n(p) q^2n``
-> summation inside the trusted disk -> periodic field -> velocity and
pressure.

Two independent routes produce the coefficients.  ``coeff_a2`` and
``coeff_next`` implement the closed convolution formulas for the symmetric
case index for index; ``taylor_march`` matches powers of q in the height
equation with generic Cauchy products and handles arbitrary Cauchy data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import simpson
from scipy.linalg import lstsq, null_space
from scipy.optimize import brentq

from . import funcrep
from .errors import (
    AdmissibilityError,
    ConfigurationError,
    DivergenceWarning,
    ExperimentalWarning,
    InconsistentDataError,
    InvalidInputError,
    OutOfDiskError,
)
from .forward import FlowField, HeightField, PhysParams, flow_from_height
from .funcrep import FuncP
from .grids import cheb_matrix

N_DEFAULT = 8
N_MAX = 16
THETA_DEFAULT = 0.5
TAIL_RTOL = 1e-8
# the trusted half-width uses a tighter tail: the equation differentiates the
# series twice in q, which multiplies the top term by about (2N)^2 / q^2
TRUST_RTOL = 1e-10
# bound on the top term's share of h_qq, measured against 1 / sup|a0|; this is
# what the scaled height-equation residual sees
TRUST_QQ_RTOL = 1e-9
# a computed coefficient below this fraction of the terms that produced it is
# pure cancellation noise and is stored as an exact zero; two derivatives of
# a degree-D Chebyshev series amplify coefficient noise by up to D^4
CANCEL_RTOL = 1e-11
ENTIRE_RTOL = 1e-12


def noise_floor(degree: int) -> float:
    return max(CANCEL_RTOL, 64.0 * np.finfo(float).eps * float(degree) ** 4)


@dataclass(frozen=True, eq=False)
class AxisData:
    """Samples of ``w = u - c`` on the vertical line through a crest.

    ``y`` runs from the bed ``-d`` up to the surface elevation ``eta(x0)``.
    ``c`` is optional and only used to report absolute velocities.
    """

    y: np.ndarray
    w: np.ndarray
    d: float
    lam: float
    g: float = 9.81
    x0: float = 0.0
    c: float | None = None
    flags: tuple = ()

    def __post_init__(self):
        y = np.array(self.y, dtype=float).ravel()
        w = np.array(self.w, dtype=float).ravel()
        if y.shape != w.shape or y.size < 3:
            raise InvalidInputError("need at least three (y, w) samples of equal length")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
            raise InvalidInputError("axis samples contain NaN or Inf")
        for name in ("d", "lam", "g"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidInputError(f"{name} must be positive, got {v}")
        if np.any(np.diff(y) <= 0):
            raise InvalidInputError("axis ordinates must be strictly increasing")
        if abs(y[0] + self.d) > 1e-9 * self.d:
            raise InvalidInputError(f"first sample must sit on the bed y = -d = {-self.d}, got {y[0]}")
        if y[-1] <= -self.d:
            raise InvalidInputError("surface sample must lie above the bed")
        y[0] = -self.d
        y.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "flags", tuple(self.flags))

    @classmethod
    def from_velocity(cls, y, u, c: float, d: float, lam: float, **kw) -> "AxisData":
        return cls(y=y, w=np.asarray(u, dtype=float) - c, d=d, lam=lam, c=c, **kw)

    @property
    def eta0(self) -> float:
        return float(self.y[-1])


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """Taylor coefficients of ``h`` in ``q`` about the axis.

    ``terms[m]`` multiplies ``q**m``.  Symmetric tables built by the closed
    formulas store zeros at odd powers.
    """

    p0: float
    terms: tuple
    gamma: FuncP
    symmetric: bool = True

    @property
    def max_power(self) -> int:
        return len(self.terms) - 1

    @property
    def N(self) -> int:
        """Truncation order: highest even index ``2N`` is available."""
        return self.max_power // 2

    def even(self) -> list:
        return list(self.terms[::2])

    def odd(self) -> list:
        return list(self.terms[1::2])


@dataclass(frozen=True)
class RadiusEstimate:
    L: float
    q_trust: float
    theta: float
    ratios: tuple
    entire: bool = False


@dataclass(frozen=True, eq=False)
class PsiAxis:
    """``psi(0, y)`` on ``[-d, eta0]`` and its derivative ``w``."""

    lo: float
    hi: float
    p0: float
    w_coef: np.ndarray
    int_coef: np.ndarray

    def _x(self, y):
        return 2.0 * (np.asarray(y, dtype=float) - self.lo) / (self.hi - self.lo) - 1.0

    def __call__(self, y):
        return -self.p0 + C.chebval(self._x(y), self.int_coef)

    def w(self, y):
        return C.chebval(self._x(y), self.w_coef)


# ---------------------------------------------------------------- axis data


def compute_flux(axis: AxisData) -> tuple[float, float]:
    """Relative mass flux through the axis and a Richardson error estimate."""
    if np.any(axis.w >= 0):
        j = int(np.argmax(axis.w))
        raise AdmissibilityError(f"u - c = {axis.w[j]:.6g} >= 0 at y = {axis.y[j]:.6g}; psi is not monotone")
    y, w = axis.y, axis.w
    p0 = float(simpson(w, x=y))
    if y.size >= 5:
        idx = np.arange(0, y.size, 2)
        if idx[-1] != y.size - 1:
            idx = np.append(idx, y.size - 1)
        err = abs(p0 - float(simpson(w[idx], x=y[idx]))) / 15.0
    else:
        err = abs(p0 - float(np.trapezoid(w, y)))
    return p0, err


def _w_degree(y: np.ndarray) -> int:
    n = y.size
    x = 2.0 * (y - y[0]) / (y[-1] - y[0]) - 1.0
    if np.allclose(x, funcrep.cheb_nodes(n - 1), rtol=0, atol=1e-12):
        return n - 1
    return min(n - 1, int(2 * np.sqrt(n)) + 2)


def psi_on_axis(axis: AxisData, p0: float, flux_err: float = 0.0) -> PsiAxis:
    """``psi(0, y) = -p0 + int_{-d}^{y} w``, from a Chebyshev fit of w.

    The fitted flux is checked against ``p0`` and then normalised to it so
    that both endpoint identities hold to rounding.
    """
    y, w = axis.y, axis.w
    lo, hi = float(y[0]), float(y[-1])
    x = 2.0 * (y - lo) / (hi - lo) - 1.0
    wc = C.chebfit(x, w, _w_degree(y))
    ic = C.chebint(wc, lbnd=-1.0) * (hi - lo) / 2.0
    fitted = float(C.chebval(1.0, ic))
    tol = 1e-10 * abs(p0) + 10.0 * flux_err + 10.0 * abs(simpson(w - C.chebval(x, wc), x=y))
    if abs(fitted - p0) > tol:
        raise InconsistentDataError(
            f"psi(0, eta0) = {fitted - p0:.3g} differs from 0 by more than {tol:.3g}; flux and samples disagree"
        )
    r = p0 / fitted
    return PsiAxis(lo, hi, p0, wc * r, ic * r)


def compute_a0(axis: AxisData, p0: float, M: int = funcrep.M_MAX, psi: PsiAxis | None = None) -> FuncP:
    """``a0(p) = h(0, p)``: the height at which ``-psi(0, y) = p``, plus d."""
    if psi is None:
        psi = psi_on_axis(axis, p0, compute_flux(axis)[1])
    lo, hi = psi.lo, psi.hi
    probe = np.linspace(lo, hi, 8 * axis.y.size + 1)
    if np.max(psi.w(probe)) >= 0:
        raise AdmissibilityError("fitted u - c is not negative on the whole axis; psi is not monotone")
    d = axis.d
    pn = funcrep.p_nodes(p0, M)
    ys = np.empty_like(pn)
    ys[0], ys[-1] = lo, hi
    for i in range(1, M):
        f = lambda yy, pp=pn[i]: -psi(yy) - pp
        yy = brentq(f, lo, hi, xtol=1e-12 * d, rtol=4 * np.finfo(float).eps)
        for _ in range(2):
            yy -= f(yy) / (-psi.w(yy))
        ys[i] = yy
    return FuncP(p0, funcrep.nodal_coef(ys + d), "measured")


# ---------------------------------------------------------------- closed formulas


def _check_slope(a0: FuncP) -> None:
    a0p = funcrep.differentiate(a0)
    if np.min(a0p(a0.nodes(max(funcrep.M_MAX, a0.degree)))) <= 0:
        raise AdmissibilityError("a0' is not positive on [p0, 0]")


def _settle(total, scale: float, degree: int):
    """Output FuncP and the jets to feed forward; cancellation noise becomes an exact zero."""
    if np.max(np.abs(total.values)) <= noise_floor(degree) * scale:
        return FuncP(total.p0, [0.0], "derived"), total * 0.0
    return funcrep.chop(total.to_funcp(), 1e-15), total


def _sup(j) -> float:
    return float(np.max(np.abs(j.values)))


def _a2_jets(A, G):
    A1 = A.d()
    inv2 = (A1 * A1).reciprocal()
    t1 = G * A1 / 2.0
    t2 = A.d(2) * inv2 / 2.0
    return t1 - t2, max(_sup(t1), _sup(t2))


def _next_jets(V: list, G):
    n = len(V) - 1
    V1 = [f.d() for f in V]
    V2 = [f.d(2) for f in V]
    terms = [-V2[n]]
    for k in range(1, n + 1):
        inner = 0.0
        for l in range(1, k + 1):
            inner = 4 * l * (k - l + 1) * (V[l] * V[k - l + 1]) + inner
        terms.append(-(V2[n - k] * inner))
    for k in range(0, n):
        inner = 0.0
        for l in range(1, k + 2):
            inner = 4 * l * (k - l + 2) * (V[l] * V1[k - l + 2]) + inner
        terms.append(2.0 * (V1[n - k - 1] * inner))
    for k in range(0, n):
        inner = 0.0
        for l in range(0, n - k + 1):
            inner = V1[l] * V1[n - k - l] + inner
        terms.append(-((2 * k + 1) * (2 * k + 2)) * (V[k + 1] * inner))
    for k in range(0, n + 1):
        inner = 0.0
        for l in range(0, n - k + 1):
            inner = V1[l] * V1[n - k - l] + inner
        terms.append(G * (V1[k] * inner))
    num = terms[0]
    for t in terms[1:]:
        num = num + t
    inv2 = (V1[0] * V1[0]).reciprocal() / ((2 * n + 1) * (2 * n + 2))
    return num * inv2, max(_sup(t) for t in terms) * _sup(inv2)


def coeff_a2(a0: FuncP, gamma: FuncP) -> FuncP:
    """``a2 = gamma a0'/2 - a0''/(2 a0'^2)``."""
    _check_slope(a0)
    total, scale = _a2_jets(funcrep.jets(a0, 3), funcrep.jets(gamma, 1))
    return _settle(total, scale, a0.degree)[0]


def coeff_next(a: list, gamma: FuncP) -> FuncP:
    """``a_{2n+2}`` from ``a = [a_0, a_2, ..., a_2n]``, n >= 1.

    Writing ``V[l] = a_2l`` the numerator is

        - V[n]''
        - sum_{k=1}^{n}   V[n-k]''   sum_{l=1}^{k}   4 l (k-l+1)   V[l] V[k-l+1]
        + 2 sum_{k=0}^{n-1} V[n-k-1]' sum_{l=1}^{k+1} 4 l (k-l+2) V[l] V[k-l+2]'
        - sum_{k=0}^{n-1} (2k+1)(2k+2) V[k+1] sum_{l=0}^{n-k} V[l]' V[n-k-l]'
        + gamma sum_{k=0}^{n} V[k]' sum_{l=0}^{n-k} V[l]' V[n-k-l]'

    and the denominator ``(2n+1)(2n+2) a0'^2``.  Every product is formed
    on Taylor jets at the collocation nodes; ``symmetric_table`` keeps the
    jets between orders so that only ``a0`` and ``gamma`` are ever
    differentiated spectrally.
    """
    n = len(a) - 1
    if n < 1:
        raise InvalidInputError("coeff_next needs a_0 and a_2 at least")
    _check_slope(a[0])
    total, scale = _next_jets([funcrep.jets(f, 3) for f in a], funcrep.jets(gamma, 1))
    return _settle(total, scale, max(f.degree for f in a))[0]


def symmetric_table(a0: FuncP, gamma: FuncP, N: int = N_DEFAULT) -> CoeffTable:
    """Even coefficients through ``a_2N`` by the closed formulas."""
    if N < 1 or N > N_MAX:
        raise ConfigurationError(f"truncation order must be in 1..{N_MAX}, got {N}")
    _check_slope(a0)
    L = 2 * N + 1
    A, G = funcrep.jets(a0, L), funcrep.jets(gamma, L)
    out, V = [a0], [A]
    for n in range(N):
        total, scale = _a2_jets(A, G) if n == 0 else _next_jets(V, G)
        f, j = _settle(total, scale, a0.degree)
        out.append(f)
        V.append(j)
    zero = funcrep.constant(0.0, a0.p0, "derived")
    terms = []
    for f in out:
        terms += [f, zero]
    return CoeffTable(a0.p0, tuple(terms[:-1]), gamma, True)


# ---------------------------------------------------------------- general engine


def taylor_march(cauchy: tuple, gamma: FuncP, N: int = N_MAX) -> CoeffTable:
    """Coefficients ``b_0 .. b_N`` of ``h = sum b_m q^m`` from ``(b_0, b_1)``.

    At order m the height equation reads ``R_m + (m+2)(m+1) b_0'^2 b_{m+2} = 0``
    where ``R_m`` collects every product not containing ``b_{m+2}``.  The
    series in q have Taylor jets in p as coefficients.
    """
    if N > N_MAX:
        raise ConfigurationError(f"march order {N} exceeds the cap {N_MAX}")
    if N < 1:
        raise ConfigurationError("march order must be at least 1")
    b0, b1 = cauchy
    p0 = b0.p0
    L = N + 2
    B0, B1, G = funcrep.jets(b0, L), funcrep.jets(b1, L), funcrep.jets(gamma, L)
    slope = B0.d()
    if np.min(slope.values) <= 0:
        raise AdmissibilityError("b0' is not positive on [p0, 0]")
    zero = funcrep.zero_jets(p0, L)
    inv2 = (slope * slope).reciprocal()
    degree = max(b0.degree, b1.degree)
    b = [B0, B1]
    out = [b0, b1]

    def cauchy_product(f, g, m):
        acc = zero
        for i in range(m + 1):
            if i < len(f) and m - i < len(g):
                acc = acc + f[i] * g[m - i]
        return acc

    for m in range(0, N - 1):
        known = len(b)
        hq = [(j + 1) * b[j + 1] if j + 1 < known else zero for j in range(m + 1)]
        hp = [b[j].d() for j in range(m + 1)]
        hpp = [b[j].d(2) for j in range(m + 1)]
        hpq = [(j + 1) * b[j + 1].d() if j + 1 < known else zero for j in range(m + 1)]
        # h_qq with the unknown top coefficient left out
        hqq = [(j + 2) * (j + 1) * b[j + 2] if j + 2 < known else zero for j in range(m + 1)]
        hq2 = [cauchy_product(hq, hq, j) for j in range(m + 1)]
        hp2 = [cauchy_product(hp, hp, j) for j in range(m + 1)]
        parts = [
            hpp[m] + cauchy_product(hq2, hpp, m),
            -2.0 * cauchy_product([cauchy_product(hp, hq, j) for j in range(m + 1)], hpq, m),
            cauchy_product(hp2, hqq, m),
            -(G * cauchy_product(hp2, hp, m)),
        ]
        R = parts[0]
        for t in parts[1:]:
            R = R + t
        k = (m + 2) * (m + 1)
        f, j = _settle(-(R * inv2) / k, max(_sup(t) for t in parts) * _sup(inv2) / k, degree)
        out.append(f)
        b.append(j)
    symmetric = bool(b1.sup() == 0.0)
    return CoeffTable(p0, tuple(out[: N + 1]), gamma, symmetric)


# ---------------------------------------------------------------- summation


def estimate_radius(table: CoeffTable, theta: float = THETA_DEFAULT) -> RadiusEstimate:
    """Root test on sup-norms relative to ``sup |b_0|`` over the upper half of orders."""
    if not 0 < theta < 1:
        raise ConfigurationError("safety factor theta must lie in (0, 1)")
    if table.max_power < 3:
        raise ConfigurationError("radius estimate needs coefficients through order 3 at least")
    base = table.terms[0].sup()
    sups = np.array([t.sup() for t in table.terms])
    ratios = tuple(float((sups[m] / base) ** (1.0 / m)) for m in range(1, sups.size))
    if np.all(sups[1:] <= ENTIRE_RTOL * base):
        return RadiusEstimate(0.0, math.inf, theta, ratios, entire=True)
    lo = max(1, table.max_power // 2)
    L = max(ratios[m - 1] for m in range(lo, table.max_power + 1))
    if L == 0.0:
        L = max(ratios)
    return RadiusEstimate(float(L), float(theta / L), theta, ratios, entire=False)


def _powers_sum(table: CoeffTable, q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    h = np.zeros(np.broadcast(q, p).shape)
    hq, hp = np.zeros_like(h), np.zeros_like(h)
    # even powers go through q*q so that h(-q) == h(q) bit for bit
    q2 = q * q
    for m, f in enumerate(table.terms):
        if f.sup() == 0.0 or (table.symmetric and m % 2):
            continue
        fv = f(p)
        qm = q2 ** (m // 2) if m % 2 == 0 else q**m
        h = h + fv * qm
        hp = hp + funcrep.differentiate(f)(p) * qm
        if m:
            dq = m * q * q2 ** (m // 2 - 1) if m % 2 == 0 else m * q ** (m - 1)
            hq = hq + fv * dq
    if table.max_power == 0:
        return h, hq, hp, np.zeros_like(h)
    top = table.terms[-1](p) * q**table.max_power
    return h, hq, hp, np.abs(top)


def _series_height(table: CoeffTable, q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, float]:
    """Summed field with the bed pinned to zero, and the removed misfit.

    The misfit is removed by a term linear in p, which leaves the surface
    row and ``h_pp`` untouched.
    """
    h = _powers_sum(table, q[:, None], p[None, :])[0]
    bed = h[:, 0].copy()
    h -= bed[:, None] * (p / table.p0)[None, :]
    h[:, 0] = 0.0
    return h, float(np.max(np.abs(bed)))


def sum_series(table: CoeffTable, q, p, *, override: bool = False):
    """Truncated sums ``(h, h_q, h_p)`` and the last-term magnitude.

    Raises OutOfDiskError when the last term exceeds ``1e-8 |h|`` unless
    ``override`` is set, in which case a DivergenceWarning is issued when
    the tail is not decreasing.
    """
    h, hq, hp, tail = _powers_sum(table, q, p)
    ref = np.maximum(np.abs(h), table.terms[0].sup())
    bad = tail > TAIL_RTOL * ref
    if np.any(bad):
        if not override:
            raise OutOfDiskError(
                f"series tail {float(np.max(tail)):.3g} exceeds {TAIL_RTOL:g} |h| at the requested point(s)"
            )
        n = table.max_power
        step = 2 if table.symmetric else 1
        prev = np.abs(table.terms[n - step](np.asarray(p)) * np.asarray(q, float) ** (n - step))
        if np.any(tail >= prev):
            warnings.warn("series tail is not decreasing at the requested point", DivergenceWarning, stacklevel=2)
    return h, hq, hp, tail


def tail_width(table: CoeffTable, rtol: float = TAIL_RTOL) -> float:
    """Largest |q| at which the top term stays below ``rtol`` times the scale."""
    top = table.terms[-1].sup()
    if top == 0.0:
        return math.inf
    return float((rtol * table.terms[0].sup() / top) ** (1.0 / table.max_power))


def trusted_width(table: CoeffTable) -> float:
    """Half-width where both the top term and its second q-derivative are negligible."""
    n = table.max_power
    top = table.terms[-1].sup()
    if top == 0.0 or n < 2:
        return tail_width(table, TRUST_RTOL)
    qq = (TRUST_QQ_RTOL / (table.terms[0].sup() * n * (n - 1) * top)) ** (1.0 / (n - 2)) if n > 2 else math.inf
    return min(tail_width(table, TRUST_RTOL), float(qq))


# ---------------------------------------------------------------- periodic extension


def _cheb_grid(p0: float, M: int):
    p = funcrep.p_nodes(p0, M)
    return p, cheb_matrix(p)


def _cos_grid(nh: int, lam: float):
    k = 2.0 * np.pi / lam
    q = np.arange(nh + 1) * (lam / 2.0) / nh
    j = np.arange(nh + 1)
    B = np.cos(np.outer(q, j) * k)
    Binv = np.linalg.inv(B)
    D1 = (-np.sin(np.outer(q, j) * k) * j * k) @ Binv
    D2 = (-np.cos(np.outer(q, j) * k) * (j * k) ** 2) @ Binv
    return q, B, D1, D2


def _axis_fit(a0v, Dp, Dq, Dqq, gam, H0, Q0: float, g: float, iters: int = 30):
    """Gauss-Newton with the equation, the surface relation and the bed as hard
    constraints and ``Q`` as an extra unknown; the remaining freedom (one
    amplitude direction) is fixed by the axis values in least squares."""
    nq, m = H0.shape
    H = H0.copy()
    H[:, 0] = 0.0
    Q = float(Q0)
    Dpp = Dp @ Dp
    Iq, Ip = np.eye(nq), np.eye(m)
    Oq, Oqq = np.kron(Dq, Ip), np.kron(Dqq, Ip)
    Op, Opp, Opq = np.kron(Iq, Dp), np.kron(Iq, Dpp), np.kron(Dq, Dp)
    grid = np.zeros((nq, m), bool)
    inner, top, free, ax = grid.copy(), grid.copy(), grid.copy(), grid.copy()
    inner[:, 1:-1] = True
    top[:, -1] = True
    free[:, 1:] = True
    ax[0, 1:] = True
    inner, top, cols = inner.ravel(), top.ravel(), free.ravel()
    nf = int(cols.sum())
    A = np.zeros((m - 1, nf + 1))
    A[np.arange(m - 1), np.flatnonzero(ax.ravel()[cols])] = 1.0
    G = gam[None, :]
    col = lambda a: a.ravel()[:, None]
    rn = ra = np.inf
    for _ in range(iters):
        hq, hqq, hp = Dq @ H, Dqq @ H, H @ Dp.T
        hpp, hpq = H @ Dpp.T, Dq @ hp
        Ri = ((1 + hq**2) * hpp - 2 * hp * hq * hpq + hp**2 * hqq - G * hp**3).ravel()[inner]
        Rs = (1 + hq**2 + (2 * g * H - Q) * hp**2).ravel()[top]
        Ji = (
            col(2 * hq * hpp - 2 * hp * hpq) * Oq
            + col(-2 * hq * hpq + 2 * hp * hqq - 3 * G * hp**2) * Op
            + col(1 + hq**2) * Opp
            + col(hp**2) * Oqq
            + col(-2 * hp * hq) * Opq
        )[inner][:, cols]
        Js = (col(2 * hq) * Oq + col(2 * (2 * g * H - Q) * hp) * Op + np.diag((2 * g * hp**2).ravel()))[top][:, cols]
        B = np.block([[Ji, np.zeros((Ji.shape[0], 1))], [Js, -(hp**2).ravel()[top][:, None]]])
        R = np.concatenate([Ri, Rs])
        res_a = H[0, 1:] - a0v[1:]
        rn, ra = float(np.max(np.abs(R))), float(np.max(np.abs(res_a)))
        d0 = lstsq(B, -R)[0]
        Z = null_space(B)
        z = lstsq(A @ Z, -(res_a + A @ d0))[0]
        dx = d0 + Z @ z
        if not np.all(np.isfinite(dx)):
            raise FloatingPointError("non-finite Gauss-Newton step")
        H[free] += dx[:-1]
        Q += float(dx[-1])
        if np.max(np.abs(dx[:-1])) < 1e-14 * np.max(np.abs(H)):
            break
    return H, Q, rn, ra


def _harmonic_seed(vals: list, J: int, k: float, q: np.ndarray) -> np.ndarray:
    """Cosine field whose first ``J+1`` even q-moments at the axis match ``vals``."""
    b = np.array([vals[n] * math.factorial(2 * n) * (-1) ** n / k ** (2 * n) for n in range(J + 1)])
    V = np.array([[float(j * j) ** n for j in range(J + 1)] for n in range(J + 1)])
    cj = np.linalg.solve(V, b)
    return np.cos(np.outer(q, np.arange(J + 1)) * k) @ cj


@dataclass(frozen=True, eq=False)
class Extension:
    harmonics: int
    p: np.ndarray
    coef: np.ndarray  # (harmonics+1, len(p)): h(q, p) = sum_j coef[j] cos(j k q)
    Q: float
    pde_residual: float
    axis_misfit: float
    changes: tuple

    def height(self, q, lam: float) -> np.ndarray:
        k = 2.0 * np.pi / lam
        return np.cos(np.outer(np.asarray(q, float), np.arange(self.coef.shape[0])) * k) @ self.coef


def periodic_extension(
    table: CoeffTable,
    lam: float,
    Q: float,
    g: float,
    M: int = 24,
    J_max: int = 16,
    seed_moments: int = 1,
    rtol: float = 1e-12,
    plateau: float = 1e-9,
    patience: int = 2,
) -> Extension:
    """Even, lam-periodic wave whose axis values match ``a0``.

    The harmonic count J grows from 2; the first field is seeded by matching
    its even q-moments at the axis with the Taylor coefficients (only through
    a2 by default: higher ones are sensitive to noise in the data), later ones
    start from the previous fit.  Growth stops once the surface changes by
    less than ``rtol`` times its size, or once the changes sit below
    ``plateau`` times its size and ``patience`` further harmonics fail to
    improve on the best; the J with the smallest change is kept.
    """
    p0 = table.p0
    k = 2.0 * np.pi / lam
    p, Dp = _cheb_grid(p0, M)
    a0v = table.terms[0](p)
    gam = table.gamma(p)
    vals = [f(p) for f in table.even()[: seed_moments + 1]]
    xs = np.linspace(0.0, lam / 2.0, 129)
    fits, surf, changes = [], [], []
    prev = None
    for J in range(2, J_max + 1):
        q, B, D1, D2 = _cos_grid(J, lam)
        if prev is None:
            H0, Q0 = _harmonic_seed(vals, min(seed_moments, J, len(vals) - 1), k, q), Q
        else:
            c0 = np.zeros((J + 1, p.size))
            c0[: prev[1].shape[0]] = prev[1]
            H0, Q0 = B @ c0, prev[2]
        try:
            H, Qf, rn, ra = _axis_fit(a0v, Dp, D1, D2, gam, H0, Q0, g)
        except (FloatingPointError, np.linalg.LinAlgError):
            continue
        if not np.all(np.isfinite(H)):
            continue
        prev = (J, np.linalg.solve(B, H), Qf, rn, ra)
        fits.append(prev)
        surf.append(np.cos(np.outer(xs, np.arange(J + 1)) * k) @ prev[1][:, -1])
        if len(surf) > 1:
            changes.append(float(np.max(np.abs(surf[-1] - surf[-2]))))
            size = float(np.max(np.abs(surf[-1])))
            if changes[-1] <= rtol * size:
                break
            best = int(np.argmin(changes))
            if changes[best] <= plateau * size and len(changes) - 1 - best >= patience:
                break
    if not fits:
        raise InconsistentDataError("no periodic wave matches the axis data")
    i = int(np.argmin(changes)) + 1 if changes else 0
    J, coef, Qf, rn, ra = fits[i]
    return Extension(J, p, coef, Qf, rn, ra, tuple(changes))


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True, eq=False)
class Recovery:
    axis: AxisData
    p0: float
    flux_error: float
    a0: FuncP
    table: CoeffTable
    radius: RadiusEstimate
    Q: float
    q_trusted: float
    height: HeightField
    flow: FlowField
    w_rel: np.ndarray
    status: str
    note: str = ""
    extension: Extension | None = None
    consistency: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.flow.x

    @property
    def eta(self) -> np.ndarray:
        return self.flow.eta

    def disk_height(self, nq: int = 24, M: int = 32, width: float | None = None) -> HeightField:
        """Series-summed field on Chebyshev nodes over ``|q| <= width`` (default: trusted)."""
        qt = self.q_trusted if width is None else width
        qt = min(qt, self.axis.lam / 2.0)
        q = qt * funcrep.cheb_nodes(nq)
        p = funcrep.p_nodes(self.p0, M)
        h = _series_height(self.table, q, p)[0]
        return HeightField(
            self.p0, q, p, h, self.table.gamma, self.Q, self.axis.lam, self.axis.g, "chebyshev", "chebyshev"
        )

    def disk_flow(self, **kw) -> FlowField:
        hf = self.disk_height(**kw)
        return flow_from_height(hf, self.flow.params)


EXTENSIONS = ("periodic", "none", "recenter")


def _as_gamma(gamma, p0: float) -> FuncP:
    if gamma is None:
        return funcrep.constant(0.0, p0)
    if isinstance(gamma, FuncP):
        if abs(gamma.p0 - p0) > 1e-9 * abs(p0):
            raise InvalidInputError(f"gamma lives on [{gamma.p0:.12g}, 0] but the data give p0 = {p0:.12g}")
        return FuncP(p0, gamma.coef, gamma.tag)
    if callable(gamma):
        return funcrep.chop(funcrep.from_function(gamma, p0, funcrep.M_DEFAULT))
    return funcrep.constant(float(gamma), p0)


def recover_wave(
    axis: AxisData,
    gamma=None,
    *,
    N: int = N_DEFAULT,
    M: int = funcrep.M_MAX,
    theta: float = THETA_DEFAULT,
    nq: int = 64,
    M_out: int = 24,
    extension: str = "periodic",
    J_max: int = 16,
    P0: float = 0.0,
) -> Recovery:
    """Full reconstruction from axis data.

    ``gamma`` is the vorticity function: a FuncP on ``[p0, 0]``, a callable
    of p, or a constant (default 0).  ``extension`` selects what happens
    when the trusted disk is narrower than half a wavelength:

    ``periodic``  fit an even periodic solution matching ``a0`` (default)
    ``none``      return only the trusted interval, status ``partial``
    ``recenter``  experimental re-centred Taylor marching
    """
    if extension not in EXTENSIONS:
        raise ConfigurationError(f"extension must be one of {EXTENSIONS}")
    if N < 1 or N > N_MAX:
        raise ConfigurationError(f"truncation order must be in 1..{N_MAX}, got {N}")
    p0, ferr = compute_flux(axis)
    psi = psi_on_axis(axis, p0, ferr)
    a0 = compute_a0(axis, p0, M, psi)
    if a0.tag == "measured":
        # the recursion differentiates a0 many times, so sampling noise must go
        a0 = funcrep.plateau_chop(funcrep.lowpass(a0, M // 2))
    # removes quadrature noise while keeping the truncation error well below the noise floor
    a0 = funcrep.chop(a0, 1e-15)
    gam = _as_gamma(gamma, p0)
    table = symmetric_table(a0, gam, N)
    radius = estimate_radius(table, theta)
    a0p0 = float(funcrep.differentiate(a0)(0.0))
    Q = 1.0 / a0p0**2 + 2.0 * axis.g * float(a0(0.0))
    lam = axis.lam
    q_trust = min(radius.q_trust, trusted_width(table))
    half = lam / 2.0
    prm = PhysParams(d=axis.d, c=axis.c if axis.c is not None else 1.0, lam=lam, g=axis.g, P0=P0)
    info = {"c_known": axis.c is not None}

    ext, consistency, note = None, 0.0, ""
    if q_trust >= half:
        status = "complete"
        x = np.arange(nq) * lam / nq
        qf = np.where(x > half, x - lam, x)
        p = funcrep.p_nodes(p0, M_out)
        h, info["bed_misfit"] = _series_height(table, qf, p)
        hf = HeightField(p0, x, p, h, gam, Q, lam, axis.g, "fourier", "chebyshev")
    elif extension == "periodic":
        ext = periodic_extension(table, lam, Q, axis.g, M=M_out, J_max=J_max)
        status = "extended"
        x = np.arange(nq) * lam / nq
        hf = HeightField(p0, x, ext.p, ext.height(x, lam), gam, ext.Q, lam, axis.g, "fourier", "chebyshev")
        info["Q_extension"] = ext.Q
        qc = np.linspace(0.0, q_trust, 33)
        ser = _powers_sum(table, qc, 0.0 * qc)[0]
        consistency = float(np.max(np.abs(ext.height(qc, lam)[:, -1] - ser)))
        info["bed_misfit"] = float(np.max(np.abs(_powers_sum(table, qc, 0.0 * qc + p0)[0])))
        note = (
            f"trusted disk |q| <= {q_trust:.4g} is narrower than half a wavelength {half:.4g}; "
            f"profile completed by an even periodic fit with {ext.harmonics} harmonics"
        )
    elif extension == "none":
        status = "partial"
        q = q_trust * funcrep.cheb_nodes(max(8, nq // 2))
        p = funcrep.p_nodes(p0, M_out)
        h, info["bed_misfit"] = _series_height(table, q, p)
        hf = HeightField(p0, q, p, h, gam, Q, lam, axis.g, "chebyshev", "chebyshev")
        note = (
            f"trusted disk |q| <= {q_trust:.4g} is narrower than half a wavelength {half:.4g}; "
            "only the trusted interval is returned"
        )
    else:
        hf, note = _recenter(table, q_trust, lam, nq, M_out, Q, axis.g, theta, N)
        status = "extended-experimental"

    flow = flow_from_height(hf, prm)
    hp = hf.derivatives()["hp"]
    return Recovery(
        axis, p0, ferr, a0, table, radius, Q, float(q_trust), hf, flow, -1.0 / hp, status, note, ext, consistency, info
    )


def _recenter(table: CoeffTable, q_trust: float, lam: float, nq: int, M_out: int, Q: float, g: float, theta: float, N: int):
    """Sideways Taylor marching from re-centred Cauchy data (experimental)."""
    warnings.warn(
        "re-centred marching solves an ill-posed sideways problem; high p-frequencies are amplified",
        ExperimentalWarning,
        stacklevel=3,
    )
    half = lam / 2.0
    p0 = table.p0
    pieces = [(0.0, min(q_trust, half), table)]
    keep = funcrep.M_MAX // 4
    while pieces[-1][1] < half and len(pieces) < 16:
        a, b, tab = pieces[-1]
        step = b - a
        if step <= 1e-12 * lam:
            break
        b0 = funcrep.FuncP(p0, np.zeros(1))
        b1 = funcrep.FuncP(p0, np.zeros(1))
        for m, f in enumerate(tab.terms):
            b0 = b0 + f * step**m
            if m:
                b1 = b1 + f * (m * step ** (m - 1))
        b0, b1 = funcrep.lowpass(b0, keep), funcrep.lowpass(b1, keep)
        nxt = taylor_march((b0, b1), tab.gamma, 2 * N)
        r = estimate_radius(nxt, theta)
        width = min(r.q_trust, trusted_width(nxt))
        pieces.append((b, min(b + width, half), nxt))
    x = np.arange(nq) * lam / nq
    qf = np.abs(np.where(x > half, x - lam, x))
    p = funcrep.p_nodes(p0, M_out)
    h = np.full((nq, p.size), np.nan)
    for a, b, tab in pieces:
        sel = (qf >= a) & (qf <= b) & np.isnan(h[:, 0])
        if np.any(sel):
            h[sel] = _powers_sum(tab, (qf[sel] - a)[:, None], p[None, :])[0]
    reached = pieces[-1][1]
    if np.any(np.isnan(h)):
        raise OutOfDiskError(f"re-centred marching stalled at |q| = {reached:.4g} < {half:.4g}")
    hf = HeightField(p0, x, p, h, table.gamma, Q, lam, g, "fourier", "chebyshev")
    return hf, f"experimental re-centred marching over {len(pieces)} disks"
