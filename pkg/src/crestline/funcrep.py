"""Chebyshev representation of smooth functions on the interval [p0, 0].

A :class:`FuncP` holds Chebyshev coefficients in the variable
``x = 1 + 2 p / |p0|`` which maps ``[p0, 0]`` onto ``[-1, 1]``.  Products are
formed exactly in coefficient space and truncated at a configurable degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct

from .errors import DegenerateFitError, InvalidInputError

M_DEFAULT = 32
M_MAX = 64
TAGS = ("measured", "derived", "analytic")


def cheb_nodes(M: int) -> np.ndarray:
    """Chebyshev extreme points on [-1, 1] in increasing order."""
    if M == 0:
        return np.array([0.0])
    return -np.cos(np.pi * np.arange(M + 1) / M)


def p_nodes(p0: float, M: int) -> np.ndarray:
    """Collocation grid on [p0, 0]: the extreme points mapped, increasing."""
    x = cheb_nodes(M)
    p = 0.5 * (x - 1.0) * (-p0)
    p[0], p[-1] = p0, 0.0
    return p


@dataclass(frozen=True, eq=False)
class FuncP:
    p0: float
    coef: np.ndarray
    tag: str = "derived"
    residual: float = 0.0
    _scale: float = field(init=False, repr=False)

    def __post_init__(self):
        p0 = float(self.p0)
        if not np.isfinite(p0) or p0 >= 0:
            raise InvalidInputError(f"domain endpoint p0 must be negative, got {self.p0}")
        c = np.array(self.coef, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficient vector contains NaN or Inf")
        if self.tag not in TAGS:
            raise InvalidInputError(f"unknown provenance tag {self.tag!r}")
        c.setflags(write=False)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "coef", c)
        object.__setattr__(self, "_scale", 2.0 / (-p0))

    @property
    def degree(self) -> int:
        return self.coef.size - 1

    def x_of(self, p):
        return 1.0 + self._scale * np.asarray(p, dtype=float)

    def __call__(self, p):
        return C.chebval(self.x_of(p), self.coef)

    def nodes(self, M: int | None = None) -> np.ndarray:
        return p_nodes(self.p0, self.degree if M is None else M)

    def sup(self, M: int = M_MAX) -> float:
        """Sup-norm sampled on a fine Chebyshev grid (endpoints included)."""
        return float(np.max(np.abs(self(self.nodes(max(M, self.degree))))))

    # operator sugar keeps the recursion code close to the formulas
    def __add__(self, other):
        return add(self, other) if isinstance(other, FuncP) else add(self, constant(other, self.p0))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, scale(other, -1.0) if isinstance(other, FuncP) else constant(-other, self.p0))

    def __rsub__(self, other):
        return add(scale(self, -1.0), constant(other, self.p0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        return multiply(self, other) if isinstance(other, FuncP) else scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return scale(self, 1.0 / s)


def _check_same(f: FuncP, g: FuncP) -> None:
    if abs(f.p0 - g.p0) > 1e-14 * abs(f.p0):
        raise InvalidInputError(f"domain mismatch: [{f.p0}, 0] vs [{g.p0}, 0]")


def _tag2(f: FuncP, g: FuncP) -> str:
    return "measured" if "measured" in (f.tag, g.tag) else "derived"


def nodal_coef(values) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through values at the
    increasing extreme points, by a type-I DCT (no least-squares rounding)."""
    v = np.asarray(values, dtype=float)
    M = v.shape[0] - 1
    if M == 0:
        return v.copy()
    c = dct(v[::-1], type=1, axis=0) / M
    c[0] /= 2.0
    c[-1] /= 2.0
    return c


def constant(value: float, p0: float, tag: str = "analytic") -> FuncP:
    return FuncP(p0, [float(value)], tag)


def from_function(fn: Callable, p0: float, degree: int = M_DEFAULT, tag: str = "analytic") -> FuncP:
    """Interpolate ``fn`` at the degree-``degree`` extreme points."""
    p = p_nodes(p0, degree)
    return FuncP(p0, nodal_coef(np.broadcast_to(np.asarray(fn(p), dtype=float), p.shape)), tag)


def fit(p, values, degree: int = M_DEFAULT, p0: float | None = None, tag: str = "measured") -> FuncP:
    """Least-squares projection of samples onto degree ``degree``.

    When the samples sit on the extreme-point grid this is interpolation.
    The max residual at the sample points is stored on the result.
    """
    p = np.asarray(p, dtype=float).ravel()
    v = np.asarray(values, dtype=float).ravel()
    if p.shape != v.shape:
        raise InvalidInputError("sample abscissae and values differ in length")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))):
        raise InvalidInputError("samples contain NaN or Inf")
    if degree < 1:
        raise InvalidInputError("degree must be at least 1")
    if np.unique(p).size < degree + 1:
        raise DegenerateFitError(f"{np.unique(p).size} distinct points cannot determine degree {degree}")
    if p0 is None:
        p0 = float(p.min())
    tol = 1e-8 * abs(p0)
    if p.min() < p0 - tol or p.max() > tol:
        raise InvalidInputError("samples fall outside [p0, 0]")
    if p.min() > p0 + tol or p.max() < -tol:
        raise InvalidInputError("samples do not cover [p0, 0]")
    x = np.clip(1.0 + 2.0 * p / (-p0), -1.0, 1.0)
    on_nodes = p.size == degree + 1 and np.max(np.abs(x - cheb_nodes(degree))) <= 1e-14
    coef = nodal_coef(v) if on_nodes else C.chebfit(x, v, degree)
    res = float(np.max(np.abs(C.chebval(x, coef) - v)))
    return FuncP(p0, coef, tag, res)


def differentiate(f: FuncP, m: int = 1) -> FuncP:
    """Exact derivative of the representation (degree drops by ``m``)."""
    if f.degree < m:
        return FuncP(f.p0, [0.0], f.tag)
    return FuncP(f.p0, C.chebder(f.coef, m) * f._scale**m, f.tag)


def antiderivative(f: FuncP) -> FuncP:
    """Antiderivative vanishing at p0."""
    return FuncP(f.p0, C.chebint(f.coef, lbnd=-1.0) / f._scale, f.tag)


def add(f: FuncP, g: FuncP) -> FuncP:
    _check_same(f, g)
    return FuncP(f.p0, C.chebadd(f.coef, g.coef), _tag2(f, g))


def scale(f: FuncP, s: float) -> FuncP:
    return FuncP(f.p0, f.coef * float(s), f.tag)


def multiply(f: FuncP, g: FuncP, m_max: int = M_MAX) -> FuncP:
    """Alias-free product, truncated to degree ``m_max``."""
    _check_same(f, g)
    return FuncP(f.p0, C.chebmul(f.coef, g.coef)[: m_max + 1], _tag2(f, g))


def lowpass(f: FuncP, keep: int) -> FuncP:
    """Zero every coefficient above index ``keep``."""
    if keep < 0:
        raise InvalidInputError("keep must be non-negative")
    c = np.array(f.coef)
    c[keep + 1 :] = 0.0
    return FuncP(f.p0, c, f.tag)


def chop(f: FuncP, tol: float = 1e-14) -> FuncP:
    """Drop trailing coefficients below ``tol`` relative to the largest one."""
    c = f.coef
    big = np.max(np.abs(c))
    if big == 0.0:
        return FuncP(f.p0, [0.0], f.tag)
    keep = np.flatnonzero(np.abs(c) > tol * big)
    return FuncP(f.p0, c[: keep[-1] + 1], f.tag)


def plateau_chop(f: FuncP, window: int = 6, decay: float = 0.1, floor: float = 1e-15) -> FuncP:
    """Truncate where the coefficient envelope stops decaying.

    The envelope at k is the largest magnitude from k onwards.  The series is
    cut at the first k where the envelope falls by less than ``decay`` over
    ``window`` further indices, or drops below ``floor`` relative to the
    largest coefficient.  Smooth data decay to roundoff; sampled data with a
    noise floor get cut where the noise takes over.
    """
    c = np.asarray(f.coef, dtype=float)
    big = float(np.max(np.abs(c))) if c.size else 0.0
    if big == 0.0:
        return FuncP(f.p0, [0.0], f.tag)
    env = np.maximum.accumulate(np.abs(c)[::-1])[::-1] / big
    env = np.concatenate([env, np.zeros(window)])
    for k in range(1, c.size):
        if env[k] <= floor or env[k + window] >= decay * env[k]:
            return FuncP(f.p0, c[:k], f.tag)
    return FuncP(f.p0, c, f.tag)


def pointwise(f: FuncP, fn: Callable, degree: int = M_MAX, tol: float | None = 1e-14) -> FuncP:
    """Interpolate ``fn(f(p))`` at degree ``degree``; optionally chopped."""
    p = p_nodes(f.p0, degree)
    out = FuncP(f.p0, nodal_coef(fn(f(p))), f.tag)
    return chop(out, tol) if tol else out


class Jets:
    """Truncated Taylor expansions ``sum_k c[i, k] (p - p_i)**k`` at the nodes ``p_i``.

    Products and reciprocals are exact series algebra, so quantities built
    from a few differentiated inputs are never re-differentiated
    spectrally.  Lengths shrink by one per derivative and products keep the
    shorter length.
    """

    __slots__ = ("p0", "c")

    def __init__(self, p0: float, c):
        self.p0 = float(p0)
        self.c = np.asarray(c, dtype=float)

    @property
    def length(self) -> int:
        return self.c.shape[1]

    def _coerce(self, other):
        if isinstance(other, Jets):
            n = min(self.length, other.length)
            return self.c[:, :n], other.c[:, :n]
        out = np.zeros_like(self.c)
        out[:, 0] = other
        return self.c, out

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jets(self.p0, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jets(self.p0, a - b)

    def __neg__(self):
        return Jets(self.p0, -self.c)

    def __mul__(self, other):
        if not isinstance(other, Jets):
            return Jets(self.p0, self.c * float(other))
        a, b = self._coerce(other)
        out = np.empty_like(a)
        for k in range(a.shape[1]):
            out[:, k] = np.einsum("ij,ij->i", a[:, : k + 1], b[:, k::-1])
        return Jets(self.p0, out)

    __rmul__ = __mul__

    def __truediv__(self, s: float):
        return Jets(self.p0, self.c / float(s))

    def d(self, m: int = 1) -> "Jets":
        c = self.c
        for _ in range(m):
            c = c[:, 1:] * np.arange(1, c.shape[1])
        return Jets(self.p0, c)

    def reciprocal(self) -> "Jets":
        a = self.c
        r = np.empty_like(a)
        r[:, 0] = 1.0 / a[:, 0]
        for k in range(1, a.shape[1]):
            r[:, k] = -np.einsum("ij,ij->i", a[:, 1 : k + 1], r[:, k - 1 :: -1]) * r[:, 0]
        return Jets(self.p0, r)

    @property
    def values(self) -> np.ndarray:
        return self.c[:, 0]

    def to_funcp(self, tag: str = "derived") -> FuncP:
        return FuncP(self.p0, nodal_coef(self.values), tag)


def jets(f: FuncP, length: int, M: int = M_MAX) -> Jets:
    """Taylor jets of ``f`` of the given length at the degree-``M`` nodes."""
    p = p_nodes(f.p0, M)
    c = np.empty((p.size, length))
    g = f
    fact = 1.0
    for k in range(length):
        c[:, k] = g(p) / fact
        g = differentiate(g)
        fact *= k + 1
    return Jets(f.p0, c)


def zero_jets(p0: float, length: int, M: int = M_MAX) -> Jets:
    return Jets(p0, np.zeros((M + 1, length)))
