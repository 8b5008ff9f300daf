"""Derivatives of sampled fields along one axis, by grid kind.

Kinds:
    ``fourier``       uniform periodic grid, spectral (FFT) derivative
    ``periodic-fd``   uniform periodic grid, second-order centred differences
    ``chebyshev``     extreme-point grid in increasing order, spectral
    ``uniform``       uniform non-periodic grid, second order with one-sided ends
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

KINDS = ("fourier", "periodic-fd", "chebyshev", "uniform")


def cheb_matrix(coord: np.ndarray) -> np.ndarray:
    """Differentiation matrix for extreme points listed in increasing order."""
    n = coord.size - 1
    if n == 0:
        return np.zeros((1, 1))
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    D = D[::-1, ::-1]
    return D * 2.0 / (coord[-1] - coord[0])


def _fourier(f: np.ndarray, period: float, axis: int) -> np.ndarray:
    n = f.shape[axis]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=period / n)
    F = np.fft.rfft(f, axis=axis)
    shape = [1] * f.ndim
    shape[axis] = k.size
    mult = 1j * k.reshape(shape)
    if n % 2 == 0:
        # the Nyquist mode has no well-defined odd derivative
        idx = [slice(None)] * f.ndim
        idx[axis] = -1
        mult = mult.copy()
        mult[tuple(idx)] = 0.0
    return np.fft.irfft(F * mult, n=n, axis=axis)


def derivative(f, coord, kind: str, axis: int = 0, period: float | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    coord = np.asarray(coord, dtype=float)
    if kind == "fourier":
        if period is None:
            raise InvalidInputError("fourier derivative needs the period")
        return _fourier(f, period, axis)
    if kind == "periodic-fd":
        if period is None:
            raise InvalidInputError("periodic derivative needs the period")
        h = period / f.shape[axis]
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
    if kind == "chebyshev":
        D = cheb_matrix(coord)
        return np.moveaxis(np.tensordot(D, np.moveaxis(f, axis, 0), axes=(1, 0)), 0, axis)
    if kind == "uniform":
        return np.gradient(f, coord, axis=axis, edge_order=2)
    raise InvalidInputError(f"unknown grid kind {kind!r}")


def trig_resample(f: np.ndarray, m: int) -> np.ndarray:
    """Trigonometric interpolation of one period of samples onto ``m`` points."""
    n = f.size
    F = np.fft.rfft(f)
    G = np.zeros(m // 2 + 1, dtype=complex)
    kk = min(F.size, G.size)
    G[:kk] = F[:kk]
    if n % 2 == 0 and kk == F.size:
        G[kk - 1] *= 0.5 if m > n else 1.0
    if m % 2 == 0 and m < n:
        G[-1] = G[-1].real
    return np.fft.irfft(G, n=m) * (m / n)


def trig_shift(f: np.ndarray, delta: float, period: float) -> np.ndarray:
    """Samples of f(x - delta) from one period of samples of f."""
    n = f.size
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=period / n)
    F = np.fft.rfft(f) * np.exp(-1j * k * delta)
    if n % 2 == 0:
        F[-1] = F[-1].real * np.cos(k[-1] * delta)
    return np.fft.irfft(F, n=n)


def cumulative(f, coord, kind: str, axis: int = 0) -> np.ndarray:
    """Integral from coord[0] to each node along ``axis``."""
    from numpy.polynomial import chebyshev as C
    from scipy.integrate import cumulative_simpson

    from .funcrep import nodal_coef

    f = np.asarray(f, dtype=float)
    coord = np.asarray(coord, dtype=float)
    if kind == "chebyshev":
        n = coord.size - 1
        x = -np.cos(np.pi * np.arange(n + 1) / n)
        g = np.moveaxis(f, axis, 0)
        coef = nodal_coef(g.reshape(n + 1, -1))
        I = C.chebval(x, C.chebint(coef, lbnd=-1.0)).T * (coord[-1] - coord[0]) / 2.0
        return np.moveaxis(I.reshape(g.shape), 0, axis)
    if kind == "uniform":
        return cumulative_simpson(f, x=coord, axis=axis, initial=0.0)
    raise InvalidInputError(f"no vertical quadrature for grid kind {kind!r}")


def second_derivative(f, coord, kind: str, axis: int = 0, period: float | None = None) -> np.ndarray:
    """Compact second derivative: three-point on finite-difference grids."""
    f = np.asarray(f, dtype=float)
    if kind == "periodic-fd":
        if period is None:
            raise InvalidInputError("periodic derivative needs the period")
        h = period / f.shape[axis]
        return (np.roll(f, -1, axis=axis) - 2.0 * f + np.roll(f, 1, axis=axis)) / h**2
    if kind == "uniform":
        coord = np.asarray(coord, dtype=float)
        h = coord[1] - coord[0]
        g = np.moveaxis(f, axis, 0)
        out = np.empty_like(g)
        out[1:-1] = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / h**2
        out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / h**2
        out[-1] = (2.0 * g[-1] - 5.0 * g[-2] + 4.0 * g[-3] - g[-4]) / h**2
        return np.moveaxis(out, 0, axis)
    return derivative(derivative(f, coord, kind, axis, period), coord, kind, axis, period)
