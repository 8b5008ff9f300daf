import numpy as np
import pytest

from crestline import funcrep
from crestline.errors import DegenerateFitError, InvalidInputError
from crestline.funcrep import FuncP


def dense(p0, n=401):
    return np.linspace(p0, 0.0, n)


def test_fit_exact_polynomial():
    p = funcrep.p_nodes(-1.0, 8)
    f = funcrep.fit(p, p + 1.0, 4)
    pp = dense(-1.0)
    assert np.max(np.abs(f(pp) - (pp + 1.0))) <= 1e-14


def test_fit_exponential():
    p = funcrep.p_nodes(-1.0, 12)
    f = funcrep.fit(p, np.exp(p), 12)
    pp = dense(-1.0)
    assert np.max(np.abs(f(pp) - np.exp(pp))) <= 1e-10


def test_fit_too_few_points():
    with pytest.raises(DegenerateFitError):
        funcrep.fit([-1.0, -0.5, 0.0], [0.0, 0.5, 1.0], 4)


def test_fit_rejects_nan():
    with pytest.raises(InvalidInputError):
        funcrep.fit([-1.0, -0.5, 0.0], [0.0, np.nan, 1.0], 1)


def test_fit_reports_residual():
    p = np.linspace(-1.0, 0.0, 30)
    f = funcrep.fit(p, np.abs(p + 0.5), 4)
    assert f.residual > 1e-3


def test_collocation_reproduces_samples():
    p = funcrep.p_nodes(-2.0, 20)
    vals = np.cos(3 * p)
    f = funcrep.fit(p, vals, 20)
    assert np.max(np.abs(f(p) - vals)) <= 1e-12 * np.max(np.abs(vals))


def test_differentiate_examples():
    f = funcrep.from_function(lambda p: p + 1.0, -1.0, 4)
    d = funcrep.differentiate(f)
    assert np.allclose(d(dense(-1.0)), 1.0, atol=1e-14)
    sq = funcrep.from_function(lambda p: p**2, -1.0, 4)
    nodes = funcrep.p_nodes(-1.0, 4)
    assert np.max(np.abs(funcrep.differentiate(sq)(nodes) - 2 * nodes)) <= 1e-14


def test_differentiate_singular_profile():
    f = funcrep.from_function(lambda p: (1 - 2 * p) ** -0.5, -1.5, 24)
    pp = np.linspace(-1.4, 0.0, 300)
    err = np.abs(funcrep.differentiate(f)(pp) - (1 - 2 * pp) ** -1.5)
    assert np.max(err) <= 1e-8


def test_multiply_examples():
    p = funcrep.from_function(lambda p: p, -1.0, 1)
    sq = p * p
    pp = dense(-1.0)
    assert np.max(np.abs(sq(pp) - pp**2)) <= 1e-15
    f = funcrep.from_function(np.cos, -1.0, 10)
    one = funcrep.constant(1.0, -1.0)
    prod = funcrep.multiply(f, one)
    assert np.array_equal(prod.coef[: f.coef.size], f.coef)
    r = funcrep.from_function(lambda p: (1 - 2 * p) ** -0.5, -1.5, 24)
    q = np.linspace(-1.4, 0.0, 300)
    assert np.max(np.abs((r * r)(q) - 1.0 / (1 - 2 * q))) <= 1e-9


def test_domain_mismatch():
    with pytest.raises(InvalidInputError):
        funcrep.add(funcrep.constant(1.0, -1.0), funcrep.constant(1.0, -2.0))


def test_lowpass_examples():
    f = funcrep.from_function(np.exp, -1.0, 12)
    assert np.array_equal(funcrep.lowpass(f, 12).coef, f.coef)
    coef = np.zeros(17)
    coef[:2] = [0.5, 0.5]
    coef[16] = 1e-8
    noisy = FuncP(-1.0, coef)
    clean = funcrep.lowpass(noisy, 4)
    pp = dense(-1.0)
    assert np.max(np.abs(clean(pp) - (pp + 1.0))) <= 1e-12
    mean = funcrep.lowpass(f, 0)
    assert np.allclose(mean(pp), f.coef[0])


def test_antiderivative_vanishes_at_p0():
    f = funcrep.from_function(np.exp, -2.0, 16)
    F = funcrep.antiderivative(f)
    assert abs(F(-2.0)) <= 1e-15
    assert abs(F(0.0) - (1.0 - np.exp(-2.0))) <= 1e-13


def test_degree_cap_after_product():
    f = funcrep.from_function(np.exp, -1.0, 50)
    assert (f * f).degree == funcrep.M_MAX


def test_invalid_domain_and_tag():
    with pytest.raises(InvalidInputError):
        FuncP(0.5, [1.0])
    with pytest.raises(InvalidInputError):
        FuncP(-1.0, [1.0], tag="guessed")
    with pytest.raises(InvalidInputError):
        FuncP(-1.0, [np.inf])


def test_chop_and_pointwise():
    f = FuncP(-1.0, [1.0, 0.5, 1e-17, 0.0])
    assert funcrep.chop(f).degree == 1
    g = funcrep.pointwise(funcrep.from_function(lambda p: p + 2.0, -1.0, 1), np.sqrt)
    pp = dense(-1.0)
    assert np.max(np.abs(g(pp) - np.sqrt(pp + 2.0))) <= 1e-14
