import warnings

import numpy as np
import pytest

from crestline import forward, funcrep, validate
from crestline.errors import AdmissibilityError, InvalidInputError, NonconvergenceError
from crestline.forward import PhysParams

G = 9.81
TWO_PI = 2 * np.pi


# ---------------------------------------------------------------- laminar


def test_still_water_is_hydrostatic():
    ff = forward.laminar_flow(0.0, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    assert np.all(ff.eta == 0) and np.all(ff.v == 0) and np.all(ff.u == 0)
    assert np.max(np.abs(ff.P + G * ff.y)) <= 1e-15


def test_shear_laminar_flow(shear_flow):
    assert np.max(np.abs(shear_flow.u - (shear_flow.y + 1.0))) <= 1e-15
    assert np.max(np.abs(shear_flow.d_dy(shear_flow.u) - 1.0)) <= 1e-12


def test_laminar_rejects_supercritical_current():
    with pytest.raises(AdmissibilityError):
        forward.laminar_flow(1.5, PhysParams(d=1.0, c=1.0, lam=TWO_PI))


def test_laminar_flows_have_zero_euler_residual(shear_flow):
    still = forward.laminar_flow(0.0, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    for ff in (still, shear_flow):
        rep = validate.euler_residual(ff)
        assert max(rep.inf.values()) <= 1e-12


def test_params_validation():
    with pytest.raises(InvalidInputError):
        PhysParams(d=-1.0, c=1.0, lam=1.0)
    with pytest.raises(InvalidInputError):
        PhysParams(d=1.0, c=1.0, lam=1.0, g=0.0)


def test_laminar_height_closed_forms():
    h, s0, _ = forward.laminar_height(0.0, 1 + 2 * G, -1.0)
    p = np.linspace(-1.0, 0.0, 11)
    assert np.max(np.abs(h(p) - (p + 1.0))) <= 1e-12
    h, s0, _ = forward.laminar_height(1.0, 1 + 2 * G, -1.5)
    p = np.linspace(-1.5, 0.0, 11)
    assert np.max(np.abs(h(p) - (2 - np.sqrt(1 - 2 * p)))) <= 1e-10


def test_laminar_height_below_minimum_head():
    with pytest.raises(NonconvergenceError):
        forward.laminar_height(0.0, 1.0, -1.0)


# ---------------------------------------------------------------- linear oracle


def test_linear_wave_zero_amplitude_is_still_water():
    ff = forward.linear_wave(0.0, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    assert ff.params.c == pytest.approx(np.sqrt(G * np.tanh(1.0)), rel=1e-14)
    assert np.all(ff.u == 0) and np.all(ff.eta == 0)


def test_dispersion_speed_value():
    assert forward.dispersion_speed(G, 1.0, TWO_PI) == pytest.approx(2.7334, abs=5e-5)


def test_linear_wave_rejects_negative_amplitude():
    with pytest.raises(InvalidInputError):
        forward.linear_wave(-0.01, PhysParams(d=1.0, c=1.0, lam=TWO_PI))


def test_linear_wave_euler_residual():
    ff = forward.linear_wave(0.01, PhysParams(d=1.0, c=1.0, lam=TWO_PI), nx=128, ns=33)
    rep = validate.euler_residual(ff)
    assert max(rep.inf.values()) <= 10 * 0.01**2


# ---------------------------------------------------------------- Newton solver


def test_flat_laminar_needs_no_newton_step():
    hf = forward.solve_height_equation(0.0, 1 + 2 * G, -1.0, TWO_PI, 16, 16)
    assert hf.info["iterations"] == 0
    assert np.max(np.abs(hf.h - (hf.p + 1.0)[None, :])) <= 1e-14


def _linear_fd(eps, nq, npi):
    prm = PhysParams(d=1.0, c=1.0, lam=TWO_PI)
    c, p0, Q = forward.linear_constants(eps, prm)
    hl, _, _ = forward.laminar_height(0.0, Q, p0)
    q = np.arange(nq) * TWO_PI / nq
    p = p0 + np.arange(npi + 1) * (-p0) / npi
    h0 = forward.wave_initial_guess(hl, q, p, TWO_PI, eps)
    return forward.solve_height_equation(0.0, Q, p0, TWO_PI, nq, npi, h0, wave_height=2 * eps)


def test_linear_wave_from_newton():
    eps = 0.01
    hf = _linear_fd(eps, 64, 32)
    eta = hf.h[:, -1] - hf.mean_depth()
    assert np.max(np.abs(eta - eps * np.cos(hf.q))) <= 10 * eps**2
    rep = validate.height_eq_residual(hf)
    assert max(rep.inf.values()) <= 1e-10 * max(1.0, np.max(np.abs(hf.h)))


def test_newton_second_order_convergence():
    # difference between successive grids shrinks by about four
    eps = 0.01
    e = {n: _linear_fd(eps, n, n // 2) for n in (32, 64, 128)}
    s = {n: e[n].h[:, -1] - e[n].mean_depth() for n in e}
    d1 = np.max(np.abs(s[64][::2] - s[32]))
    d2 = np.max(np.abs(s[128][::2] - s[64]))
    assert d1 / d2 >= 3.5


def test_newton_fails_below_minimum_head():
    with pytest.raises(NonconvergenceError) as info:
        forward.solve_height_equation(0.0, 0.0, -1.0, TWO_PI, 16, 16)
    assert info.value.last_residual is not None


def test_newton_rejects_small_grid_and_bad_guess():
    with pytest.raises(InvalidInputError):
        forward.solve_height_equation(0.0, 1 + 2 * G, -1.0, TWO_PI, 4, 16)
    bad = np.zeros((16, 17))
    with pytest.raises(AdmissibilityError):
        forward.solve_height_equation(0.0, 1 + 2 * G, -1.0, TWO_PI, 16, 16, bad)


def test_fd_wave_euler_residual_is_second_order():
    from conftest import fd_wave

    # rows next to the boundaries differentiate one-sided stencils twice and lose an order
    inner, full, h2 = [], [], []
    for n in (32, 64, 128):
        hf = fd_wave(0.0, n, n // 2)
        ff = forward.flow_from_height(hf, forward.params_from_height(hf, 2.7334))
        rep = validate.euler_residual(ff)
        inner.append(max(np.max(np.abs(rep.residuals[k][:, 2:-2])) for k in ("momentum_x", "momentum_y", "continuity")))
        full.append(max(rep.inf.values()))
        h2.append((TWO_PI / n) ** 2 + (hf.p[1] - hf.p[0]) ** 2)
    C = [r / h for r, h in zip(inner, h2)]
    print(f"interior C = {', '.join(f'{c:.3g}' for c in C)}; full-field C = {full[-1] / h2[-1]:.3g}")
    assert inner[0] / inner[1] >= 3.5 and inner[1] / inner[2] >= 3.5
    assert C[-1] <= 1.25 * C[0]


# ---------------------------------------------------------------- height -> flow


def test_flow_from_still_height():
    hf = forward.solve_height_equation(0.0, 1 + 2 * G, -1.0, TWO_PI, 16, 16)
    ff = forward.flow_from_height(hf, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    assert np.max(np.abs(ff.u)) <= 1e-13 and np.max(np.abs(ff.v)) <= 1e-13
    assert np.max(np.abs(ff.P + G * ff.y)) <= 1e-12
    assert np.max(np.abs(ff.eta)) <= 1e-14


def test_flow_from_shear_height():
    p0, M = -1.5, 32
    p = funcrep.p_nodes(p0, M)
    q = np.arange(16) * TWO_PI / 16
    h = np.broadcast_to(2 - np.sqrt(1 - 2 * p), (16, M + 1)).copy()
    hf = forward.HeightField(p0, q, p, h, funcrep.constant(1.0, p0), 1 + 2 * G, TWO_PI, G, "fourier", "chebyshev")
    ff = forward.flow_from_height(hf, PhysParams(d=1.0, c=2.0, lam=TWO_PI))
    assert np.max(np.abs(ff.u - (ff.y + 1.0))) <= 1e-12
    assert np.max(np.abs(ff.v)) <= 1e-14
    assert np.max(np.abs(ff.P[:, -1])) <= 1e-10


def test_surface_pressure_on_fd_wave():
    hf = _linear_fd(0.01, 64, 32)
    ff = forward.flow_from_height(hf, forward.params_from_height(hf, 2.7334))
    assert np.max(np.abs(ff.P[:, -1] - ff.params.P0)) <= 1e-10


def test_flow_from_height_rejects_inadmissible():
    hf = forward.solve_height_equation(0.0, 1 + 2 * G, -1.0, TWO_PI, 16, 16)
    bad = forward.HeightField(hf.p0, hf.q, hf.p, -hf.h, hf.gamma, hf.Q, hf.lam, hf.g)
    with pytest.raises(AdmissibilityError):
        forward.flow_from_height(bad, PhysParams(d=1.0, c=1.0, lam=TWO_PI))


# ---------------------------------------------------------------- measurements


def test_extract_axis_still_water():
    ff = forward.laminar_flow(0.0, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    ax = forward.extract_axis_data(ff, ff.x[3])
    assert np.all(ax.w == -1.0) and ax.y[0] == -1.0 and ax.y[-1] == 0.0


def test_extract_axis_shear(shear_axis):
    assert np.max(np.abs(shear_axis.w - (shear_axis.y - 1.0))) <= 1e-15
    assert "symmetry-unverified" not in shear_axis.flags


def test_extract_axis_linear(linear_axis):
    eps, c, k = 0.01, forward.dispersion_speed(G, 1.0, TWO_PI), 1.0
    y = linear_axis.y
    expected = eps * c * k * np.cosh(k * (y + 1)) / np.sinh(k) - c
    assert np.max(np.abs(linear_axis.w - expected)) <= 1e-14


def test_extract_axis_off_grid_is_flagged():
    ff = forward.linear_wave(0.01, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    ax = forward.extract_axis_data(ff, 0.05)
    assert "interpolated" in ax.flags and "symmetry-unverified" in ax.flags


def test_gamma_from_flow_examples(shear_flow):
    still = forward.laminar_flow(0.0, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    assert forward.gamma_from_flow(still).sup() <= 1e-12
    gs = forward.gamma_from_flow(shear_flow)
    assert np.max(np.abs(gs(gs.nodes(16)) - 1.0)) <= 1e-8
    lw = forward.linear_wave(0.01, PhysParams(d=1.0, c=1.0, lam=TWO_PI), nx=128)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert forward.gamma_from_flow(lw).sup() <= 10 * 0.01**2


def test_gamma_from_flow_flags_non_steady_field():
    ff = forward.linear_wave(0.01, PhysParams(d=1.0, c=1.0, lam=TWO_PI))
    u = ff.u + 0.1 * np.sin(ff.x)[:, None] * ff.y
    bad = forward.FlowField(ff.params, ff.x, ff.s, ff.y, u, ff.v, ff.P, ff.eta)
    with pytest.warns(UserWarning, match="not a steady wave"):
        forward.gamma_from_flow(bad)
