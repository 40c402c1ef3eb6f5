import json
import math
import time

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from conftest import NS, get_curve
from csminimal.errors import DomainError, ShootingError
from csminimal.profile import (EmbeddingParams, ProfileCurve, ProfileState, build_curve,
                               eval_profile, integrate_profile, mismatch, ode_rhs, shoot)


def _sympy_rhs(n):
    r, th, al = sp.symbols("r theta alpha")
    exprs = (sp.cos(al), sp.sin(al) / sp.sin(r),
             (2 * n - 2) * sp.cos(al) * sp.cot(2 * th) / sp.sin(r)
             - (2 * n - 1) * sp.cot(r) * sp.sin(al))
    return sp.lambdify((r, th, al), exprs, "mpmath")


def test_ode_rhs_sympy_oracle():
    f = _sympy_rhs(3)
    want = [float(v) for v in f(1.2, 0.6, 0.3)]
    np.testing.assert_allclose(ode_rhs((0.0, 1.2, 0.6, 0.3), 3), want, rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 7), r=st.floats(0.1, math.pi - 0.1), th=st.floats(0.05, 1.52),
       al=st.floats(-7, 7))
def test_ode_rhs_matches_sympy(n, r, th, al):
    want = [float(v) for v in _sympy_rhs(n)(r, th, al)]
    np.testing.assert_allclose(ode_rhs((0.0, r, th, al), n), want, rtol=1e-11, atol=1e-11)


def test_ode_rhs_domain():
    with pytest.raises(DomainError):
        ode_rhs((0.0, 0.0, 0.5, 0.0), 2)
    with pytest.raises(DomainError):
        ode_rhs((0.0, 1.0, 0.0, 0.0), 2)


def test_params_validation():
    with pytest.raises(ValueError):
        EmbeddingParams(1)
    with pytest.raises(ValueError):
        EmbeddingParams(2, ode_tol=0.0)


@pytest.mark.parametrize("n", NS)
def test_shoot_converges(n):
    t = time.perf_counter()
    shot = shoot(EmbeddingParams(n))
    assert time.perf_counter() - t < 10
    assert abs(shot.residual) < 1e-8
    assert abs(shot.alpha_star) < 1e-10
    assert shot.theta0 > 0
    assert shot.monotone


@pytest.mark.parametrize("n", NS)
def test_shot_against_scipy(n):
    # independent integrator with its own event location
    shot = shoot(EmbeddingParams(n))

    def f(t, y):
        return ode_rhs((t, *y), n)

    def ev(t, y):
        return y[2]
    ev.direction = 1
    ev.terminal = True
    sol = solve_ivp(f, (0, 20), [shot.r0, math.pi / 4, -math.pi / 2], method="DOP853",
                    rtol=1e-13, atol=1e-13, events=ev)
    te, ye = sol.t_events[0][0], sol.y_events[0][0]
    assert te == pytest.approx(shot.s_star, abs=1e-9)
    assert ye[0] == pytest.approx(math.pi / 2, abs=1e-9)
    assert ye[1] == pytest.approx(shot.theta0, abs=1e-9)


def test_known_values_n2():
    c = get_curve(2)
    assert c.r0 == pytest.approx(1.2321505471933734, abs=1e-9)
    assert c.period == pytest.approx(2.912140758508052, abs=1e-9)
    assert c.theta0 == pytest.approx(0.18872370697960547, abs=1e-9)


def test_mismatch_changes_sign():
    p = EmbeddingParams(2)
    r0 = get_curve(2).r0
    assert mismatch(r0 - 0.05, p) * mismatch(r0 + 0.05, p) < 0


def test_shooting_failure_has_scan_table():
    p = EmbeddingParams(2, max_arclength=0.01)
    with pytest.raises(ShootingError) as exc:
        shoot(p)
    assert exc.value.scan
    assert "mismatch" in exc.value.scan_table()


@pytest.mark.parametrize("n", NS)
def test_theta_monotone_on_first_quarter(n):
    c = get_curve(n)
    q = len(c.t) // 4
    # theta rises from theta0 to pi/4 over the first quarter period
    assert np.all(np.diff(c.theta[:q + 1]) > 0)


@pytest.mark.parametrize("n", NS)
def test_self_convergence(n):
    a, b = get_curve(n, 1e-12), get_curve(n, 1e-13)
    assert abs(a.r0 - b.r0) < 1e-9 * abs(b.r0)
    assert abs(a.period - b.period) < 1e-9 * b.period


def test_json_round_trip(curve2):
    text = curve2.to_json()
    doc = json.loads(text)
    for key in ("r0", "theta0", "period", "n", "ode_tol"):
        assert key in doc
    back = ProfileCurve.from_json(text)
    assert back.r0 == curve2.r0 and back.period == curve2.period
    np.testing.assert_array_equal(back.alpha, curve2.alpha)
    assert back.to_json() == text


def test_json_version_checked(curve2):
    doc = curve2.to_dict()
    doc["version"] = 99
    with pytest.raises(ValueError):
        ProfileCurve.from_dict(doc)


def test_curve_arrays_read_only(curve2):
    with pytest.raises(ValueError):
        curve2.r[0] = 0.0


@settings(max_examples=40, deadline=None)
@given(t=st.floats(-10.0, 10.0))
def test_eval_profile_periodicity(t):
    c = get_curve(2)
    a = eval_profile(c, t)
    b = eval_profile(c, t + c.period)
    assert b.r == pytest.approx(a.r, abs=1e-9)
    assert b.theta == pytest.approx(a.theta, abs=1e-9)
    assert b.alpha - a.alpha == pytest.approx(2 * math.pi, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0.0, 2.9))
def test_eval_methods_agree(t):
    c = get_curve(2)
    p = eval_profile(c, t)
    r, th, al = c.evaluate([t])
    assert (r[0], th[0], al[0]) == pytest.approx((p.r, p.theta, p.alpha), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.0, 1.4))
def test_half_period_symmetry(t):
    c = get_curve(3)
    a, b = eval_profile(c, t), eval_profile(c, t + c.period / 2)
    assert b.theta == pytest.approx(math.pi / 2 - a.theta, abs=1e-9)
    assert b.r == pytest.approx(math.pi - a.r, abs=1e-9)


def test_integrate_profile_backward(curve2):
    T = curve2.period
    fwd = integrate_profile(ProfileState(0.0, *curve2.initial_state), 2, T, t_eval=[T])
    back = integrate_profile(fwd[0], 2, 0.0, t_eval=[0.0])[0]
    assert (back.r, back.theta, back.alpha) == pytest.approx(curve2.initial_state, abs=1e-10)


def test_build_curve_requires_even_samples():
    with pytest.raises(ValueError):
        build_curve(EmbeddingParams(2), samples=7)
