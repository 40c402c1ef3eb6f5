import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from csminimal import kernels
from csminimal._kernels_py import point_values
from csminimal.geometry import derivatives

BACKENDS = kernels.backends()

TAIL = [1.0, 0.0, 0.0, 1.0, math.pi / 2, 0.0, 0.0, 0.0, 0.0]
Y0 = [math.pi / 2, 0.3, 0.0]


def test_both_backends_available():
    # the extension is part of the build; a missing one means a broken install
    assert BACKENDS == ["cython", "python"]


def test_default_backend_is_compiled():
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("system, extra, kw", [
    (kernels.PROFILE, [], {}),
    (kernels.HILL_L, TAIL, dict(lam=3.0, ai=1.0, aj=2.0)),
    (kernels.HILL_S, TAIL, dict(lam=-1.0, ai=0.0, aj=1.0)),
    (kernels.HILL_CONST, TAIL, dict(lam=2.0, ai=0.5)),
    (kernels.YAU, [1.0, 0.0], {}),
])
def test_backend_parity(system, extra, kw):
    ts = np.linspace(0, 1.5, 11)
    out = [kernels.integrate(system, Y0 + extra, 0.0, 1.5, 2, t_eval=ts, backend=b, **kw)
           for b in BACKENDS]
    (s0, t0, y0, e0, n0, f0), (s1, t1, y1, e1, n1, f1) = out
    assert s0 == s1 == kernels.OK
    assert n0 == n1 and f0 == f1
    np.testing.assert_allclose(y0, y1, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(e0, e1, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("backend", BACKENDS)
def test_profile_matches_scipy_dop853(backend):
    n = 3

    def f(t, y):
        return derivatives(n, *y)

    ref = solve_ivp(f, (0, 1.0), Y0, method="DOP853", rtol=1e-13, atol=1e-13)
    _, _, y, _, _, _ = kernels.integrate(kernels.PROFILE, Y0, 0, 1.0, n, backend=backend)
    np.testing.assert_allclose(y, ref.y[:, -1], atol=1e-10)


@pytest.mark.parametrize("backend", BACKENDS)
def test_zero_length_span(backend):
    st, t, y, ye, nsteps, nfev = kernels.integrate(kernels.PROFILE, Y0, 0.5, 0.5, 2,
                                                   t_eval=[0.5], backend=backend)
    assert st == kernels.OK and t == 0.5 and nsteps == 0
    np.testing.assert_array_equal(y, Y0)
    np.testing.assert_array_equal(ye[0], Y0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_domain_error_reported(backend):
    # theta -> 0 is reached in finite time from a state heading straight down
    st, t, *_ = kernels.integrate(kernels.PROFILE, [math.pi / 2, 0.05, -math.pi / 2], 0, 5, 2,
                                  backend=backend)
    assert st in (kernels.DOMAIN_ERROR, kernels.STEP_UNDERFLOW)
    assert 0 < t < 5


@pytest.mark.parametrize("backend", BACKENDS)
def test_event_stops_at_alpha_zero(backend):
    st, t, y, *_ = kernels.integrate(kernels.PROFILE, [1.2, math.pi / 4, -math.pi / 2],
                                     0, 20, 2, event=True, backend=backend)
    assert st == kernels.EVENT
    assert abs(y[2]) < 1e-12


@pytest.mark.parametrize("backend", BACKENDS)
def test_backward_integration(backend):
    _, _, yf, *_ = kernels.integrate(kernels.PROFILE, Y0, 0, 0.8, 2, backend=backend)
    _, _, yb, *_ = kernels.integrate(kernels.PROFILE, list(yf), 0.8, 0, 2, backend=backend)
    np.testing.assert_allclose(yb, Y0, atol=1e-10)


def test_point_values_domain():
    with pytest.raises(ArithmeticError):
        point_values(2, 0.0, 0.3, 0.0)
    with pytest.raises(ArithmeticError):
        point_values(2, 1.0, math.pi / 2, 0.0)
    if "cython" in BACKENDS:
        from csminimal._kernels import point_values_c
        with pytest.raises(ArithmeticError):
            point_values_c(2, 1.0, 0.0, 0.0)
        np.testing.assert_allclose(point_values_c(3, 1.1, 0.4, 0.2),
                                   point_values(3, 1.1, 0.4, 0.2), rtol=1e-14)


def test_constant_hill_closed_form():
    # z'' + q z = 0, q > 0: z1 = cos(sqrt(q) t)
    q, T = 2.5, 1.7
    _, _, y, *_ = kernels.integrate(kernels.HILL_CONST, [math.pi / 2, math.pi / 4, 0.0] + TAIL,
                                    0, T, 2, lam=q, ai=0.0)
    w = math.sqrt(q)
    assert y[3] == pytest.approx(math.cos(w * T), abs=1e-11)
    assert y[4] == pytest.approx(-w * math.sin(w * T), abs=1e-11)
    assert y[5] == pytest.approx(math.sin(w * T) / w, abs=1e-11)
    assert y[11] == pytest.approx(T / (2 * q) - math.sin(2 * w * T) / (4 * w**3), abs=1e-11)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("span", [5e-324, 1e-300, 1e-17])
def test_subnormal_span(backend, span):
    st, t, y, *_ = kernels.integrate(kernels.PROFILE, Y0, 0.0, span, 2, backend=backend)
    assert st == kernels.OK and t == span
    np.testing.assert_allclose(y, Y0, atol=1e-15)


def test_pure_python_fallback_selected():
    code = ("from csminimal import kernels, build_curve, EmbeddingParams;"
            "print(kernels.BACKEND, build_curve(EmbeddingParams(2)).r0)")
    env = dict(os.environ, CSMINIMAL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(1.2321505471933734, abs=1e-9)
