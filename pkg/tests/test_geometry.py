import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import get_curve
from csminimal.geometry import (FRAME_COLUMNS, curvatures, curvatures_from_state, frame,
                                frame_from_state, metric_coeffs, sampled_frames,
                                write_frames_csv)

states = st.tuples(st.integers(2, 6), st.floats(0.1, math.pi - 0.1), st.floats(0.05, 1.52),
                   st.floats(-7, 7))


@settings(max_examples=100, deadline=None)
@given(states)
def test_pointwise_identities(s):
    n, r, th, al = s
    f = frame_from_state(n, r, th, al)
    k = curvatures_from_state(n, r, th, al)
    g = np.array([f.gamma1, f.gamma2, f.gamma3])
    nu = np.array([f.nu1, f.nu2, f.nu3])
    assert np.linalg.norm(g) == pytest.approx(1, abs=1e-14)
    assert np.linalg.norm(nu) == pytest.approx(1, abs=1e-14)
    assert abs(g @ nu) < 1e-14
    assert abs(f.f12 - math.sin(r) * math.cos(al)) < 1e-14
    tr = (n - 1) * (k.kappa_u + k.kappa_v) + k.kappa_t
    assert abs(tr) < 1e-10 * max(1.0, float(k.normA2))


def test_kappa_t_is_curve_normal_curvature(curve):
    # kappa_t = -<gamma'', nu> with gamma'' from central differences
    t = np.linspace(0.1, curve.period - 0.1, 9)
    h = 1e-4

    def g(tt):
        f = frame(curve, tt)
        return np.stack([f.gamma1, f.gamma2, f.gamma3])

    gdd = (g(t + h) - 2 * g(t) + g(t - h)) / h**2
    f = frame(curve, t)
    nu = np.stack([f.nu1, f.nu2, f.nu3])
    np.testing.assert_allclose(-np.sum(gdd * nu, axis=0), curvatures(curve, t).kappa_t,
                               atol=1e-5)


def test_orbit_curvatures_from_normal(curve):
    # along each S^{n-1} orbit dN = kappa dx, with x ~ gamma_i y and N ~ nu_i y
    t = np.linspace(0.05, curve.period - 0.05, 17)
    f = frame(curve, t)
    k = curvatures(curve, t)
    np.testing.assert_allclose(k.kappa_u, f.nu1 / f.gamma1, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(k.kappa_v, f.nu2 / f.gamma2, rtol=1e-12, atol=1e-12)


def test_dE_matches_finite_difference(curve):
    t = np.linspace(0.2, curve.period - 0.2, 11)
    h = 1e-5
    m = metric_coeffs(curve, t)
    fd_E = (metric_coeffs(curve, t + h).E - metric_coeffs(curve, t - h).E) / (2 * h)
    fd_G = (metric_coeffs(curve, t + h).G - metric_coeffs(curve, t - h).G) / (2 * h)
    np.testing.assert_allclose(m.dE, fd_E, atol=1e-8)
    np.testing.assert_allclose(m.dG, fd_G, atol=1e-8)


def test_log_derivatives_match_finite_difference(curve):
    t = np.linspace(0.2, curve.period - 0.2, 11)
    h = 1e-4
    m = metric_coeffs(curve, t)
    u = lambda tt: np.log(metric_coeffs(curve, tt).E * metric_coeffs(curve, tt).G)
    np.testing.assert_allclose(m.dlogEG, (u(t + h) - u(t - h)) / (2 * h), atol=1e-7)
    np.testing.assert_allclose(m.d2logEG, (u(t + h) - 2 * u(t) + u(t - h)) / h**2,
                               rtol=1e-5, atol=1e-5)


def test_parity_along_curve(curve):
    T = curve.period
    t = np.linspace(0.05, T / 2 - 0.05, 20)
    a, b = frame(curve, t), frame(curve, T - t)
    np.testing.assert_allclose(a.a_n, -b.a_n, atol=1e-10)
    np.testing.assert_allclose(a.weight, b.weight, rtol=1e-10)
    ma, mb = metric_coeffs(curve, t), metric_coeffs(curve, T - t)
    np.testing.assert_allclose(ma.E * ma.G, mb.E * mb.G, rtol=1e-10)
    ka, kb = curvatures(curve, t), curvatures(curve, T - t)
    np.testing.assert_allclose(ka.normA2, kb.normA2, rtol=1e-9)


def test_curvatures_reject_wrong_n(curve2):
    with pytest.raises(ValueError):
        curvatures(curve2, 0.1, n=3)


def test_frames_csv(curve2, tmp_path):
    cols = sampled_frames(curve2, 16)
    assert list(cols) == list(FRAME_COLUMNS)
    path = tmp_path / "f.csv"
    with open(path, "w") as fh:
        write_frames_csv(curve2, fh, 16)
    rows = path.read_text().splitlines()
    assert rows[0].split(",") == list(FRAME_COLUMNS)
    assert len(rows) == 17
    assert float(rows[1].split(",")[1]) == math.pi / 2
