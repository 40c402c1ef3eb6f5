"""Pointwise geometry of the immersion along the profile curve.

Every quantity is a closed form in (r, theta, alpha); t-derivatives go
through the profile equations by the chain rule.  All functions accept a
scalar or an array of arclength values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

COT_GUARD = 1e-12


@dataclass(frozen=True)
class MetricCoefficients:
    E: np.ndarray
    G: np.ndarray
    dE: np.ndarray
    dG: np.ndarray
    dlogEG: np.ndarray
    d2logEG: np.ndarray


@dataclass(frozen=True)
class CurvatureData:
    kappa_u: np.ndarray
    kappa_v: np.ndarray
    kappa_t: np.ndarray
    normA2: np.ndarray


@dataclass(frozen=True)
class FrameFunctions:
    gamma1: np.ndarray
    gamma2: np.ndarray
    gamma3: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    nu3: np.ndarray
    f12: np.ndarray
    f13: np.ndarray
    f23: np.ndarray
    weight: np.ndarray
    dlogweight: np.ndarray
    a_n: np.ndarray


def _cot2(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < COT_GUARD) or np.any(theta > np.pi / 2 - COT_GUARD):
        raise ValueError("theta too close to 0 or pi/2 for cot(2 theta)")
    return np.cos(2 * theta) / np.sin(2 * theta)


def derivatives(n, r, theta, alpha):
    """(r', theta', alpha') from the profile equations, vectorized."""
    s = np.sin(r)
    dr = np.cos(alpha)
    dth = np.sin(alpha) / s
    dal = (2 * n - 2) / s * np.cos(alpha) * _cot2(theta) - (2 * n - 1) * np.cos(r) / s * np.sin(alpha)
    return dr, dth, dal


def metric_from_state(n, r, theta, alpha):
    dr, dth, dal = derivatives(n, r, theta, alpha)
    s, c = np.sin(r), np.cos(r)
    st, ct = np.sin(theta), np.cos(theta)
    E = s**2 * ct**2
    G = s**2 * st**2
    dE = 2 * s * c * dr * ct**2 - 2 * s**2 * ct * st * dth
    dG = 2 * s * c * dr * st**2 + 2 * s**2 * st * ct * dth
    # ln(EG) = 4 ln sin r + 2 ln sin 2theta - ln 4
    cot2 = _cot2(theta)
    d2r = -np.sin(alpha) * dal
    d2th = (np.cos(alpha) * dal * s - np.sin(alpha) * c * dr) / s**2
    dlog = 4 * c / s * dr + 4 * cot2 * dth
    d2log = (-4 * dr**2 / s**2 + 4 * c / s * d2r
             - 8 * dth**2 / np.sin(2 * theta) ** 2 + 4 * cot2 * d2th)
    return MetricCoefficients(E, G, dE, dG, dlog, d2log)


def curvatures_from_state(n, r, theta, alpha):
    s, c = np.sin(r), np.cos(r)
    sa, ca = np.sin(alpha), np.cos(alpha)
    ku = ca / s * np.tan(theta) + c / s * sa
    kv = c / s * sa - ca / s / np.tan(theta)
    kt = (2 * n - 2) * (ca / s * _cot2(theta) - c / s * sa)
    normA2 = (n - 1) * ku**2 + (n - 1) * kv**2 + kt**2
    return CurvatureData(ku, kv, kt, normA2)


def frame_from_state(n, r, theta, alpha):
    s, c = np.sin(r), np.cos(r)
    sa, ca = np.sin(alpha), np.cos(alpha)
    st, ct = np.sin(theta), np.cos(theta)
    g1, g2, g3 = s * ct, s * st, c
    nu1 = c * sa * ct + ca * st
    nu2 = c * sa * st - ca * ct
    nu3 = -s * sa
    m = metric_from_state(n, r, theta, alpha)
    weight = (m.E * m.G) ** ((n - 1) / 4)
    return FrameFunctions(
        g1, g2, g3, nu1, nu2, nu3,
        nu1 * g2 - nu2 * g1, nu1 * g3 - nu3 * g1, nu2 * g3 - nu3 * g2,
        weight, (n - 1) / 4 * m.dlogEG, (n - 1) / 2 * m.dlogEG,
    )


def metric_coeffs(curve, t):
    return metric_from_state(curve.n, *curve.evaluate(t))


def curvatures(curve, t, n=None):
    if n is None:
        n = curve.n
    elif n != curve.n:
        raise ValueError(f"curve was built for n={curve.n}, not n={n}")
    return curvatures_from_state(n, *curve.evaluate(t))


def frame(curve, t):
    return frame_from_state(curve.n, *curve.evaluate(t))


FRAME_COLUMNS = ("t", "r", "theta", "alpha", "E", "G", "kappa_u", "kappa_v", "kappa_t",
                 "normA2", "gamma1", "gamma2", "gamma3", "nu1", "nu2", "nu3",
                 "f12", "f13", "f23")


def sampled_frames(curve, num=512):
    """Columns of FRAME_COLUMNS on ``num`` equispaced points of [0, T)."""
    t = np.arange(num) * (curve.period / num)
    r, th, al = curve.evaluate(t)
    m = metric_from_state(curve.n, r, th, al)
    k = curvatures_from_state(curve.n, r, th, al)
    f = frame_from_state(curve.n, r, th, al)
    cols = {"t": t, "r": r, "theta": th, "alpha": al, "E": m.E, "G": m.G,
            "kappa_u": k.kappa_u, "kappa_v": k.kappa_v, "kappa_t": k.kappa_t,
            "normA2": k.normA2}
    for name in FRAME_COLUMNS[10:]:
        cols[name] = getattr(f, name)
    return cols


def write_frames_csv(curve, fh, num=512):
    cols = sampled_frames(curve, num)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FRAME_COLUMNS)
    for row in zip(*(cols[c] for c in FRAME_COLUMNS)):
        w.writerow([format(float(v), ".17g") for v in row])
