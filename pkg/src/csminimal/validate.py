"""Invariant suites: each returns a list of Check rows (name, value, tol, passed)."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .geometry import curvatures_from_state, derivatives, frame_from_state
from .hill import (ConstantPotential, HillPotential, eigenfunction_zeros, monodromy,
                   periodic_eigenvalues)
from .spectrum import first_nonzero_eigenvalue, stability_index
from .yau import yau_check


class Check(NamedTuple):
    suite: str
    name: str
    value: float
    tol: float
    passed: bool

    def to_dict(self):
        return {"suite": self.suite, "name": self.name, "value": self.value,
                "tol": self.tol, "passed": self.passed}


def _check(suite, name, value, tol, passed=None):
    value = float(value)
    if passed is None:
        passed = bool(value < tol)
    return Check(suite, name, value, float(tol), bool(passed))


def geometry_suite(curve, num=1000, tol=1e-8):
    n = curve.n
    ts = np.linspace(0.0, curve.period, num, endpoint=False)
    r, th, al = curve.evaluate(ts)
    f = frame_from_state(n, r, th, al)
    k = curvatures_from_state(n, r, th, al)
    dr, dth, _ = derivatives(n, r, th, al)
    g = np.stack([f.gamma1, f.gamma2, f.gamma3])
    nu = np.stack([f.nu1, f.nu2, f.nu3])
    rows = [
        ("gamma_unit", np.abs(np.linalg.norm(g, axis=0) - 1)),
        ("nu_unit", np.abs(np.linalg.norm(nu, axis=0) - 1)),
        ("gamma_dot_nu", np.abs(np.sum(g * nu, axis=0))),
        ("trace", np.abs((n - 1) * (k.kappa_u + k.kappa_v) + k.kappa_t)),
        ("arclength", np.abs(dr**2 + np.sin(r) ** 2 * dth**2 - 1)),
        ("f12", np.abs(f.f12 - np.sin(r) * np.cos(al))),
    ]
    return [_check("geometry", name, np.max(v), tol) for name, v in rows]


def _backward(curve, ts):
    # independent integration to -t from the initial state
    y0 = list(curve.initial_state)
    status, t, _, ye, _, _ = kernels.integrate(
        kernels.PROFILE, y0, 0.0, -ts[-1], curve.n, rtol=curve.ode_tol,
        atol=curve.ode_tol, t_eval=-ts)
    if status < 0:
        raise ArithmeticError(f"backward profile integration failed at t={t!r}")
    return ye[:, 0], ye[:, 1], ye[:, 2]


def symmetry_suite(curve, num=512, tol=1e-7, modes=((1, 1), (2, 1), (1, 2), (2, 2))):
    ts = np.linspace(0.0, curve.period, num + 1)
    r, th, al = curve.evaluate(ts)
    rb, thb, alb = _backward(curve, ts)
    out = [
        _check("symmetry", "theta_even", np.max(np.abs(thb - th)), tol),
        _check("symmetry", "r_reflection", np.max(np.abs(rb + r - math.pi)), tol),
        _check("symmetry", "alpha_odd", np.max(np.abs(alb + al)), tol),
        _check("symmetry", "alpha_winding", abs(al[-1] - al[0] - 2 * math.pi), tol),
    ]
    for kind in ("L", "S"):
        for i, j in modes:
            pot = HillPotential(curve, kind, i, j)
            v, vb = pot.from_state(r, th, al), pot.from_state(rb, thb, alb)
            sc = max(1.0, float(np.max(np.abs(v))))
            out.append(_check("symmetry", f"V_even[{kind}{i},{j}]",
                              np.max(np.abs(v - vb)) / sc, tol))
    return out


def known_pairs(n):
    """(kind, i, j, lambda) for the explicit periodic eigenfunctions."""
    N = 2 * n - 1
    return [("S", 1, 1, -N), ("S", 2, 1, -N), ("S", 1, 2, -N),
            ("S", 2, 2, 0.0), ("S", 2, 1, 0.0), ("S", 1, 2, 0.0),
            ("L", 1, 1, N), ("L", 2, 1, N), ("L", 1, 2, N),
            ("L", 1, 1, 0.0)]


def known_pair_suite(curve, tol=1e-6):
    out = []
    for kind, i, j, lam in known_pairs(curve.n):
        d = monodromy(HillPotential(curve, kind, i, j), lam).delta
        out.append(_check("known_pairs", f"{kind}{i},{j} at {lam:g}", abs(d - 2), tol))
    return out


def _cyclic_sign_changes(z):
    s = np.sign(z)
    return int(np.sum(s != np.roll(s, -1)))


def weighted_function_zeros(curve, num=4096):
    """Sign changes on [0, T) of W nu_1, W nu_2, W nu_3, W f_12 (W > 0)."""
    ts = (np.arange(num) + 0.5) * (curve.period / num)
    f = frame_from_state(curve.n, *curve.evaluate(ts))
    return {name: _cyclic_sign_changes(f.weight * getattr(f, name))
            for name in ("nu1", "nu2", "nu3", "f12")}


def nodal_suite(curve, lambda_max=None, modes=((1, 1), (2, 1), (1, 2), (2, 2))):
    out = []
    if lambda_max is None:
        lambda_max = 4 * (2 * curve.n - 1)
    for kind in ("L", "S"):
        for i, j in modes:
            pot = HillPotential(curve, kind, i, j)
            spec = periodic_eigenvalues(pot, lambda_max, nodal=False)
            for e in spec:
                parities = ("even", "odd") if e.parity == "both" else (e.parity,)
                for m, par in enumerate(parities):
                    k = e.k + m
                    want = 2 * (k // 2)
                    got = eigenfunction_zeros(pot, e, which=par).count
                    out.append(_check("nodal", f"{kind}{i},{j} k={k} ({par})",
                                      abs(got - want), 0.5))
    for name, count in weighted_function_zeros(curve).items():
        out.append(_check("nodal", f"W*{name} zeros", abs(count - 2), 0.5))
    return out


def constant_oracle_suite(period, value=0.0, kmax=10, tol=1e-8):
    pot = ConstantPotential(value, period)
    lam_max = value + (2 * math.pi * kmax / period) ** 2
    spec = periodic_eigenvalues(pot, lam_max * (1 + 1e-6), nodal=False)
    out = [_check("hill_oracle", "count", abs(len(spec) - (kmax + 1)), 0.5)]
    for kk, e in enumerate(spec.eigenvalues[:kmax + 1]):
        exact = value + (2 * math.pi * kk / period) ** 2
        err = abs(e.lambda_k - exact) / max(1.0, abs(exact))
        out.append(_check("hill_oracle", f"lambda k={kk}", err, tol))
        want_mult = 1 if kk == 0 else 2
        out.append(_check("hill_oracle", f"multiplicity k={kk}",
                          abs(e.multiplicity - want_mult), 0.5))
    return out


def identity_suite(curve, lambdas=None, modes=((1, 1), (2, 1), (2, 2)), tol=1e-8):
    """Wronskian and even-potential identities at sampled lambda."""
    if lambdas is None:
        N = 2 * curve.n - 1
        lambdas = np.linspace(-2 * N, 4 * N, 13)
    worst = {}
    for kind in ("L", "S"):
        for i, j in modes:
            pot = HillPotential(curve, kind, i, j)
            for lam in lambdas:
                for key, v in monodromy(pot, lam).residuals().items():
                    worst[key] = max(worst.get(key, 0.0), v)
    return [_check("hill_identities", k, v, tol) for k, v in worst.items()]


def yau_suite(curve, samples=100):
    v = yau_check(curve, with_laplacian=False, strict=False)
    out = [_check("yau", "consistent", 0.0 if v.consistent else 1.0, 0.5)]
    pot = HillPotential(curve, "L", 1, 1)
    lam2 = periodic_eigenvalues(pot, 2 * curve.n, nodal=False).ordinal(2)
    grid = np.linspace(0.0, lam2, samples + 2)[1:-1]
    worst = max(monodromy(pot, x).delta for x in grid)
    out.append(_check("yau", "delta<2 on (0, lambda2)", worst - 2, 0.0))
    first = first_nonzero_eigenvalue(curve)
    N = 2 * curve.n - 1
    if v.holds is not None:
        agree = v.holds == (abs(first - N) < 1e-6)
        out.append(_check("yau", "laplacian agrees", 0.0 if agree else 1.0, 0.5))
    return out


def spectrum_suite(curve):
    n = curve.n
    N = 2 * n - 1
    rep = stability_index(curve)
    first = first_nonzero_eigenvalue(curve)
    return [
        _check("spectrum", "index >= n^2+4n+3", rep.index_lower_bound - rep.index_computed, 0.5),
        _check("spectrum", "first nonzero in [(2n-1)/2, 2n-1]",
               max(N / 2 - first, first - N, 0.0), 1e-6),
    ]


SUITES = {
    "geometry": geometry_suite,
    "symmetry": symmetry_suite,
    "known_pairs": known_pair_suite,
    "nodal": nodal_suite,
    "hill_oracle": lambda c: constant_oracle_suite(c.period),
    "hill_identities": identity_suite,
    "yau": yau_suite,
    "spectrum": spectrum_suite,
}


def run_all(curve, suites=None):
    rows = []
    for name in suites or SUITES:
        rows.extend(SUITES[name](curve))
    return rows
