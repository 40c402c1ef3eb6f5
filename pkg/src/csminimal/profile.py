"""Profile curve of the SO(n) x SO(n)-invariant minimal hypersurface in S^{2n}.

The curve (r, theta, alpha) is parametrized by arc length and solves

    r' = cos(alpha)
    theta' = sin(alpha) / sin(r)
    alpha' = (2n-2) csc(r) cos(alpha) cot(2 theta) - (2n-1) cot(r) sin(alpha)

Shooting starts at theta = pi/4, alpha = -pi/2 with r = r0 free and stops at
the first alpha = 0 crossing; r0 is tuned so that r = pi/2 there.  The
stored curve is translated so that r(0) = pi/2, alpha(0) = 0 and theta(0)
is the minimum of theta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels, serialize
from .errors import DomainError, IntegrationError, ShootingError, SymmetryError

FORMAT_VERSION = 1
DOMAIN_EPS = 1e-12
SAMPLES_PER_PERIOD = 1024


@dataclass(frozen=True)
class EmbeddingParams:
    n: int
    shoot_tol: float = 1e-10
    ode_tol: float = 1e-12
    max_arclength: float = 20.0
    scan_points: int = 64

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not (self.shoot_tol > 0 and self.ode_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.scan_points < 2:
            raise ValueError("scan_points must be at least 2")


class ProfileState(NamedTuple):
    t: float
    r: float
    theta: float
    alpha: float


class Shot(NamedTuple):
    r0: float
    s_star: float
    theta0: float
    residual: float
    alpha_star: float
    monotone: bool


def _check_domain(r, theta):
    if math.sin(r) <= DOMAIN_EPS or theta <= DOMAIN_EPS or theta >= math.pi / 2 - DOMAIN_EPS:
        raise DomainError(f"profile state outside the domain (r={r!r}, theta={theta!r})")


def ode_rhs(state, n):
    """Right-hand side (dr, dtheta, dalpha) of the profile system."""
    _, r, theta, alpha = state
    _check_domain(r, theta)
    s = math.sin(r)
    cot2 = math.cos(2 * theta) / math.sin(2 * theta)
    dr = math.cos(alpha)
    dtheta = math.sin(alpha) / s
    dalpha = ((2 * n - 2) / s * math.cos(alpha) * cot2
              - (2 * n - 1) * math.cos(r) / s * math.sin(alpha))
    return dr, dtheta, dalpha


def _raise_status(status, t, what):
    raise IntegrationError(f"{what}: {kernels.STATUS_NAMES.get(status, status)} at t={t:.6g}",
                           status=status, t=t)


def integrate_profile(init, n, t_end, ode_tol=1e-12, t_eval=None):
    """Integrate from ``init`` to ``t_end``; returns ProfileStates at ``t_eval``.

    With no ``t_eval`` the trajectory is reported on 257 equispaced points
    covering [init.t, t_end].
    """
    t0, r, theta, alpha = init
    _check_domain(r, theta)
    if t_eval is None:
        t_eval = np.linspace(t0, t_end, 257) if t_end != t0 else np.array([t0])
    t_eval = np.asarray(t_eval, dtype=float)
    status, t, y, ye, _, _ = kernels.integrate(
        kernels.PROFILE, [r, theta, alpha], t0, t_end, n,
        rtol=ode_tol, atol=ode_tol, t_eval=t_eval)
    if status < 0:
        _raise_status(status, t, "profile integration failed")
    return [ProfileState(float(tt), *map(float, row)) for tt, row in zip(t_eval, ye)]


def _shot_from(r0, params):
    status, t, y, _, _, _ = kernels.integrate(
        kernels.PROFILE, [r0, math.pi / 4, -math.pi / 2], 0.0, params.max_arclength,
        params.n, rtol=params.ode_tol, atol=params.ode_tol, event=True)
    if status != kernels.EVENT:
        return None
    return t, y


def mismatch(r0, params):
    """r - pi/2 at the first alpha = 0 event, or NaN if there is no event."""
    hit = _shot_from(r0, params)
    if hit is None:
        return math.nan
    return float(hit[1][0] - math.pi / 2)


def _scan(params, lo, hi):
    grid = np.linspace(lo, hi, params.scan_points)
    return [(float(r0), mismatch(float(r0), params)) for r0 in grid]


def _brackets(scan):
    out = []
    for (a, ga), (b, gb) in zip(scan, scan[1:]):
        if math.isfinite(ga) and math.isfinite(gb) and (ga == 0 or ga * gb < 0):
            out.append((a, ga, b, gb))
    return out


def shoot(params):
    """Find r0 and the event time s* = T/4 by scan-seeded bisection."""
    scan = _scan(params, 0.05, math.pi / 2 - 0.05)
    brackets = _brackets(scan)
    if not brackets:
        scan = _scan(params, 0.05, math.pi - 0.05)
        brackets = _brackets(scan)
    if not brackets:
        if not any(math.isfinite(g) for _, g in scan):
            raise ShootingError("alpha never reached 0 before the arclength cap", scan)
        raise ShootingError("mismatch does not change sign over the scanned r0 grid", scan)
    a, ga, b, gb = brackets[0]
    if ga == 0:
        b = a
    while b - a > 2 * np.spacing(b):
        m = 0.5 * (a + b)
        gm = mismatch(m, params)
        if not math.isfinite(gm):
            raise ShootingError(f"event lost inside the bracket at r0={m!r}", scan)
        if gm == 0:
            a = b = m
            break
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b, gb = m, gm
    r0 = a if abs(ga) <= abs(gb) else b
    s_star, y = _shot_from(r0, params)
    residual = float(y[0] - math.pi / 2)
    if abs(residual) >= params.shoot_tol or y[1] <= 0:
        raise ShootingError(f"shooting residual {residual:.3e} above tolerance", scan)
    ts = np.linspace(0.0, s_star, 201)
    traj = integrate_profile(ProfileState(0.0, r0, math.pi / 4, -math.pi / 2),
                             params.n, s_star, params.ode_tol, ts)
    arr = np.array([(p.r, p.theta, p.alpha) for p in traj])
    monotone = bool(np.all(np.diff(arr[:, 0]) > 0) and np.all(np.diff(arr[:, 1]) < 0)
                    and np.all(np.diff(arr[:, 2]) > 0))
    return Shot(float(r0), float(s_star), float(y[1]), residual, float(y[2]), monotone)


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """One period of the translated profile, sampled on an equispaced grid.

    Values between samples come from re-integrating out of the nearest
    sample, so they carry the integrator's accuracy rather than an
    interpolant's.
    """

    params: EmbeddingParams
    r0: float
    theta0: float
    period: float
    t: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("t", "r", "theta", "alpha"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return self.params.n

    @property
    def ode_tol(self):
        return self.params.ode_tol

    @property
    def samples(self):
        return [ProfileState(*row) for row in zip(self.t.tolist(), self.r.tolist(),
                                                  self.theta.tolist(), self.alpha.tolist())]

    @property
    def initial_state(self):
        return (math.pi / 2, self.theta0, 0.0)

    def __call__(self, t):
        return eval_profile(self, t)

    def evaluate(self, ts):
        """Vectorized evaluation; returns arrays (r, theta, alpha)."""
        ts = np.asarray(ts, dtype=float)
        flat = ts.reshape(-1)
        wraps = np.floor(flat / self.period)
        tau = flat - wraps * self.period
        tau = np.clip(tau, 0.0, self.period)
        order = np.argsort(tau, kind="stable")
        status, t, _, ye, _, _ = kernels.integrate(
            kernels.PROFILE, list(self.initial_state), 0.0, self.period, self.n,
            rtol=self.ode_tol, atol=self.ode_tol, t_eval=tau[order])
        if status < 0:
            _raise_status(status, t, "profile evaluation failed")
        out = np.empty_like(ye)
        out[order] = ye
        r = out[:, 0].reshape(ts.shape)
        theta = out[:, 1].reshape(ts.shape)
        alpha = (out[:, 2] + 2 * math.pi * wraps).reshape(ts.shape)
        return r, theta, alpha

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "n": self.n,
            "r0": self.r0,
            "theta0": self.theta0,
            "period": self.period,
            "ode_tol": self.ode_tol,
            "shoot_tol": self.params.shoot_tol,
            "samples": [{"t": p.t, "r": p.r, "theta": p.theta, "alpha": p.alpha}
                        for p in self.samples],
        }

    def to_json(self):
        return serialize.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc):
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported profile document version {doc.get('version')!r}")
        params = EmbeddingParams(n=int(doc["n"]), ode_tol=float(doc["ode_tol"]),
                                 shoot_tol=float(doc.get("shoot_tol", 1e-10)))
        s = doc["samples"]
        return cls(params, float(doc["r0"]), float(doc["theta0"]), float(doc["period"]),
                   np.array([p["t"] for p in s]), np.array([p["r"] for p in s]),
                   np.array([p["theta"] for p in s]), np.array([p["alpha"] for p in s]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _symmetry_defects(curve):
    # sample index j <-> t_j; N even so T - t_j and t_j + T/2 are grid points
    N = len(curve.t) - 1
    j = np.arange(N + 1)
    r, th, al = curve.r, curve.theta, curve.alpha
    half = N // 2
    k = np.arange(half + 1)
    return {
        "theta_even": float(np.max(np.abs(th[N - j] - th))),
        "r_reflection": float(np.max(np.abs(r[N - j] + r - math.pi))),
        "alpha_odd": float(np.max(np.abs(al[N - j] + al - 2 * math.pi))),
        "theta_half_shift": float(np.max(np.abs(th[k + half] - (math.pi / 2 - th[k])))),
        "r_half_shift": float(np.max(np.abs(r[k + half] - (math.pi - r[k])))),
        "alpha_winding": float(abs(al[N] - al[0] - 2 * math.pi)),
    }


def build_curve(params, shot=None, samples=SAMPLES_PER_PERIOD):
    """Shoot (unless ``shot`` is given) and integrate one full translated period."""
    if samples % 2:
        raise ValueError("samples per period must be even")
    if shot is None:
        shot = shoot(params)
    period = 4.0 * shot.s_star
    ts = np.linspace(0.0, period, samples + 1)
    status, t, _, ye, _, _ = kernels.integrate(
        kernels.PROFILE, [math.pi / 2, shot.theta0, 0.0], 0.0, period, params.n,
        rtol=params.ode_tol, atol=params.ode_tol, t_eval=ts)
    if status < 0:
        _raise_status(status, t, "full-period integration failed")
    curve = ProfileCurve(params, shot.r0, shot.theta0, period, ts, ye[:, 0], ye[:, 1], ye[:, 2])
    defects = _symmetry_defects(curve)
    bad = {k: v for k, v in defects.items() if v > 100 * params.shoot_tol}
    if bad:
        raise SymmetryError(f"symmetry identities violated: {bad}")
    return curve


def eval_profile(curve, t):
    """ProfileState at arbitrary real ``t`` (periodic in r, theta; alpha winds by 2 pi)."""
    t = float(t)
    T = curve.period
    wraps = math.floor(t / T)
    tau = min(max(t - wraps * T, 0.0), T)
    N = len(curve.t) - 1
    j = int(round(tau / T * N))
    start = (curve.r[j], curve.theta[j], curve.alpha[j])
    tj = float(curve.t[j])
    if tau == tj:
        r, th, al = start
    else:
        status, tt, y, _, _, _ = kernels.integrate(
            kernels.PROFILE, list(start), tj, tau, curve.n,
            rtol=curve.ode_tol, atol=curve.ode_tol)
        if status < 0:
            _raise_status(status, tt, "profile evaluation failed")
        r, th, al = y
    return ProfileState(t, float(r), float(th), float(al) + 2 * math.pi * wraps)
