"""Pure-Python twin of the compiled ``_kernels`` extension.

Both modules implement the same adaptive DOP853 integrator over the same
augmented right-hand sides, step for step, so results agree to rounding.
This one is used when the extension is not built or when
``CSMINIMAL_PURE_PYTHON=1`` is set.
"""

import math

from ._tableau import A, B, C, E3, E5, N_STAGES

PROFILE = 0
HILL_L = 1
HILL_S = 2
HILL_CONST = 3
YAU = 4

DIMS = {PROFILE: 3, HILL_L: 12, HILL_S: 12, HILL_CONST: 12, YAU: 5}

OK = 0
EVENT = 1
DOMAIN_ERROR = -1
STEP_UNDERFLOW = -2
MAX_STEPS = -3

DOMAIN_EPS = 1e-12

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERR_EXPONENT = -1.0 / 8.0

_HALF_PI = 0.5 * math.pi


class DomainError(ArithmeticError):
    pass


def point_values(n, r, th, al):
    """Return (dr, dth, dal, u1, u2, E, G, normA2) at one profile state.

    ``u1``/``u2`` are the first two t-derivatives of ln(EG), obtained by the
    chain rule through the profile equations.
    """
    s = math.sin(r)
    if s <= DOMAIN_EPS or th <= DOMAIN_EPS or th >= _HALF_PI - DOMAIN_EPS:
        raise DomainError
    c = math.cos(r)
    sa = math.sin(al)
    ca = math.cos(al)
    s2 = math.sin(2.0 * th)
    cot2 = math.cos(2.0 * th) / s2
    cotr = c / s
    dr = ca
    dth = sa / s
    dal = (2 * n - 2) / s * ca * cot2 - (2 * n - 1) * cotr * sa
    u1 = 4.0 * cotr * dr + 4.0 * cot2 * dth
    r2 = -sa * dal
    th2 = (ca * dal * s - sa * c * dr) / (s * s)
    u2 = (4.0 * (-dr * dr / (s * s) + cotr * r2)
          + 4.0 * (-2.0 * dth * dth / (s2 * s2) + cot2 * th2))
    ct = math.cos(th)
    st = math.sin(th)
    E = s * s * ct * ct
    G = s * s * st * st
    ku = ca / s * (st / ct) + cotr * sa
    kv = cotr * sa - ca / s * (ct / st)
    kt = (2 * n - 2) * (ca / s * cot2 - cotr * sa)
    normA2 = (n - 1) * (ku * ku + kv * kv) + kt * kt
    return dr, dth, dal, u1, u2, E, G, normA2


def potential(kind, n, ai, aj, r, th, al):
    """Hill potential at one profile state; ``kind`` is HILL_L or HILL_S."""
    _, _, _, u1, u2, E, G, normA2 = point_values(n, r, th, al)
    v = (0.25 * (n - 1) * u2 + (n - 1) * (n - 1) / 16.0 * u1 * u1
         + ai / E + aj / G)
    if kind == HILL_S:
        v -= normA2 + (2 * n - 1)
    return v


def rhs(system, n, lam, ai, aj, y):
    if system == HILL_CONST:
        v = ai
        out = [0.0, 0.0, 0.0]
    else:
        dr, dth, dal, u1, u2, E, G, normA2 = point_values(n, y[0], y[1], y[2])
        out = [dr, dth, dal]
        if system == PROFILE:
            return out
        if system == YAU:
            a = 0.5 * (n - 1) * u1
            out.append(y[4])
            out.append(-a * y[4] - (2 * n - 1) * y[3])
            return out
        v = (0.25 * (n - 1) * u2 + (n - 1) * (n - 1) / 16.0 * u1 * u1
             + ai / E + aj / G)
        if system == HILL_S:
            v -= normA2 + (2 * n - 1)
    q = lam - v
    z1, w1, z2, w2, p1, p2 = y[3], y[4], y[5], y[6], y[7], y[8]
    c1 = math.cos(p1)
    s1 = math.sin(p1)
    c2 = math.cos(p2)
    s2 = math.sin(p2)
    out.extend((w1, -q * z1, w2, -q * z2,
                c1 * c1 + q * s1 * s1, c2 * c2 + q * s2 * s2,
                z1 * z1, z1 * z2, z2 * z2))
    return out


class _System:
    __slots__ = ("system", "n", "lam", "ai", "aj", "dim", "nfev")

    def __init__(self, system, n, lam, ai, aj):
        self.system = system
        self.n = n
        self.lam = lam
        self.ai = ai
        self.aj = aj
        self.dim = DIMS[system]
        self.nfev = 0

    def f(self, y):
        self.nfev += 1
        return rhs(self.system, self.n, self.lam, self.ai, self.aj, y)


def _stages(sys, y, f0, h):
    dim = sys.dim
    K = [f0]
    for s in range(1, N_STAGES):
        a = A[s]
        yi = [y[k] + h * sum(a[j] * K[j][k] for j in range(s)) for k in range(dim)]
        K.append(sys.f(yi))
    y_new = [y[k] + h * sum(B[j] * K[j][k] for j in range(N_STAGES)) for k in range(dim)]
    return K, y_new


def _single_step(sys, y, f0, h):
    return _stages(sys, y, f0, h)[1]


def _error_norm(K, h, scale, dim):
    en5 = 0.0
    en3 = 0.0
    for k in range(dim):
        e5 = 0.0
        e3 = 0.0
        for j in range(N_STAGES + 1):
            e5 += E5[j] * K[j][k]
            e3 += E3[j] * K[j][k]
        e5 /= scale[k]
        e3 /= scale[k]
        en5 += e5 * e5
        en3 += e3 * e3
    if en5 == 0.0 and en3 == 0.0:
        return 0.0
    return abs(h) * en5 / math.sqrt((en5 + 0.01 * en3) * dim)


def _rms(v, scale):
    return math.sqrt(sum((a / b) ** 2 for a, b in zip(v, scale)) / len(v))


def _initial_step(sys, y0, f0, direction, span, rtol, atol):
    scale = [atol + abs(v) * rtol for v in y0]
    d0 = _rms(y0, scale)
    d1 = _rms(f0, scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = [a + h0 * direction * b for a, b in zip(y0, f0)]
    f1 = sys.f(y1)
    d2 = _rms([a - b for a, b in zip(f1, f0)], scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8.0)
    return min(100.0 * h0, h1, span)


def _refine_event(sys, t, y, f0, h):
    # Illinois iteration on s -> alpha(step(s)) over [0, h]
    a, fa = 0.0, y[2]
    b = h
    fb = _single_step(sys, y, f0, b)[2]
    side = 0
    for _ in range(200):
        if abs(b - a) <= 4e-16 * max(1.0, abs(t) + abs(b)):
            break
        m = (a * fb - b * fa) / (fb - fa)
        if not (min(a, b) < m < max(a, b)):
            m = 0.5 * (a + b)
        fm = _single_step(sys, y, f0, m)[2]
        if fm == 0.0:
            a = b = m
            fb = fm
            break
        if (fm > 0) == (fb > 0):
            b, fb = m, fm
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a, fa = m, fm
            if side == 1:
                fb *= 0.5
            side = 1
    s = b if abs(fb) <= abs(fa) else a
    return t + s, _single_step(sys, y, f0, s)


def integrate(system, y0, t0, t1, n, lam=0.0, ai=0.0, aj=0.0, rtol=1e-12,
              atol=1e-12, t_eval=(), event=False, max_steps=200000):
    """Integrate one of the augmented systems from ``t0`` to ``t1``.

    Returns ``(status, t_end, y_end, y_eval, nsteps, nfev)`` where ``y_eval``
    holds one row per ``t_eval`` point (NaN rows for points never reached).
    ``t_eval`` must be monotone in the direction of integration.
    """
    sys = _System(system, n, float(lam), float(ai), float(aj))
    dim = sys.dim
    y = [float(v) for v in y0]
    if len(y) != dim:
        raise ValueError(f"system {system} expects {dim} components")
    t_eval = [float(v) for v in t_eval]
    y_eval = [[math.nan] * dim for _ in t_eval]
    t = float(t0)
    t1 = float(t1)
    direction = 1.0 if t1 >= t else -1.0
    idx = 0
    while idx < len(t_eval) and t_eval[idx] == t:
        y_eval[idx] = list(y)
        idx += 1
    if t1 == t:
        return OK, t, y, y_eval, 0, 0
    nsteps = 0
    try:
        f = sys.f(y)
        h_abs = _initial_step(sys, y, f, direction, abs(t1 - t), rtol, atol)
        rejected = False
        while direction * (t1 - t) > 0:
            if nsteps >= max_steps:
                return MAX_STEPS, t, y, y_eval, nsteps, sys.nfev
            min_step = 10.0 * abs(math.nextafter(t, direction * math.inf) - t)
            if h_abs < min_step:
                # a span shorter than min_step is covered by one step
                if abs(t1 - t) > min_step or rejected:
                    return STEP_UNDERFLOW, t, y, y_eval, nsteps, sys.nfev
                h_abs = abs(t1 - t)
            t_new = t + direction * h_abs
            if direction * (t_new - t1) > 0:
                t_new = t1
            h = t_new - t
            h_abs = abs(h)
            try:
                K, y_new = _stages(sys, y, f, h)
                f_new = sys.f(y_new)
            except DomainError:
                # trial point left the domain: shrink and retry
                h_abs *= MIN_FACTOR
                rejected = True
                continue
            K.append(f_new)
            scale = [atol + max(abs(a), abs(b)) * rtol for a, b in zip(y, y_new)]
            err = _error_norm(K, h, scale, dim)
            if err < 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * err ** ERR_EXPONENT)
                if rejected:
                    factor = min(1.0, factor)
                nsteps += 1
                if event and system == PROFILE and y[2] < 0.0 <= y_new[2]:
                    t_ev, y_ev = _refine_event(sys, t, y, f, h)
                    while idx < len(t_eval) and direction * (t_eval[idx] - t_ev) <= 0:
                        y_eval[idx] = _single_step(sys, y, f, t_eval[idx] - t)
                        idx += 1
                    return EVENT, t_ev, y_ev, y_eval, nsteps, sys.nfev
                while idx < len(t_eval) and direction * (t_eval[idx] - t_new) <= 0:
                    if t_eval[idx] == t_new:
                        y_eval[idx] = list(y_new)
                    else:
                        y_eval[idx] = _single_step(sys, y, f, t_eval[idx] - t)
                    idx += 1
                t, y, f = t_new, y_new, f_new
                h_abs *= factor
                rejected = False
            else:
                h_abs *= max(MIN_FACTOR, SAFETY * err ** ERR_EXPONENT)
                rejected = True
    except DomainError:
        return DOMAIN_ERROR, t, y, y_eval, nsteps, sys.nfev
    return OK, t, y, y_eval, nsteps, sys.nfev
