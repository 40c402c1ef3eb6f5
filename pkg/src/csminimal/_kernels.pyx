# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled DOP853 integrator for the profile, Hill and Yau systems.

Mirrors ``_kernels_py`` operation for operation; the integration loop runs
without the GIL so independent integrations can proceed on threads.
"""

import numpy as np

from libc.math cimport sin, cos, sqrt, fabs, pow, nextafter, INFINITY, NAN

from . import _tableau

DEF NS = 12
DEF MAXDIM = 12

cdef enum:
    S_PROFILE = 0
    S_HILL_L = 1
    S_HILL_S = 2
    S_HILL_CONST = 3
    S_YAU = 4

PROFILE = S_PROFILE
HILL_L = S_HILL_L
HILL_S = S_HILL_S
HILL_CONST = S_HILL_CONST
YAU = S_YAU

DIMS = {PROFILE: 3, HILL_L: 12, HILL_S: 12, HILL_CONST: 12, YAU: 5}

cdef enum:
    C_OK = 0
    C_EVENT = 1
    C_DOMAIN_ERROR = -1
    C_STEP_UNDERFLOW = -2
    C_MAX_STEPS = -3

OK = C_OK
EVENT = C_EVENT
DOMAIN_ERROR = C_DOMAIN_ERROR
STEP_UNDERFLOW = C_STEP_UNDERFLOW
MAX_STEPS = C_MAX_STEPS

cdef double DOMAIN_EPS = 1e-12
cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ERR_EXPONENT = -1.0 / 8.0
cdef double HALF_PI = 1.5707963267948966

cdef double TA[NS][NS]
cdef double TB[NS]
cdef double TE3[NS + 1]
cdef double TE5[NS + 1]

cdef int _i, _j
for _i in range(NS):
    TB[_i] = _tableau.B[_i]
    for _j in range(NS):
        TA[_i][_j] = _tableau.A[_i][_j]
for _i in range(NS + 1):
    TE3[_i] = _tableau.E3[_i]
    TE5[_i] = _tableau.E5[_i]


cdef struct Sys:
    int system
    int n
    double lam
    double ai
    double aj
    int dim
    long nfev


cdef int point_values(int n, double r, double th, double al, double* o) noexcept nogil:
    cdef double s = sin(r)
    if s <= DOMAIN_EPS or th <= DOMAIN_EPS or th >= HALF_PI - DOMAIN_EPS:
        return -1
    cdef double c = cos(r)
    cdef double sa = sin(al)
    cdef double ca = cos(al)
    cdef double s2 = sin(2.0 * th)
    cdef double cot2 = cos(2.0 * th) / s2
    cdef double cotr = c / s
    cdef double dr = ca
    cdef double dth = sa / s
    cdef double dal = (2 * n - 2) / s * ca * cot2 - (2 * n - 1) * cotr * sa
    cdef double u1 = 4.0 * cotr * dr + 4.0 * cot2 * dth
    cdef double r2 = -sa * dal
    cdef double th2 = (ca * dal * s - sa * c * dr) / (s * s)
    cdef double u2 = (4.0 * (-dr * dr / (s * s) + cotr * r2)
                      + 4.0 * (-2.0 * dth * dth / (s2 * s2) + cot2 * th2))
    cdef double ct = cos(th)
    cdef double st = sin(th)
    cdef double ku = ca / s * (st / ct) + cotr * sa
    cdef double kv = cotr * sa - ca / s * (ct / st)
    cdef double kt = (2 * n - 2) * (ca / s * cot2 - cotr * sa)
    o[0] = dr
    o[1] = dth
    o[2] = dal
    o[3] = u1
    o[4] = u2
    o[5] = s * s * ct * ct
    o[6] = s * s * st * st
    o[7] = (n - 1) * (ku * ku + kv * kv) + kt * kt
    return 0


cdef int rhs(Sys* S, double* y, double* dy) noexcept nogil:
    cdef double pv[8]
    cdef double v, q, a, c1, s1, c2, s2
    cdef int n = S.n
    S.nfev += 1
    if S.system == S_HILL_CONST:
        v = S.ai
        dy[0] = 0.0
        dy[1] = 0.0
        dy[2] = 0.0
    else:
        if point_values(n, y[0], y[1], y[2], pv) != 0:
            return -1
        dy[0] = pv[0]
        dy[1] = pv[1]
        dy[2] = pv[2]
        if S.system == S_PROFILE:
            return 0
        if S.system == S_YAU:
            a = 0.5 * (n - 1) * pv[3]
            dy[3] = y[4]
            dy[4] = -a * y[4] - (2 * n - 1) * y[3]
            return 0
        v = (0.25 * (n - 1) * pv[4] + (n - 1) * (n - 1) / 16.0 * pv[3] * pv[3]
             + S.ai / pv[5] + S.aj / pv[6])
        if S.system == S_HILL_S:
            v -= pv[7] + (2 * n - 1)
    q = S.lam - v
    c1 = cos(y[7])
    s1 = sin(y[7])
    c2 = cos(y[8])
    s2 = sin(y[8])
    dy[3] = y[4]
    dy[4] = -q * y[3]
    dy[5] = y[6]
    dy[6] = -q * y[5]
    dy[7] = c1 * c1 + q * s1 * s1
    dy[8] = c2 * c2 + q * s2 * s2
    dy[9] = y[3] * y[3]
    dy[10] = y[3] * y[5]
    dy[11] = y[5] * y[5]
    return 0


cdef int stages(Sys* S, double* y, double* K, double h, double* y_new) noexcept nogil:
    # K rows are stage derivatives; K[0] must hold f(t, y) on entry
    cdef double yi[MAXDIM]
    cdef double acc
    cdef int s, j, k
    cdef int dim = S.dim
    for s in range(1, NS):
        for k in range(dim):
            acc = 0.0
            for j in range(s):
                acc = acc + TA[s][j] * K[j * MAXDIM + k]
            yi[k] = y[k] + h * acc
        if rhs(S, yi, &K[s * MAXDIM]) != 0:
            return -1
    for k in range(dim):
        acc = 0.0
        for j in range(NS):
            acc = acc + TB[j] * K[j * MAXDIM + k]
        y_new[k] = y[k] + h * acc
    return 0


cdef int single_step(Sys* S, double* y, double* f0, double h, double* out) noexcept nogil:
    cdef double K[(NS + 1) * MAXDIM]
    cdef int k
    for k in range(S.dim):
        K[k] = f0[k]
    return stages(S, y, K, h, out)


cdef double error_norm(double* K, double h, double* scale, int dim) noexcept nogil:
    cdef double en5 = 0.0, en3 = 0.0, e5, e3
    cdef int j, k
    for k in range(dim):
        e5 = 0.0
        e3 = 0.0
        for j in range(NS + 1):
            e5 = e5 + TE5[j] * K[j * MAXDIM + k]
            e3 = e3 + TE3[j] * K[j * MAXDIM + k]
        e5 = e5 / scale[k]
        e3 = e3 / scale[k]
        en5 = en5 + e5 * e5
        en3 = en3 + e3 * e3
    if en5 == 0.0 and en3 == 0.0:
        return 0.0
    return fabs(h) * en5 / sqrt((en5 + 0.01 * en3) * dim)


cdef double rms(double* v, double* scale, int dim) noexcept nogil:
    cdef double acc = 0.0, x
    cdef int k
    for k in range(dim):
        x = v[k] / scale[k]
        acc = acc + x * x
    return sqrt(acc / dim)


cdef int initial_step(Sys* S, double* y0, double* f0, double direction, double span,
                      double rtol, double atol, double* h_out) noexcept nogil:
    cdef double scale[MAXDIM]
    cdef double y1[MAXDIM]
    cdef double f1[MAXDIM]
    cdef double df[MAXDIM]
    cdef int k, dim = S.dim
    cdef double d0, d1, d2, h0, h1
    for k in range(dim):
        scale[k] = atol + fabs(y0[k]) * rtol
    d0 = rms(y0, scale, dim)
    d1 = rms(f0, scale, dim)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if span < h0:
        h0 = span
    for k in range(dim):
        y1[k] = y0[k] + h0 * direction * f0[k]
    if rhs(S, y1, f1) != 0:
        return -1
    for k in range(dim):
        df[k] = f1[k] - f0[k]
    d2 = rms(df, scale, dim) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = 1e-6 if 1e-6 > h0 * 1e-3 else h0 * 1e-3
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), 1.0 / 8.0)
    h_out[0] = 100.0 * h0
    if h1 < h_out[0]:
        h_out[0] = h1
    if span < h_out[0]:
        h_out[0] = span
    return 0


cdef int refine_event(Sys* S, double t, double* y, double* f0, double h,
                      double* t_ev, double* y_ev) noexcept nogil:
    cdef double tmp[MAXDIM]
    cdef double a = 0.0, fa = y[2], b = h, fb, m, fm, s, lo, hi
    cdef int side = 0, it
    if single_step(S, y, f0, b, tmp) != 0:
        return -1
    fb = tmp[2]
    for it in range(200):
        if fabs(b - a) <= 4e-16 * (1.0 if 1.0 > fabs(t) + fabs(b) else fabs(t) + fabs(b)):
            break
        m = (a * fb - b * fa) / (fb - fa)
        lo = a if a < b else b
        hi = b if a < b else a
        if not (lo < m and m < hi):
            m = 0.5 * (a + b)
        if single_step(S, y, f0, m, tmp) != 0:
            return -1
        fm = tmp[2]
        if fm == 0.0:
            a = m
            b = m
            fb = fm
            break
        if (fm > 0) == (fb > 0):
            b = m
            fb = fm
            if side == -1:
                fa *= 0.5
            side = -1
        else:
            a = m
            fa = fm
            if side == 1:
                fb *= 0.5
            side = 1
    s = b if fabs(fb) <= fabs(fa) else a
    t_ev[0] = t + s
    return single_step(S, y, f0, s, y_ev)


cdef int core(Sys* S, double* y, double* t_io, double t1, double rtol, double atol,
              double* t_eval, int neval, double* y_eval, int event, long max_steps,
              long* nsteps_out) noexcept nogil:
    cdef double K[(NS + 1) * MAXDIM]
    cdef double f[MAXDIM]
    cdef double y_new[MAXDIM]
    cdef double scale[MAXDIM]
    cdef double yt[MAXDIM]
    cdef int dim = S.dim
    cdef int idx = 0, k, rejected = 0
    cdef long nsteps = 0
    cdef double t = t_io[0]
    cdef double direction = 1.0 if t1 >= t else -1.0
    cdef double h_abs, h, t_new, min_step, err, factor, a, b, t_ev
    while idx < neval and t_eval[idx] == t:
        for k in range(dim):
            y_eval[idx * dim + k] = y[k]
        idx += 1
    nsteps_out[0] = 0
    if t1 == t:
        return C_OK
    if rhs(S, y, f) != 0:
        return C_DOMAIN_ERROR
    if initial_step(S, y, f, direction, fabs(t1 - t), rtol, atol, &h_abs) != 0:
        return C_DOMAIN_ERROR
    while direction * (t1 - t) > 0:
        if nsteps >= max_steps:
            t_io[0] = t
            nsteps_out[0] = nsteps
            return C_MAX_STEPS
        min_step = 10.0 * fabs(nextafter(t, direction * INFINITY) - t)
        if h_abs < min_step:
            # a span shorter than min_step is covered by one step
            if fabs(t1 - t) > min_step or rejected:
                t_io[0] = t
                nsteps_out[0] = nsteps
                return C_STEP_UNDERFLOW
            h_abs = fabs(t1 - t)
        t_new = t + direction * h_abs
        if direction * (t_new - t1) > 0:
            t_new = t1
        h = t_new - t
        h_abs = fabs(h)
        for k in range(dim):
            K[k] = f[k]
        if stages(S, y, K, h, y_new) != 0 or rhs(S, y_new, &K[NS * MAXDIM]) != 0:
            h_abs *= MIN_FACTOR
            rejected = 1
            continue
        for k in range(dim):
            a = fabs(y[k])
            b = fabs(y_new[k])
            scale[k] = atol + (a if a > b else b) * rtol
        err = error_norm(K, h, scale, dim)
        if err < 1.0:
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * pow(err, ERR_EXPONENT)
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
            if rejected and factor > 1.0:
                factor = 1.0
            nsteps += 1
            if event and S.system == S_PROFILE and y[2] < 0.0 and y_new[2] >= 0.0:
                if refine_event(S, t, y, f, h, &t_ev, yt) != 0:
                    t_io[0] = t
                    nsteps_out[0] = nsteps
                    return C_DOMAIN_ERROR
                while idx < neval and direction * (t_eval[idx] - t_ev) <= 0:
                    if single_step(S, y, f, t_eval[idx] - t, &y_eval[idx * dim]) != 0:
                        return C_DOMAIN_ERROR
                    idx += 1
                for k in range(dim):
                    y[k] = yt[k]
                t_io[0] = t_ev
                nsteps_out[0] = nsteps
                return C_EVENT
            while idx < neval and direction * (t_eval[idx] - t_new) <= 0:
                if t_eval[idx] == t_new:
                    for k in range(dim):
                        y_eval[idx * dim + k] = y_new[k]
                elif single_step(S, y, f, t_eval[idx] - t, &y_eval[idx * dim]) != 0:
                    return C_DOMAIN_ERROR
                idx += 1
            t = t_new
            for k in range(dim):
                y[k] = y_new[k]
                f[k] = K[NS * MAXDIM + k]
            h_abs *= factor
            rejected = 0
        else:
            factor = SAFETY * pow(err, ERR_EXPONENT)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h_abs *= factor
            rejected = 1
    t_io[0] = t
    nsteps_out[0] = nsteps
    return C_OK


def integrate(int system, y0, double t0, double t1, int n, double lam=0.0,
              double ai=0.0, double aj=0.0, double rtol=1e-12, double atol=1e-12,
              t_eval=(), bint event=False, long max_steps=200000):
    """Integrate one of the augmented systems from ``t0`` to ``t1``.

    Same contract as ``_kernels_py.integrate``.
    """
    cdef Sys S
    cdef int dim = DIMS[system]
    S.system = system
    S.n = n
    S.lam = lam
    S.ai = ai
    S.aj = aj
    S.dim = dim
    S.nfev = 0
    cdef double[::1] y = np.array(y0, dtype=np.float64)
    if y.shape[0] != dim:
        raise ValueError(f"system {system} expects {dim} components")
    cdef double[::1] te = np.ascontiguousarray(t_eval, dtype=np.float64).reshape(-1)
    cdef int neval = te.shape[0]
    out = np.full((neval, dim), NAN)
    cdef double[:, ::1] yo = out
    cdef double t = t0
    cdef long nsteps = 0
    cdef int status
    cdef double* tep = &te[0] if neval > 0 else NULL
    cdef double* yop = &yo[0, 0] if neval > 0 else NULL
    with nogil:
        status = core(&S, &y[0], &t, t1, rtol, atol, tep, neval, yop, event,
                      max_steps, &nsteps)
    return status, t, np.asarray(y), out, nsteps, S.nfev


def point_values_c(int n, double r, double th, double al):
    """Compiled twin of ``_kernels_py.point_values``; raises ArithmeticError off-domain."""
    cdef double o[8]
    if point_values(n, r, th, al, o) != 0:
        raise ArithmeticError("profile state outside the valid domain")
    return tuple(o[k] for k in range(8))
