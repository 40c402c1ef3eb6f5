"""Backend selection for the integration kernel.

The compiled extension is preferred; setting ``CSMINIMAL_PURE_PYTHON=1``
forces the pure-Python twin (also used when the extension is missing).
"""

import os

import numpy as np

from . import _kernels_py

PROFILE = _kernels_py.PROFILE
HILL_L = _kernels_py.HILL_L
HILL_S = _kernels_py.HILL_S
HILL_CONST = _kernels_py.HILL_CONST
YAU = _kernels_py.YAU

OK = _kernels_py.OK
EVENT = _kernels_py.EVENT
DOMAIN_ERROR = _kernels_py.DOMAIN_ERROR
STEP_UNDERFLOW = _kernels_py.STEP_UNDERFLOW
MAX_STEPS = _kernels_py.MAX_STEPS

STATUS_NAMES = {
    OK: "ok",
    EVENT: "event",
    DOMAIN_ERROR: "domain error",
    STEP_UNDERFLOW: "step-size underflow",
    MAX_STEPS: "step limit reached",
}

_compiled = None
if os.environ.get("CSMINIMAL_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


def get_integrator(backend=None):
    if backend is None:
        backend = BACKEND
    if backend == "python":
        return _kernels_py.integrate
    if backend == "cython":
        from . import _kernels
        return _kernels.integrate
    raise ValueError(f"unknown backend {backend!r}")


def integrate(system, y0, t0, t1, n, lam=0.0, ai=0.0, aj=0.0, rtol=1e-12,
              atol=1e-12, t_eval=(), event=False, max_steps=200000, backend=None):
    """Run the selected kernel; returns (status, t_end, y_end, y_eval, nsteps, nfev)."""
    fn = get_integrator(backend)
    status, t, y, ye, nsteps, nfev = fn(
        system, y0, float(t0), float(t1), int(n), float(lam), float(ai), float(aj),
        float(rtol), float(atol), np.asarray(t_eval, dtype=float).reshape(-1),
        bool(event), int(max_steps))
    return (status, float(t), np.asarray(y, dtype=float),
            np.asarray(ye, dtype=float).reshape(-1, len(y0)), int(nsteps), int(nfev))
