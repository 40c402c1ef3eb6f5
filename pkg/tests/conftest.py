import numpy as np
import pytest

from csminimal.profile import EmbeddingParams, build_curve

NS = (2, 3, 4, 5)

_curves = {}


def get_curve(n, ode_tol=1e-12):
    key = (n, ode_tol)
    if key not in _curves:
        _curves[key] = build_curve(EmbeddingParams(n, ode_tol=ode_tol))
    return _curves[key]


@pytest.fixture(params=NS, ids=lambda n: f"n{n}")
def curve(request):
    return get_curve(request.param)


@pytest.fixture
def curve2():
    return get_curve(2)


@pytest.fixture
def curve3():
    return get_curve(3)


def fourier_hill_eigenvalues(pot, m=256, count=8):
    """Periodic eigenvalues of -z'' + V z by Fourier collocation (independent oracle)."""
    T = pot.period
    ts = np.arange(m) * (T / m)
    k = np.fft.fftfreq(m, d=T / m) * 2 * np.pi
    F = np.fft.fft(np.eye(m), axis=0)
    D2 = np.real(np.fft.ifft(-(k**2)[:, None] * F, axis=0))
    H = -D2 + np.diag(pot(ts))
    return np.sort(np.linalg.eigvalsh(0.5 * (H + H.T)))[:count]
