"""Hill equations z'' + (lambda - V(t)) z = 0 for the separated operators.

Sign convention: an eigenvalue lambda of the operator -z'' + V z is a value
for which z'' + (lambda - V) z = 0 has a nonzero T-periodic solution, i.e.
Q = lambda - V in the usual Hill notation.

For an even potential the discriminant factors through the half period,

    delta(lambda) - 2 = 4 z1'(T/2) z2(T/2),

so periodic eigenvalues are the Neumann eigenvalues (even eigenfunctions,
multiples of z1) and Dirichlet eigenvalues (odd, multiples of z2) of
[0, T/2].  Each family is located with the Pruefer angle of its normalized
solution, which is strictly increasing in lambda; a Neumann/Dirichlet
coincidence is a double eigenvalue (coexistence).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import IntegrationError
from .geometry import curvatures_from_state, metric_from_state
from .harmonics import sphere_spectrum

COEXISTENCE_TOL = 1e-7
ROOT_XTOL = 1e-12
NODAL_GRID = 2048


class HillPotential:
    """Potential of the transformed operator L~_{ij} (kind "L") or S~_{ij} (kind "S")."""

    def __init__(self, curve, kind, i, j):
        if kind not in ("L", "S"):
            raise ValueError("kind must be 'L' or 'S'")
        if i < 1 or j < 1:
            raise ValueError("mode indices start at 1")
        self.curve = curve
        self.kind = kind
        self.i = int(i)
        self.j = int(j)
        k = curve.n - 1
        self.alpha_i = sphere_spectrum(k, self.i).alpha_i
        self.alpha_j = sphere_spectrum(k, self.j).alpha_i

    def __repr__(self):
        return f"HillPotential({self.kind}{self.i}{self.j}, n={self.n})"

    @property
    def n(self):
        return self.curve.n

    @property
    def period(self):
        return self.curve.period

    @property
    def ode_tol(self):
        return self.curve.ode_tol

    @property
    def label(self):
        return f"{self.kind}{self.i},{self.j}"

    def kernel_args(self):
        system = kernels.HILL_L if self.kind == "L" else kernels.HILL_S
        return system, list(self.curve.initial_state), self.n, self.alpha_i, self.alpha_j

    def from_state(self, r, theta, alpha):
        n = self.n
        m = metric_from_state(n, r, theta, alpha)
        v = ((n - 1) / 4 * m.d2logEG + (n - 1) ** 2 / 16 * m.dlogEG**2
             + self.alpha_i / m.E + self.alpha_j / m.G)
        if self.kind == "S":
            v = v - (curvatures_from_state(n, r, theta, alpha).normA2 + (2 * n - 1))
        return v

    def __call__(self, t):
        return self.from_state(*self.curve.evaluate(t))

    def min_value(self, num=2048):
        t = np.arange(num) * (self.period / num)
        return float(np.min(self(t)))


class ConstantPotential:
    """V(t) = value on a circle of length ``period``; closed-form test oracle."""

    kind = "const"
    i = j = 0

    def __init__(self, value, period, ode_tol=1e-12):
        self.value = float(value)
        self.period = float(period)
        self.ode_tol = float(ode_tol)

    @property
    def label(self):
        return f"const({self.value:g})"

    def kernel_args(self):
        return kernels.HILL_CONST, [math.pi / 2, math.pi / 4, 0.0], 2, self.value, 0.0

    def __call__(self, t):
        return np.full(np.shape(t), self.value)

    def min_value(self, num=0):
        return self.value


def potential_value(pot, t):
    return pot(t)


def _run(pot, lam, t_end, t_eval=()):
    system, prof, n, ai, aj = pot.kernel_args()
    y0 = prof + [1.0, 0.0, 0.0, 1.0, math.pi / 2, 0.0, 0.0, 0.0, 0.0]
    status, t, y, ye, _, _ = kernels.integrate(
        system, y0, 0.0, t_end, n, lam=lam, ai=ai, aj=aj,
        rtol=pot.ode_tol, atol=pot.ode_tol, t_eval=t_eval)
    if status < 0:
        raise IntegrationError(f"Hill integration failed ({kernels.STATUS_NAMES[status]}) "
                               f"for {pot.label} at lambda={lam!r}", status=status, t=t)
    return y, ye


@dataclass(frozen=True)
class MonodromyData:
    lam: float
    z1T: float
    dz1T: float
    z2T: float
    dz2T: float
    half: tuple
    I11: float
    I12: float
    I22: float
    phase1: float
    phase2: float

    @property
    def delta(self):
        return self.z1T + self.dz2T

    @property
    def wronskian(self):
        return self.z1T * self.dz2T - self.dz1T * self.z2T

    @property
    def delta_prime(self):
        """d delta / d lambda from the variational equations (any even potential)."""
        return ((self.z1T - self.dz2T) * self.I12 - self.z2T * self.I11
                + self.dz1T * self.I22)

    @property
    def delta_prime_odd(self):
        """z1'(T) * int z2^2, equal to delta_prime wherever z2(T) = 0."""
        return self.dz1T * self.I22

    @property
    def coexistence(self):
        """|z2(T)| + |z1'(T)| on the frequency scale sqrt(|lambda|); zero when M = I."""
        w = math.sqrt(max(1.0, abs(self.lam)))
        return abs(self.z2T) * w + abs(self.dz1T) / w

    def residuals(self):
        """Scaled residuals of the Wronskian and the four even-potential identities."""
        z1, w1, z2, w2 = self.half
        out = {}
        sc = max(1.0, abs(self.z1T * self.dz2T) + abs(self.dz1T * self.z2T))
        out["wronskian"] = abs(self.wronskian - 1.0) / sc
        sc = max(1.0, 2 * abs(z1 * w2), 2 * abs(w1 * z2))
        out["z1T_a"] = abs(self.z1T - (2 * z1 * w2 - 1)) / sc
        out["z1T_b"] = abs(self.z1T - (1 + 2 * w1 * z2)) / sc
        out["z2T"] = abs(self.z2T - 2 * z2 * w2) / max(1.0, 2 * abs(z2 * w2))
        out["dz1T"] = abs(self.dz1T - 2 * z1 * w1) / max(1.0, 2 * abs(z1 * w1))
        out["dz2T"] = abs(self.dz2T - self.z1T) / max(1.0, abs(self.z1T))
        return out


def monodromy(pot, lam, t_eval=None):
    """Endpoint data of the normalized solutions over one period.

    With ``t_eval`` given, also returns the augmented state at those times.
    """
    T = pot.period
    pts = np.array([0.5 * T]) if t_eval is None else np.concatenate(
        [np.asarray(t_eval, dtype=float), [0.5 * T]])
    order = np.argsort(pts, kind="stable")
    y, ye = _run(pot, float(lam), T, pts[order])
    ys = np.empty_like(ye)
    ys[order] = ye
    h = ys[-1]
    data = MonodromyData(float(lam), y[3], y[4], y[5], y[6], (h[3], h[4], h[5], h[6]),
                         y[9], y[10], y[11], y[7], y[8])
    if t_eval is None:
        return data
    return data, ys[:-1]


def monodromy_many(pot, lams, workers=None):
    """Monodromy at several lambda; threads are safe since the kernel is pure."""
    lams = [float(x) for x in lams]
    if not workers or workers <= 1:
        return [monodromy(pot, x) for x in lams]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda x: monodromy(pot, x), lams))


def discriminant(pot, lam):
    return monodromy(pot, lam).delta


def discriminant_derivative(pot, lam):
    return monodromy(pot, lam).delta_prime


def half_period(pot, lam):
    """(z1, z1', z2, z2', phase1, phase2) at T/2."""
    y, _ = _run(pot, float(lam), 0.5 * pot.period)
    return tuple(float(v) for v in y[3:9])


def eigenvalue_count(pot, lam):
    """Numbers of (even, odd) periodic eigenvalues strictly below ``lam``."""
    *_, p1, p2 = half_period(pot, lam)
    return max(0, math.floor(p1 / math.pi + 0.5)), max(0, math.floor(p2 / math.pi))


@dataclass
class PeriodicEigenvalue:
    lambda_k: float
    k: int
    multiplicity: int
    parity: str
    nodal_count: int | None = None

    def to_dict(self):
        return {"lambda": self.lambda_k, "k": self.k, "multiplicity": self.multiplicity,
                "parity": self.parity, "nodal_count": self.nodal_count}


@dataclass
class HillSpectrum:
    potential: object
    lambda_max: float
    eigenvalues: list
    window: tuple
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)

    def __getitem__(self, idx):
        return self.eigenvalues[idx]

    def values(self, with_multiplicity=True):
        out = []
        for e in self.eigenvalues:
            out.extend([e.lambda_k] * (e.multiplicity if with_multiplicity else 1))
        return out

    def ordinal(self, k):
        """The eigenvalue lambda_k with multiplicities counted (1-based)."""
        vals = self.values()
        if not 1 <= k <= len(vals):
            raise IndexError(f"lambda_{k} not inside the computed window")
        return vals[k - 1]

    def count_below(self, x):
        return sum(e.multiplicity for e in self.eigenvalues if e.lambda_k < x)

    def to_dict(self):
        pot = self.potential
        return {"kind": pot.kind, "i": pot.i, "j": pot.j,
                "lambda_max": self.lambda_max,
                "eigenvalues": [e.to_dict() for e in self.eigenvalues]}


def lower_bound(pot):
    """A lambda below every periodic eigenvalue (Rayleigh: lambda_1 >= min V)."""
    vmin = pot.min_value()
    lo = vmin - 1.0 - 1e-3 * abs(vmin)
    step = 1.0 + abs(lo)
    for _ in range(60):
        if eigenvalue_count(pot, lo) == (0, 0):
            return lo
        lo -= step
        step *= 2
    raise IntegrationError(f"no lower bracket for {pot.label}")


def _family_roots(pot, index, count, lo, hi):
    # index 4 -> even (Neumann) phase, 5 -> odd (Dirichlet) phase
    roots = []
    a = lo
    for m in range(count):
        target = (m + 0.5) * math.pi if index == 4 else (m + 1) * math.pi
        f = lambda lam, tg=target: half_period(pot, lam)[index] - tg
        root = brentq(f, a, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
        roots.append(root)
        a = root
    return roots


def periodic_eigenvalues(pot, lambda_max, nodal=True, workers=None):
    """All T-periodic eigenvalues up to ``lambda_max`` (inclusive to 1e-9)."""
    hi = float(lambda_max) + 1e-9 * max(1.0, abs(lambda_max))
    lo = lower_bound(pot)
    notes = []
    if hi <= lo:
        return HillSpectrum(pot, float(lambda_max), [], (lo, hi), ["window below min V"])
    n_even, n_odd = eigenvalue_count(pot, hi)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=2) as ex:
            fe = ex.submit(_family_roots, pot, 4, n_even, lo, hi)
            fo = ex.submit(_family_roots, pot, 5, n_odd, lo, hi)
            even, odd = fe.result(), fo.result()
    else:
        even = _family_roots(pot, 4, n_even, lo, hi)
        odd = _family_roots(pot, 5, n_odd, lo, hi)
    tagged = sorted([(x, "even") for x in even] + [(x, "odd") for x in odd])
    merged = []
    idx = 0
    while idx < len(tagged):
        lam, par = tagged[idx]
        if idx + 1 < len(tagged):
            lam2, par2 = tagged[idx + 1]
            if par2 != par and abs(lam2 - lam) <= 1e-6 * max(1.0, abs(lam)):
                mid = 0.5 * (lam + lam2)
                if monodromy(pot, mid).coexistence < COEXISTENCE_TOL:
                    merged.append((mid, 2, "both"))
                    idx += 2
                    continue
                notes.append(f"near-coincident simple eigenvalues at {lam!r}, {lam2!r}")
        merged.append((lam, 1, par))
        idx += 1
    eigs = []
    k = 1
    for lam, mult, par in merged:
        eigs.append(PeriodicEigenvalue(float(lam), k, mult, par))
        k += mult
    if nodal:
        for e in eigs:
            e.nodal_count = nodal_count(pot, e)
    notes.append(f"window scanned: [{lo!r}, {hi!r}]")
    return HillSpectrum(pot, float(lambda_max), eigs, (lo, hi), notes)


@dataclass(frozen=True)
class NodalResult:
    count: int
    zeros: tuple
    tangential: bool
    ambiguous: bool


def _hermite_root(ta, tb, za, zb, da, db):
    h = tb - ta

    def p(s):
        s2, s3 = s * s, s * s * s
        return ((2 * s3 - 3 * s2 + 1) * za + (s3 - 2 * s2 + s) * h * da
                + (-2 * s3 + 3 * s2) * zb + (s3 - s2) * h * db)

    try:
        return ta + h * brentq(p, 0.0, 1.0, xtol=1e-14)
    except ValueError:
        return ta + h * za / (za - zb)


def eigenfunction_zeros(pot, eig, grid=NODAL_GRID, which=None):
    """Zeros on [0, T) of the periodic solution selected by the eigenvalue's parity."""
    if which is None:
        which = "odd" if eig.parity == "odd" else "even"
    T = pot.period
    # offset grid avoids the forced zeros of odd solutions at 0 and T/2
    ts = (np.arange(grid) + 0.5) * (T / grid)
    _, ys = monodromy(pot, eig.lambda_k, t_eval=ts)
    zi, di = (3, 4) if which == "even" else (5, 6)
    z, dz = ys[:, zi], ys[:, di]
    scale = float(np.max(np.abs(z)))
    thr = 1e-9 * scale
    small = np.abs(z) < thr
    ambiguous = bool(np.any(small & np.roll(small, -1)))
    zeros = []
    for a in range(grid):
        b = (a + 1) % grid
        if z[a] == 0.0 or (z[a] > 0) != (z[b] > 0):
            tb = ts[b] + (T if b == 0 else 0.0)
            root = _hermite_root(ts[a], tb, z[a], z[b], dz[a], dz[b])
            zeros.append(float(root % T))
    # local minima of |z| near zero without a sign change
    az = np.abs(z)
    lm = (az < np.roll(az, 1)) & (az < np.roll(az, -1)) & (az < 1e-6 * scale)
    same = (z > 0) == (np.roll(z, -1) > 0)
    same &= (z > 0) == (np.roll(z, 1) > 0)
    tangential = bool(np.any(lm & same))
    return NodalResult(len(zeros), tuple(sorted(zeros)), tangential, ambiguous)


def nodal_count(pot, eig, grid=NODAL_GRID):
    res = eigenfunction_zeros(pot, eig, grid)
    if res.ambiguous:
        warnings.warn(f"{pot.label}: |z| stays below threshold near lambda={eig.lambda_k!r}",
                      RuntimeWarning, stacklevel=2)
    if res.tangential:
        warnings.warn(f"{pot.label}: possible tangential zero at lambda={eig.lambda_k!r}",
                      RuntimeWarning, stacklevel=2)
    return res.count
