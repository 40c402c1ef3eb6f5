"""Laplacian and Jacobi spectra assembled from the separated Hill operators.

An eigenvalue of L_{ij} (resp. S_{ij}) with Hill multiplicity n_l contributes
n_l * m_i * m_j to the corresponding eigenvalue of -Delta (resp. the Jacobi
operator), where m_i is the multiplicity of the i-th eigenvalue of S^{n-1}.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import FrontierError
from .geometry import curvatures_from_state, metric_from_state
from .harmonics import SphereMode, sphere_spectrum
from .hill import HillPotential, periodic_eigenvalues

__all__ = ["SphereMode", "sphere_spectrum", "stability_index", "laplacian_spectrum",
           "first_nonzero_eigenvalue", "AggregateSpectrum", "IndexReport"]

MERGE_TOL = 1e-7
FRONTIER_GRID = 2048
MODE_CAP = 64


@dataclass
class SpectrumEntry:
    lam: float
    multiplicity: int
    sources: list

    def to_dict(self):
        return {"lambda": self.lam, "multiplicity": self.multiplicity,
                "sources": [{"i": i, "j": j, "k": k, "hill_multiplicity": m}
                            for i, j, k, m in self.sources]}


@dataclass
class AggregateSpectrum:
    n: int
    kind: str
    lambda_max: float
    entries: list
    included: list
    frontier: list
    notes: list = field(default_factory=list)
    operator_spectra: dict = field(default_factory=dict, repr=False)

    def values(self):
        return [e.lam for e in self.entries]

    def multiplicity_of(self, lam, tol=1e-6):
        return sum(e.multiplicity for e in self.entries if abs(e.lam - lam) < tol)

    def to_dict(self):
        return {"n": self.n, "lambda_max": self.lambda_max,
                "spectrum": [e.to_dict() for e in self.entries],
                "frontier": [{"i": i, "j": j, "bound": b} for i, j, b in self.frontier]}


class _Grid:
    """E, G, |A|^2 on a uniform grid, for the pointwise truncation bounds."""

    def __init__(self, curve, num=FRONTIER_GRID):
        t = np.arange(num) * (curve.period / num)
        r, th, al = curve.evaluate(t)
        m = metric_from_state(curve.n, r, th, al)
        self.E, self.G = m.E, m.G
        self.normA2 = curvatures_from_state(curve.n, r, th, al).normA2
        self.n = curve.n

    def jacobi_bound(self, ai, aj):
        return float(np.min(ai / self.E + aj / self.G - self.normA2 - (2 * self.n - 1)))

    def laplace_bound(self, ai, aj):
        return float(np.min(ai / self.E + aj / self.G))


def _frontier(curve, keep, cap):
    """(i, j) pairs satisfying ``keep(ai, aj)`` and the first excluded pair per row."""
    k = curve.n - 1
    included, frontier = [], []
    for j in range(1, cap + 1):
        aj = sphere_spectrum(k, j).alpha_i
        row = 0
        for i in range(1, cap + 1):
            ai = sphere_spectrum(k, i).alpha_i
            ok, bound = keep(ai, aj)
            if not ok:
                frontier.append((i, j, bound))
                break
            included.append((i, j))
            row += 1
        else:
            raise FrontierError(f"truncation bound never activated for j={j} below i={cap}")
        if row == 0:
            return included, frontier
    raise FrontierError(f"truncation bound never activated below j={cap}")


def _spectra(curve, kind, pairs, lambda_max, workers):
    def job(ij):
        return ij, periodic_eigenvalues(HillPotential(curve, kind, *ij), lambda_max)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(job, pairs))
    else:
        results = [job(ij) for ij in pairs]
    return dict(sorted(results))


def _aggregate(curve, kind, spectra, lambda_max, included, frontier, notes):
    k = curve.n - 1
    raw = []
    for (i, j), spec in spectra.items():
        w = sphere_spectrum(k, i).m_i * sphere_spectrum(k, j).m_i
        for e in spec:
            raw.append((e.lambda_k, e.multiplicity * w, (i, j, e.k, e.multiplicity)))
    raw.sort(key=lambda x: (x[0], x[2]))
    entries = []
    for lam, mult, src in raw:
        if entries and abs(lam - entries[-1].lam) <= MERGE_TOL:
            entries[-1].multiplicity += mult
            entries[-1].sources.append(src)
        else:
            if entries and abs(lam - entries[-1].lam) < 10 * MERGE_TOL:
                notes.append(f"merge ambiguity near {lam!r}")
            entries.append(SpectrumEntry(lam, mult, [src]))
    return AggregateSpectrum(curve.n, kind, float(lambda_max), entries, included,
                             frontier, notes, spectra)


def laplacian_spectrum(curve, lambda_max, workers=None, cap=MODE_CAP):
    """Spectrum of -Delta below ``lambda_max`` over all contributing (i, j)."""
    grid = _Grid(curve)

    def keep(ai, aj):
        b = grid.laplace_bound(ai, aj)
        return b <= lambda_max, b

    included, frontier = _frontier(curve, keep, cap)
    spectra = _spectra(curve, "L", included, lambda_max, workers)
    return _aggregate(curve, "L", spectra, lambda_max, included, frontier, [])


@dataclass
class IndexReport:
    n: int
    index_computed: int
    index_lower_bound: int
    tallies: list
    frontier: list
    negatives: AggregateSpectrum
    near_zero: list

    def tally(self, i, j):
        for t in self.tallies:
            if (t["i"], t["j"]) == (i, j):
                return t
        raise KeyError((i, j))

    def to_dict(self):
        return {"n": self.n, "index_lower_bound": self.index_lower_bound,
                "index_computed": self.index_computed, "tallies": self.tallies,
                "frontier": [{"i": i, "j": j, "bound": b} for i, j, b in self.frontier]}


def index_lower_bound(n):
    return n * n + 4 * n + 3


def stability_index(curve, workers=None, cap=MODE_CAP, zero_tol=MERGE_TOL):
    """Count negative eigenvalues of the Jacobi operator with multiplicity.

    (i, j) is dropped once min_t(a_i/E + a_j/G - |A|^2 - (2n-1)) >= 0, which
    makes the quadratic form of S_{ij} nonnegative.
    """
    grid = _Grid(curve)

    def keep(ai, aj):
        b = grid.jacobi_bound(ai, aj)
        return b < 0, b

    included, frontier = _frontier(curve, keep, cap)
    # window reaching just above 0 so zero modes are found and classified
    spectra = _spectra(curve, "S", included, 0.5, workers)
    k = curve.n - 1
    tallies, near_zero = [], []
    total = 0
    neg_spectra = {}
    for (i, j), spec in spectra.items():
        w = sphere_spectrum(k, i).m_i * sphere_spectrum(k, j).m_i
        negs = [e for e in spec if e.lambda_k < -zero_tol]
        near_zero.extend((i, j, e.lambda_k) for e in spec if abs(e.lambda_k) <= zero_tol)
        count = sum(e.multiplicity for e in negs)
        total += count * w
        tallies.append({"i": i, "j": j, "negatives": count, "weight": w,
                        "contribution": count * w,
                        "eigenvalues": [e.lambda_k for e in negs]})
        neg_spectra[(i, j)] = type(spec)(spec.potential, 0.0, negs, spec.window, spec.notes)
    agg = _aggregate(curve, "S", neg_spectra, 0.0, included, frontier, [])
    return IndexReport(curve.n, total, index_lower_bound(curve.n), tallies, frontier,
                       agg, near_zero)


def first_nonzero_eigenvalue(curve, workers=None, positive_tol=MERGE_TOL):
    """Smallest positive eigenvalue of -Delta; the window grows until one is found."""
    lam_max = 2 * curve.n - 1 + 0.5
    for _ in range(20):
        spec = laplacian_spectrum(curve, lam_max, workers=workers)
        pos = [v for v in spec.values() if v > positive_tol]
        if pos:
            return min(pos)
        lam_max *= 2
    raise FrontierError("no positive eigenvalue found")
