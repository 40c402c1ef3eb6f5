"""Laplace spectrum of the round unit sphere S^k."""

from math import comb
from typing import NamedTuple


class SphereMode(NamedTuple):
    k: int
    i: int
    alpha_i: int
    m_i: int


def sphere_spectrum(k, i):
    """i-th distinct eigenvalue (i >= 1) of -Delta on S^k and its multiplicity."""
    if k < 1 or i < 1:
        raise ValueError("need k >= 1 and i >= 1")
    alpha = (i - 1) * (k + i - 2)
    if i == 1:
        m = 1
    elif i == 2:
        m = k + 1
    else:
        m = comb(k + i - 1, i - 1) - comb(k + i - 3, i - 3)
    return SphereMode(k, i, alpha, m)
