"""Shared independent oracles for the test suite.

These deliberately avoid the library's fast paths: the Fourier oracle is the
literal O(4^m) definition over exact Fractions (or a sign-matrix product for
larger m), so it can referee the butterfly transform.
"""

from fractions import Fraction

import numpy as np
import pytest


def cube_point(index: int, m: int) -> tuple[int, ...]:
    """Index -> point, bit b set meaning x_{b+1} = -1."""
    return tuple(-1 if (index >> b) & 1 else 1 for b in range(m))


def chi(subset_mask: int, point: tuple[int, ...]) -> int:
    value = 1
    for b, x in enumerate(point):
        if (subset_mask >> b) & 1:
            value *= x
    return value


def naive_fourier(table, m: int) -> list[Fraction]:
    """Exact coefficients straight from the definition, O(4^m)."""
    n = 1 << m
    return [
        Fraction(
            sum(int(table[i]) * chi(s, cube_point(i, m)) for i in range(n)), n
        )
        for s in range(n)
    ]


def sign_matrix(m: int) -> np.ndarray:
    """H[s, x] = chi_s(x) as a +-1 matrix, built from parity, not butterflies."""
    n = 1 << m
    parity = np.array([bin(v).count("1") & 1 for v in range(n)], dtype=np.int64)
    return (1 - 2 * parity[np.bitwise_and.outer(np.arange(n), np.arange(n))]).astype(
        np.float64
    )


def rv_moments(atoms):
    """(mean, variance) of [(value, prob), ...] by direct summation."""
    mean = sum(v * p for v, p in atoms)
    return mean, sum(p * (v - mean) ** 2 for v, p in atoms)


@pytest.fixture
def rng_seed():
    return 20240813
