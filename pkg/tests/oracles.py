"""Independent reference computations used only by the tests.

Nothing here imports the enumeration or evaluation code under test.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np

# Frozen reference values.  Regenerate with tests/data/generate_fixtures.py.
# A1 theta at xi = 1, summed over |n| <= 10 at 30 digits.
A1_THETA_XI1 = (1.0037348854877391, 0.41576060259602703)


def box_norm_counts(gram, shift, bound: int) -> dict[Fraction, int]:
    """Brute force over the integer box |x_i + shift_i| <= sqrt(bound * W_ii).

    (x, w_i) = x_i in simple-root coordinates, so Cauchy-Schwarz bounds each
    coordinate by sqrt((x, x) (w_i, w_i)) with W the inverse Gram matrix.
    """
    g = np.array(gram, dtype=float)
    w = np.linalg.inv(g)
    r = len(gram)
    den = math.lcm(*(Fraction(c).denominator for c in shift))
    p = np.array([int(Fraction(c) * den) for c in shift], dtype=np.int64)
    ranges = []
    for i in range(r):
        half = math.sqrt(bound * w[i, i]) + 1e-9
        c = float(Fraction(shift[i]))
        ranges.append(np.arange(math.ceil(-half - c), math.floor(half - c) + 1, dtype=np.int64))
    gi = np.array(gram, dtype=np.int64)
    counts: dict[int, int] = {}
    head = min(2, r)
    for prefix in itertools.product(*ranges[:head]):
        rest = np.array(np.meshgrid(*ranges[head:], indexing="ij")).reshape(r - head, -1).T if r > head \
            else np.zeros((1, 0), dtype=np.int64)
        x = np.hstack([np.tile(np.array(prefix, dtype=np.int64), (len(rest), 1)), rest])
        y = den * x + p
        q = np.einsum("ij,jk,ik->i", y, gi, y)
        q = q[q <= bound * den * den]
        for v, c in zip(*np.unique(q, return_counts=True)):
            counts[int(v)] = counts.get(int(v), 0) + int(c)
    return {Fraction(v, den * den): c for v, c in sorted(counts.items())}


def sigma3(n: int) -> int:
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def riemann_zeta(s: float, n: int = 60) -> float:
    """zeta(s) from the alternating series with Borwein's acceleration."""
    d = [0.0] * (n + 1)
    acc = 0.0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4 ** i / (math.factorial(n - i) * math.factorial(2 * i)) \
            if i else 1 / n
        d[i] = n * acc
    eta = -sum((-1) ** k * (d[k] - d[n]) / (k + 1) ** s for k in range(n)) / d[n]
    return eta / (1 - 2 ** (1 - s))


def a1_theta(xi, terms: int = 10) -> tuple[complex, complex]:
    """A1 theta components at xi: norms 2 n^2 and 2 (n + 1/2)^2."""
    mpmath.mp.dps = 30
    x = mpmath.mpmathify(xi)
    t0 = sum(mpmath.exp(-mpmath.pi * x * 2 * n * n) for n in range(-terms, terms + 1))
    t1 = sum(mpmath.exp(-mpmath.pi * x * 2 * (n + 0.5) ** 2) for n in range(-terms, terms + 1))
    return complex(t0), complex(t1)


def e8_theta(tau, terms: int = 200) -> complex:
    """Theta series of E8 as 1 + 240 sum sigma_3(n) q^n, q = exp(2 pi i tau)."""
    mpmath.mp.dps = 30
    q = mpmath.exp(2j * mpmath.pi * mpmath.mpmathify(tau))
    return complex(1 + 240 * sum(sigma3(n) * q ** n for n in range(1, terms + 1)))
