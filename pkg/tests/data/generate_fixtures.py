"""Regenerate the frozen mpmath reference values in this directory.

    python3 tests/data/generate_fixtures.py
"""

import json
import pathlib
import random

import mpmath

HERE = pathlib.Path(__file__).parent


def incomplete_gamma_points(n: int = 400, seed: int = 20240611):
    rng = random.Random(seed)
    pts = []
    for i in range(n):
        regime = i % 4
        if regime == 0:  # continued fraction side
            s = complex(rng.uniform(-6, 8), rng.uniform(-10, 10))
            x = rng.uniform(abs(s) + 2.5, abs(s) + 40)
        elif regime == 1:  # series side, positive real part
            s = complex(rng.uniform(0.5, 9), rng.uniform(-8, 8))
            x = rng.uniform(0.05, abs(s) + 1.5)
        elif regime == 2:  # negative real part, small x
            s = complex(rng.uniform(-7, 0.5), rng.uniform(-6, 6))
            x = rng.uniform(0.2, 1.99)
        else:  # arguments met by the continuation: x = pi m for lattice norms
            s = complex(rng.uniform(-4, 8), rng.uniform(-5, 5))
            x = float(mpmath.pi) * rng.choice([2 / 3, 1, 4 / 3, 5 / 4, 2, 8 / 3, 4, 6, 10])
        pts.append((s, x))
    return pts


def main():
    mpmath.mp.dps = 40
    rows = []
    for s, x in incomplete_gamma_points():
        v = mpmath.gammainc(mpmath.mpc(s.real, s.imag), a=x)
        rows.append({"s": [s.real, s.imag], "x": x, "value": [float(v.real), float(v.imag)]})
    (HERE / "incomplete_gamma.json").write_text(json.dumps(rows, indent=1) + "\n")

    theta = []
    for xi in (1.0, 0.5, 2.0):
        x = mpmath.mpf(xi)
        t0 = sum(mpmath.exp(-mpmath.pi * x * 2 * n * n) for n in range(-10, 11))
        t1 = sum(mpmath.exp(-mpmath.pi * x * 2 * (n + mpmath.mpf(1) / 2) ** 2) for n in range(-10, 11))
        theta.append({"xi": xi, "theta": [float(t0), float(t1)]})
    (HERE / "a1_theta.json").write_text(json.dumps(theta, indent=1) + "\n")


if __name__ == "__main__":
    main()
