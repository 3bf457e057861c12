"""Complex log-Gamma, upper incomplete gamma with complex order, ray quadrature."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

EPS = np.finfo(float).eps
CF_SWITCH_MARGIN = 2.0
_TINY = 1e-300


class PoleError(ValueError):
    """Evaluation requested at a pole."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ComplexValueWithError:
    value: complex
    abs_error_bound: float

    def __add__(self, other):
        if isinstance(other, ComplexValueWithError):
            return ComplexValueWithError(self.value + other.value,
                                         self.abs_error_bound + other.abs_error_bound)
        return ComplexValueWithError(self.value + other, self.abs_error_bound)

    __radd__ = __add__

    def __neg__(self):
        return ComplexValueWithError(-self.value, self.abs_error_bound)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ComplexValueWithError):
            err = (abs(self.value) * other.abs_error_bound + abs(other.value) * self.abs_error_bound
                   + self.abs_error_bound * other.abs_error_bound)
            return ComplexValueWithError(self.value * other.value, err)
        return ComplexValueWithError(self.value * other, abs(other) * self.abs_error_bound)

    __rmul__ = __mul__


def _near_nonpositive_integer(s: complex, radius: float) -> bool:
    return s.real < radius and abs(s - round(s.real)) < radius


def log_gamma(s) -> ComplexValueWithError:
    """Principal branch of log Gamma(s)."""
    s = complex(s)
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real):
        raise PoleError(f"Gamma has a pole at s = {s.real:g}")
    v = complex(special.loggamma(s))
    # loggamma is accurate to a few ulp of max(|value|, 1)
    return ComplexValueWithError(v, 8 * EPS * max(abs(v), 1.0))


def _upper_cf(s: complex, x: float, max_iter: int) -> tuple[complex, float]:
    """Legendre continued fraction, modified Lentz."""
    b = x + 1 - s
    c = 1 / _TINY
    d = 1 / b if b != 0 else 1 / _TINY
    h = d
    for i in range(1, max_iter):
        an = -i * (i - s)
        b += 2
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < EPS:
            logpref = -x + s * math.log(x)
            val = cmath.exp(logpref + cmath.log(h))
            rel = EPS * (4 + math.sqrt(i) + abs(logpref))
            return val, abs(val) * rel
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge at s={s}, x={x}")


def _lower_series(s: complex, x: float) -> tuple[complex, float]:
    """gamma(s, x) = x^s e^-x sum_n x^n / (s (s+1) ... (s+n))."""
    term = 1 / s
    total = term
    abs_total = abs(term)
    n = 0
    while True:
        n += 1
        term *= x / (s + n)
        total += term
        abs_total += abs(term)
        if abs(term) < EPS * abs(total) and n > x:
            break
        if n > 10_000:
            raise ArithmeticError("incomplete gamma series did not converge")
    logpref = -x + s * math.log(x)
    pref = cmath.exp(logpref)
    val = pref * total
    err = abs(pref) * abs_total * EPS * (4 + math.sqrt(n)) + abs(val) * EPS * abs(logpref)
    return val, err


def _expm1(z: complex) -> complex:
    return 2 * cmath.sinh(z / 2) * cmath.exp(z / 2)


def _upper_small_order(eps: complex, x: float) -> tuple[complex, float]:
    """Gamma(eps, x) for |Re eps| <= 1/2, x < 2, free of the 1/eps cancellation.

    Gamma(eps) - x^eps/eps = (Gamma(1+eps) - 1)/eps - expm1(eps log x)/eps.
    """
    lx = math.log(x)
    if abs(eps) < 1e-300:
        head = -EULER_GAMMA - lx
    else:
        g1 = _expm1(complex(special.loggamma(1 + eps))) / eps
        head = g1 - _expm1(eps * lx) / eps
    # - sum_{n>=1} (-x)^n x^eps / (n! (n + eps))
    tail, term, n = 0j, 1.0, 0
    abs_tail = 0.0
    while True:
        n += 1
        term *= -x / n
        t = term / (n + eps)
        tail += t
        abs_tail += abs(t)
        if abs(t) < EPS * 1e-3 * max(abs(tail), 1e-300) or n > 200:
            break
    xe = cmath.exp(eps * lx)
    val = head - xe * tail
    err = EPS * (64 * abs(head) + 64 * abs(xe) * abs_tail + 4)
    return val, err


EULER_GAMMA = 0.5772156649015329


def upper_incomplete_gamma(s, x: float) -> ComplexValueWithError:
    """Gamma(s, x) = int_x^inf t^(s-1) e^-t dt for complex s and real x > 0.

    Regimes: continued fraction when x >= |s| + 2 (or Re s < 1/2 and x >= 2);
    lower series plus reflection through log Gamma for the remaining Re s >= 1/2;
    for Re s < 1/2 and small x, a pole-free expansion at the nearest order with
    |Re| <= 1/2 followed by downward recurrence.
    """
    s = complex(s)
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise ValueError("upper_incomplete_gamma needs real x > 0")
    if x >= abs(s) + CF_SWITCH_MARGIN or (s.real < 0.5 and x >= 2.0):
        val, err = _upper_cf(s, x, 20_000)
        return ComplexValueWithError(val, err)
    if s.real >= 0.5:
        lg = log_gamma(s)
        g = cmath.exp(lg.value)
        lower, lerr = _lower_series(s, x)
        val = g - lower
        err = 2 * lerr + abs(g) * (2 * lg.abs_error_bound + 4 * EPS) + 2 * EPS * abs(val)
        return ComplexValueWithError(val, err)
    m = -math.floor(s.real + 0.5)
    eps = s + m
    val, err = _upper_small_order(eps, x)
    lx = math.log(x)
    for j in range(1, m + 1):
        a = eps - j  # Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a
        p = cmath.exp(a * lx - x)
        val = (val - p) / a
        err = (err + 4 * EPS * abs(p)) / abs(a) + 4 * EPS * abs(val)
    return ComplexValueWithError(val, err)


def lower_incomplete_gamma(s, x: float) -> ComplexValueWithError:
    s = complex(s)
    if _near_nonpositive_integer(s, 1e-14):
        raise PoleError("lower incomplete gamma has a pole at nonpositive integers")
    val, err = _lower_series(s, float(x))
    return ComplexValueWithError(val, err)


def integrate_ray(f, a: float, direction: str = "to_infinity", tol: float = 1e-12,
                  limit: int = 400, points=None) -> ComplexValueWithError:
    """Adaptive Gauss-Kronrod quadrature of a complex integrand.

    ``direction="to_infinity"`` integrates over ``[a, inf)``, ``"unit_interval"``
    over ``[a, 1]``.
    """
    if direction == "to_infinity":
        lo, hi = a, np.inf
    elif direction == "unit_interval":
        lo, hi = a, 1.0
    else:
        raise ValueError("direction must be 'to_infinity' or 'unit_interval'")
    kw = {"epsabs": tol, "epsrel": tol, "limit": limit, "full_output": 1}
    if points is not None and np.isfinite(hi):
        kw["points"] = points
    parts = []
    for part in (lambda t: complex(f(t)).real, lambda t: complex(f(t)).imag):
        out = integrate.quad(part, lo, hi, **kw)
        v, e_ = out[0], abs(out[1])
        if len(out) > 3 and e_ > 100 * tol * max(1.0, abs(v)):
            raise QuadratureError(f"quadrature did not converge: {out[3]}")
        parts.append((v, e_))
    (re_, re_err), (im_, im_err) = parts
    return ComplexValueWithError(complex(re_, im_), re_err + im_err)


def integrate_ray_vector(f, a: float, tol: float = 1e-12, limit: int = 2000) -> tuple[np.ndarray, float]:
    """Integrate a complex vector-valued ``f`` over ``[a, inf)``; returns (value, abs error estimate)."""

    def split(t):
        v = np.asarray(f(t), dtype=complex)
        return np.concatenate([v.real, v.imag])

    val, err = integrate.quad_vec(split, a, np.inf, epsabs=tol, epsrel=tol, limit=limit, norm="max")
    n = len(val) // 2
    return val[:n] + 1j * val[n:], float(err)
