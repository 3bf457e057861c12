"""Epstein vector zeta functions of ADE root lattices.

``zeta_a(s) = sum over gamma in Q (gamma != 0 when a = 0) of R_a(gamma)^(-s)`` with
``R_a(gamma) = (gamma + w_a, gamma + w_a)``, and the completed vector
``Xi(s) = Gamma(s) pi^(-s) zeta(s)``, the Mellin transform of ``Theta(xi) - e_0``.

The continuation splits the Mellin integral at ``xi = 1`` and folds ``(0, 1)``
onto ``(1, inf)`` with the theta S-law ``Theta(1/xi) = xi^k rho_s^{-1} Theta(xi)``:

    Xi(s) = Xi'(s) + rho_s e_0 / (s - k) - e_0 / s
    Xi'(s)_a = F_a(s) + sum_b (rho_s)_ab F_b(k - s)
    F_a(s) = sum_m r_a(m) (pi m)^(-s) Gamma(s, pi m)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from adez.lattice import DiscriminantData, count_upper_bound, enumerate_norms, max_vectors
from adez.numerics import EPS, PoleError, integrate_ray_vector, log_gamma, upper_incomplete_gamma
from adez.theta import choose_bound, tail_bound, theta_sampler
from adez.weil import WeilRep, c_invariant_subspace, e, max_abs

POLE_RADIUS = 1e-6
DEFAULT_TOL = 1e-12
CONTINUATION_SCALE = 40.0  # pi * (smallest omitted norm) at xi = 1
CONVENTIONS = ("true", "stated")


class ZetaDomainError(ValueError):
    """Point outside the region where the requested method is valid."""


class ToleranceError(RuntimeError):
    """Truncation bound cannot reach the requested tolerance within the vector budget."""


class ResiduePoleError(PoleError):
    def __init__(self, s: complex, pole: Fraction, residue: np.ndarray, label: str):
        self.s = s
        self.pole = pole
        self.residue = residue
        self.label = label
        super().__init__(f"Xi has a pole at s = {pole}; residue {label} = {format_vector(residue)}")


def format_vector(v) -> str:
    parts = []
    for z in np.asarray(v):
        z = complex(z) + 0.0  # drop negative zeros
        if abs(z.imag) < 1e-15:
            parts.append(f"{z.real:.12g}")
        else:
            parts.append(f"{z.real:.12g}{z.imag:+.12g}j")
    return "(" + ", ".join(parts) + ")"


def e0(l: int) -> np.ndarray:
    v = np.zeros(l, dtype=complex)
    v[0] = 1
    return v


def gamma_pi(s: complex) -> complex:
    """Gamma(s) pi^(-s)."""
    return cmath.exp(log_gamma(s).value - s * math.log(math.pi))


# ---------------------------------------------------------------------------
# direct Dirichlet series


@dataclass(frozen=True)
class ZetaEvaluation:
    s: complex
    zeta: np.ndarray
    method: str
    abs_error: float
    bound: Fraction | None = None
    meets_tolerance: bool = True


def _ball_volume(r: int) -> float:
    return math.pi ** (r / 2) / math.gamma(r / 2 + 1)


def direct_tail_error(data: DiscriminantData, s: complex, bound: float) -> float:
    """Bound on |tail - smooth correction| for the Dirichlet series cut at ``bound``.

    Counting function N(X) = vol X^k / sqrt(l) + R(X) with
    |R(X)| <= vol/sqrt(l) * sum_{j<r} C(r,j) mu^(r-j) X^(j/2).
    """
    r = data.rank
    sigma = s.real
    mu = math.sqrt(data.covering_radius_sq_bound)
    total = 0.0
    for j in range(r):
        total += math.comb(r, j) * mu ** (r - j) * bound ** (j / 2 - sigma) / (sigma - j / 2)
    return abs(s) * _ball_volume(r) * total / math.sqrt(data.l)


def direct_budget_bound(data: DiscriminantData, budget: int) -> float:
    """Largest norm bound whose volume-predicted vector count over all cosets fits ``budget``."""
    per = budget / data.l * math.sqrt(data.l) / _ball_volume(data.rank)
    return per ** (2 / data.rank)


def choose_direct_bound(data: DiscriminantData, s: complex, tol: float,
                        budget: int | None = None) -> tuple[Fraction, bool]:
    budget = max_vectors() // 4 if budget is None else budget
    hi = max(direct_budget_bound(data, budget), 2.0)
    if direct_tail_error(data, s, hi) > tol:
        return Fraction(math.floor(hi)), False
    lo = 2.0
    if direct_tail_error(data, s, lo) <= tol:
        return Fraction(2), True
    for _ in range(100):
        mid = math.sqrt(lo * hi)
        if direct_tail_error(data, s, mid) > tol:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1:
            break
    return Fraction(math.ceil(hi)), True


def leading_scale(data: DiscriminantData, sigma: float) -> float:
    """Smallest first-shell term c_min * N_min^(-sigma) over the cosets."""
    out = math.inf
    for a in range(data.l):
        cap = max(2, math.ceil(data.coset_norm(a)))
        n, c = next(iter(enumerate_norms(data, a, cap)))
        out = min(out, c * float(n) ** -sigma)
    return out


def zeta_direct(data: DiscriminantData, s, bound=None, tol: float = 1e-10) -> ZetaEvaluation:
    """Dirichlet summation with a smooth tail correction; needs Re s > k + 1/2."""
    s = complex(s)
    k = float(data.k)
    if not s.real > k + 0.5:
        raise ZetaDomainError(f"direct summation needs Re s > k + 1/2 = {k + 0.5:g}, got {s}")
    # tol is absolute for values of order one and relative for the tiny
    # values at large Re s; half of it is left for rounding
    target = 0.5 * tol * min(1.0, leading_scale(data, s.real))
    if bound is None:
        bound, ok = choose_direct_bound(data, s, target)
    else:
        bound = Fraction(bound)
        ok = direct_tail_error(data, s, float(bound)) <= target
    b = float(bound)
    vol = _ball_volume(data.rank)
    smooth = s * vol * b ** (k - s) / ((s - k) * math.sqrt(data.l))
    out = np.zeros(data.l, dtype=complex)
    rounding = 0.0
    for a in range(data.l):
        spec = enumerate_norms(data, a, bound)
        n, c = spec.norm_array[::-1], spec.count_array[::-1]
        terms = c * np.exp(-s * np.log(n))
        head = complex(np.sum(terms))
        count = spec.total + (1 if a == 0 else 0)  # the counting function includes gamma = 0
        out[a] = head - count * b ** (-s) + smooth
        rounding = max(rounding, EPS * (len(n) + 4 + abs(s) * math.log(b + 2)) * float(np.sum(np.abs(terms))))
    err = direct_tail_error(data, s, b) + rounding
    return ZetaEvaluation(s, out, "direct", err, bound, ok)


# ---------------------------------------------------------------------------
# continuation


@dataclass(frozen=True)
class XiEvaluation:
    s: complex
    xi: np.ndarray
    xi_prime: np.ndarray
    e_term: np.ndarray
    xi_hat: np.ndarray
    abs_error: float
    bound: Fraction
    convention: str = "true"

    @property
    def zeta(self) -> np.ndarray:
        return self.xi / gamma_pi(self.s)


def continuation_tail(data: DiscriminantData, sigma: float, bound: float) -> float:
    """Bound on sum_{m > bound} r(m) |(pi m)^(-s) Gamma(s, pi m)| = int_1^inf xi^(sigma-1) tail dxi."""
    val, _ = integrate.quad(lambda x: x ** (sigma - 1) * tail_bound(data, x, bound), 1, np.inf,
                            epsrel=1e-6, limit=200)
    return 1.01 * val


def choose_continuation_bound(data: DiscriminantData, s: complex, tol: float) -> Fraction:
    k = float(data.k)
    b = math.ceil(CONTINUATION_SCALE / math.pi)
    limit = max_vectors()
    while True:
        err = continuation_tail(data, s.real, b) + math.sqrt(data.l) * continuation_tail(data, k - s.real, b)
        if err <= tol:
            return Fraction(b)
        b += 1
        if count_upper_bound(data, b) > limit:
            raise ToleranceError(f"tolerance {tol:g} at s = {s} needs norm bound > {b}")


def pole_check(data: DiscriminantData, rep: WeilRep, s: complex, convention: str = "true") -> None:
    l = data.l
    if abs(s) < POLE_RADIUS:
        raise ResiduePoleError(s, Fraction(0), -e0(l), "-e_0")
    if abs(s - float(data.k)) < POLE_RADIUS:
        res, label = rep.rho_s @ e0(l), "rho_s e_0"
        if convention == "stated":
            res, label = rep.s_phase * res, "e(-k/2) rho_s e_0"
        raise ResiduePoleError(s, data.k, res, label)


def _f_vector(data: DiscriminantData, s: complex, bound: Fraction, memo: dict) -> tuple[np.ndarray, float]:
    """F_a(s) = sum_m r_a(m) (pi m)^(-s) Gamma(s, pi m) and an absolute error bound."""
    out = np.zeros(data.l, dtype=complex)
    err = 0.0
    for a in range(data.l):
        spec = enumerate_norms(data, a, bound)
        acc, acc_err = 0j, 0.0
        for m, c in reversed(list(spec)):
            key = (s, m)
            if key not in memo:
                x = math.pi * float(m)
                g = upper_incomplete_gamma(s, x)
                p = cmath.exp(-s * math.log(x))
                memo[key] = (p * g.value, abs(p) * (g.abs_error_bound + 4 * EPS * abs(g.value) * (1 + abs(s * math.log(x)))))
            v, ve = memo[key]
            acc += c * v
            acc_err += c * ve
        out[a] = acc
        err = max(err, acc_err + EPS * len(spec) * abs(acc))
    return out, err


def xi_continued(data: DiscriminantData, rep: WeilRep, s, bound=None, tol: float = DEFAULT_TOL,
                 convention: str = "true") -> XiEvaluation:
    """Xi(s) on the punctured plane; refuses points within 1e-6 of 0 and k.

    ``convention="stated"`` inserts the scalar e(-k/2) in front of rho_s in both
    Xi' and the pole term.  It coincides with the true continuation only when
    k is a multiple of 4 and is kept for diagnostics.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    s = complex(s)
    pole_check(data, rep, s, convention)
    k = data.k
    bound = choose_continuation_bound(data, s, tol) if bound is None else Fraction(bound)
    memo: dict = {}
    f_s, err_s = _f_vector(data, s, bound, memo)
    f_r, err_r = _f_vector(data, float(k) - s, bound, memo)
    rho = rep.rho_s if convention == "true" else rep.s_phase * rep.rho_s
    xi_prime = f_s + rho @ f_r
    z = e0(data.l)
    e_term = (rho @ z) / (s - float(k)) - z / s
    xi = xi_prime + e_term
    xi_hat = xi - rep.s_phase * (rep.rho_s @ z) / s
    tail = (continuation_tail(data, s.real, float(bound))
            + math.sqrt(data.l) * continuation_tail(data, float(k) - s.real, float(bound)))
    err = err_s + math.sqrt(data.l) * err_r + tail + 8 * EPS * max_abs(xi)
    return XiEvaluation(s, xi, xi_prime, e_term, xi_hat, err, bound, convention)


def zeta_continued(data: DiscriminantData, rep: WeilRep, s, **kw) -> ZetaEvaluation:
    ev = xi_continued(data, rep, s, **kw)
    g = gamma_pi(ev.s)
    return ZetaEvaluation(ev.s, ev.xi / g, "continued", ev.abs_error / abs(g), ev.bound)


# ---------------------------------------------------------------------------
# residues


@dataclass(frozen=True)
class ResidueCheck:
    pole: Fraction
    expected: np.ndarray  # limit as stated in the pole term of E(s, k)
    true_residue: np.ndarray  # limit implied by the theta S-law
    directions: tuple[complex, ...]
    limits: tuple[np.ndarray, ...]

    @property
    def deviation(self) -> float:
        return max(max_abs(v - self.expected) for v in self.limits)

    @property
    def true_deviation(self) -> float:
        return max(max_abs(v - self.true_residue) for v in self.limits)

    @property
    def spread(self) -> float:
        return max(max_abs(v - self.limits[0]) for v in self.limits)


APPROACH = (1, 1j, -1, -1j)


def residue_limit(data: DiscriminantData, rep: WeilRep, pole, h: float = 1e-4,
                  directions=APPROACH) -> ResidueCheck:
    """lim (s - p) Xi(s) from each direction, Richardson-extrapolated from steps h and h/2."""
    p = Fraction(pole)
    if p not in (0, data.k):
        raise ValueError("Xi has poles only at 0 and k")
    z = e0(data.l)
    if p == 0:
        expected = true = -z
    else:
        true = rep.rho_s @ z
        expected = rep.s_phase * true
    limits = []
    for d in directions:
        vals = []
        for step in (h, h / 2):
            s = float(p) + step * d
            vals.append((s - float(p)) * xi_continued(data, rep, s).xi)
        limits.append(2 * vals[1] - vals[0])
    return ResidueCheck(p, expected, true, tuple(complex(d) for d in directions), tuple(limits))


# ---------------------------------------------------------------------------
# Mellin transform


@dataclass(frozen=True)
class MellinCheck:
    samples: tuple[complex, ...]
    residuals: tuple[float, ...]
    quad_errors: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0


def mellin_samples(k) -> tuple[complex, ...]:
    k = float(k)
    return (complex(k + 0.3), complex(k + 1, 0.7), complex(k + 1.8, -0.4))


def mellin_transform(data: DiscriminantData, rep: WeilRep, s, tol: float = 1e-12) -> tuple[np.ndarray, float]:
    """int_0^inf xi^(s-1) (Theta(xi) - e_0) dxi by quadrature; needs Re s > k.

    The piece over (0, 1) is mapped to (1, inf) through xi -> 1/u and the
    theta S-law, so every theta evaluation happens at Re xi >= 1.
    """
    s = complex(s)
    k = float(data.k)
    if not s.real > k:
        raise ZetaDomainError(f"the Mellin integral converges for Re s > k = {k:g}, got {s}")
    bound = choose_bound(data, 1.0, 1e-16)
    theta = theta_sampler(data, bound)
    inv = rep.rho_s.conj().T
    z = e0(data.l)

    def integrand(u):
        th = theta(u)
        return u ** (s - 1) * (th - z) + u ** (-s - 1) * (u ** k * (inv @ th) - z)

    val, err = integrate_ray_vector(integrand, 1.0, tol=tol)
    tail = tail_bound(data, 1.0, float(bound)) * (1 / max(s.real - k, 1e-3) + 1 / max(s.real, 1e-3))
    return val, err + math.sqrt(data.l) * tail


def mellin_consistency(data: DiscriminantData, rep: WeilRep, samples=None) -> MellinCheck:
    samples = mellin_samples(data.k) if samples is None else tuple(complex(x) for x in samples)
    res, qerr = [], []
    for s in samples:
        m, err = mellin_transform(data, rep, s)
        res.append(max_abs(m - xi_continued(data, rep, s).xi))
        qerr.append(err)
    return MellinCheck(samples, tuple(res), tuple(qerr))


# ---------------------------------------------------------------------------
# functional equation


def fe_samples(k) -> tuple[complex, ...]:
    h = float(k) / 2
    offs = (0.5 + 1j, -0.8 + 0.3j, 1.2 - 0.6j, 0.25 + 2j, -1.7 - 1.1j)
    return tuple(h + d for d in offs)


def c_operator(rep: WeilRep) -> np.ndarray:
    """Mellin-side C action e(-k) rho_c."""
    return e(-rep.k) * rep.rho_c


@dataclass(frozen=True)
class FEReport:
    spec: str
    k: Fraction
    samples: tuple[complex, ...]
    invariant_dimension: int
    e0_projected_away: bool
    hat_projected: tuple[float, ...] | None  # Xi^(s) - e(-k/2) rho_s Xi^(k-s) on the invariant subspace
    proof_form_projected: tuple[float, ...] | None  # proof form with its right-hand side, invariant subspace
    raw_norm: tuple[float, ...]  # |Xi(s) - e(-k/2) rho_s Xi(k-s)|, raw vector
    raw_vs_obstruction: tuple[float, ...]  # distance to (e(-k) rho_c - Id) e_0 / s
    obstruction: tuple[np.ndarray, ...]
    corrected: tuple[float, ...]  # |Xi(s) - rho_s Xi(k-s)|
    primed_projected: tuple[float, ...]  # Xi' part of the stated form with its right-hand side
    pole_term: tuple[float, ...]  # E(s) - e(-k/2) rho_s E(k - s) - (e(-k) rho_c - Id) e0 / s
    kernel: tuple[float, ...]  # same identity for the integrand G(s, k | xi)
    abs_error: float
    extras: dict = field(default_factory=dict)


def e_term(rep: WeilRep, s: complex, convention: str = "stated") -> np.ndarray:
    z = e0(rep.l)
    rho = rep.rho_s if convention == "true" else rep.s_phase * rep.rho_s
    return (rho @ z) / (s - float(rep.k)) - z / s


def g_kernel(rep: WeilRep, psi: np.ndarray, s: complex, xi: float) -> np.ndarray:
    """G(s, k | xi) = (xi^(k-s) e(-k/2) rho_s + xi^s) Psi(xi)."""
    k = float(rep.k)
    return xi ** (k - s) * rep.s_phase * (rep.rho_s @ psi) + xi ** s * psi


def verify_functional_equation(data: DiscriminantData, rep: WeilRep, samples=None,
                               kernel_points=(1.0, 2.0)) -> FEReport:
    samples = fe_samples(data.k) if samples is None else tuple(complex(x) for x in samples)
    k = float(data.k)
    inv = c_invariant_subspace(rep)
    proj = inv.projector() if inv.dimension else None
    z = e0(data.l)
    ph = rep.s_phase
    cop = c_operator(rep)
    hat, proof, raw, rvo, obs, corr, primed, pt = [], [], [], [], [], [], [], []
    err = 0.0
    for s in samples:
        a = xi_continued(data, rep, s)
        b = xi_continued(data, rep, k - s)
        err = max(err, a.abs_error + b.abs_error)
        rhs = (cop - np.eye(data.l)) @ z / s
        r = a.xi - ph * (rep.rho_s @ b.xi)
        raw.append(max_abs(r))
        rvo.append(max_abs(r - rhs))
        obs.append(rhs)
        corr.append(max_abs(a.xi - rep.rho_s @ b.xi))
        pt.append(max_abs(e_term(rep, s) - ph * (rep.rho_s @ e_term(rep, k - s)) - rhs))
        sa = xi_continued(data, rep, s, bound=a.bound, convention="stated")
        sb = xi_continued(data, rep, k - s, bound=b.bound, convention="stated")
        primed_res = sa.xi_prime - ph * (rep.rho_s @ sb.xi_prime) - rhs
        if proj is not None:
            hat.append(max_abs(proj @ (a.xi_hat - ph * (rep.rho_s @ b.xi_hat))))
            proof.append(max_abs(proj @ (r - rhs)))
            primed.append(max_abs(proj @ primed_res))
        else:
            primed.append(max_abs(primed_res))
    kern = []
    theta = theta_sampler(data, choose_bound(data, min(kernel_points), 1e-15))
    for x in kernel_points:
        psi = theta(x) - z
        for s in samples:
            g = g_kernel(rep, psi, s, x) - ph * (rep.rho_s @ g_kernel(rep, psi, k - s, x))
            g = g - x ** s * ((cop - np.eye(data.l)) @ z)
            kern.append(max_abs(proj @ g) if proj is not None else max_abs(g))
    away = proj is not None and max_abs(proj @ z) < 1e-14
    return FEReport(str(data.spec), data.k, samples, inv.dimension, away,
                    tuple(hat) if proj is not None else None,
                    tuple(proof) if proj is not None else None,
                    tuple(raw), tuple(rvo), tuple(obs), tuple(corr), tuple(primed), tuple(pt),
                    tuple(kern), err)


# ---------------------------------------------------------------------------
# C-invariant zeta vectors


@dataclass(frozen=True)
class InvariantZeta:
    mask: np.ndarray
    pattern: str
    c_residual: float


def c_invariant_zeta(data: DiscriminantData, rep: WeilRep, s=None) -> list[InvariantZeta]:
    """Sign-masked zeta combinations fixed by e(-k) rho_c, checked at a sample point."""
    from adez.theta import invariant_combination

    found = invariant_combination(c_invariant_subspace(rep), "zeta")
    if found is None:
        return []
    mask, pattern = found
    s = complex(float(data.k) + 1.5, 0.5) if s is None else complex(s)
    v = mask * zeta_continued(data, rep, s).zeta
    res = max_abs(c_operator(rep) @ v - v)
    return [InvariantZeta(mask, pattern, res)]


__all__ = [
    "FEReport", "MellinCheck", "ResidueCheck", "ResiduePoleError", "ToleranceError",
    "XiEvaluation", "ZetaDomainError", "ZetaEvaluation", "c_invariant_zeta", "gamma_pi",
    "mellin_consistency", "mellin_transform", "residue_limit", "verify_functional_equation",
    "xi_continued", "zeta_continued", "zeta_direct",
]
