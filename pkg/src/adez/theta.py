"""Vector-valued theta series on the upper half-plane and the rotated right half-plane."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from adez.lattice import DiscriminantData, NormSpectrum, enumerate_norms, max_vectors
from adez.weil import InvariantSubspace, WeilRep, c_invariant_subspace, max_abs

MIN_DISTANCE = 1e-3
DEFAULT_TOL = 1e-12
S_SAMPLES = (1j, 2j, 0.5 + 1j, 0.5 + 1.5j)


class ThetaDomainError(ValueError):
    """Point too close to the boundary for the requested tolerance."""


@dataclass(frozen=True)
class ThetaEvaluation:
    point: complex
    plane: str  # "tau" (upper half-plane) or "xi" (right half-plane, tau = i xi)
    values: np.ndarray
    truncation_bound: Fraction
    tail_bound: float

    @property
    def psi(self) -> "ThetaEvaluation":
        v = self.values.copy()
        v[0] -= 1
        return ThetaEvaluation(self.point, self.plane, v, self.truncation_bound, self.tail_bound)


PsiEvaluation = ThetaEvaluation


def decay_rate(point: complex, plane: str) -> float:
    if plane == "tau":
        return complex(point).imag
    if plane == "xi":
        return complex(point).real
    raise ValueError("plane must be 'tau' or 'xi'")


def _upper_gamma_real(a: float, x: float) -> float:
    return float(special.gammaincc(a, x) * special.gamma(a))


def tail_bound(data: DiscriminantData, y: float, bound: float) -> float:
    """Bound on sum_{N > bound} c(N) exp(-pi y N), uniformly over cosets.

    Uses N(X) <= vol_r (sqrt X + mu)^r / sqrt(l) and summation by parts:
    tail <= pi y int_B^inf N(X) exp(-pi y X) dX.
    """
    r = data.rank
    mu = math.sqrt(data.covering_radius_sq_bound)
    vol = math.pi ** (r / 2) / math.gamma(r / 2 + 1)
    py = math.pi * y
    total = 0.0
    for j in range(r + 1):
        total += math.comb(r, j) * mu ** (r - j) * py ** (-j / 2) * _upper_gamma_real(j / 2 + 1, py * bound)
    return vol * total / math.sqrt(data.l)


def choose_bound(data: DiscriminantData, y: float, tol: float) -> Fraction:
    """Smallest integer norm bound whose tail estimate is below ``tol``."""
    if y < MIN_DISTANCE:
        raise ThetaDomainError(f"decay rate {y:g} is closer than {MIN_DISTANCE:g} to the boundary")
    b = 2
    r = data.rank
    vol = math.pi ** (r / 2) / math.gamma(r / 2 + 1)
    limit = max_vectors()
    while tail_bound(data, y, b) >= tol:
        b += 1
        if vol * b ** (r / 2) / math.sqrt(data.l) > limit:
            raise ThetaDomainError(
                f"tail below {tol:g} at decay rate {y:g} needs norm bound > {b}, "
                f"beyond the vector ceiling {limit}")
    return Fraction(b)


def _series(spec: NormSpectrum, point: complex, plane: str) -> complex:
    if not len(spec):
        return 0j
    n = spec.norm_array
    c = spec.count_array
    z = -math.pi * point if plane == "xi" else 1j * math.pi * point
    # largest terms last keeps the summation error small
    return complex(np.sum((c * np.exp(z * n))[::-1]))


def theta_vector(data: DiscriminantData, point, *, plane: str = "xi", bound=None,
                 tol: float = DEFAULT_TOL) -> ThetaEvaluation:
    """theta_a = sum over gamma in Q of exp(-pi xi R_a(gamma)) (or e(tau R_a(gamma)))."""
    point = complex(point)
    y = decay_rate(point, plane)
    if y < MIN_DISTANCE:
        raise ThetaDomainError(f"point {point} is within {MIN_DISTANCE:g} of the boundary")
    bound = choose_bound(data, y, tol) if bound is None else Fraction(bound)
    vals = np.zeros(data.l, dtype=complex)
    for a in range(data.l):
        vals[a] = _series(enumerate_norms(data, a, bound), point, plane)
    vals[0] += 1
    return ThetaEvaluation(point, plane, vals, bound, tail_bound(data, y, float(bound)))


def theta_sampler(data: DiscriminantData, bound):
    """Fast evaluator xi -> Theta(xi) on the right half-plane at a fixed norm bound."""
    specs = [enumerate_norms(data, a, bound) for a in range(data.l)]
    arrays = [(sp.norm_array[::-1], sp.count_array[::-1]) for sp in specs]

    def theta(xi) -> np.ndarray:
        out = np.array([np.sum(c * np.exp(-math.pi * xi * n)) for n, c in arrays], dtype=complex)
        out[0] += 1
        return out

    return theta


def psi_vector(data: DiscriminantData, point, **kw) -> ThetaEvaluation:
    """Theta vector with the constant e_0 removed."""
    return theta_vector(data, point, **kw).psi


def principal_power(base: complex, k) -> complex:
    return cmath.exp(float(k) * cmath.log(base))


@dataclass(frozen=True)
class TransformCheck:
    name: str
    samples: tuple[complex, ...]
    residuals: tuple[float, ...]
    tails: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def max_tail(self) -> float:
        return max(self.tails) if self.tails else 0.0


def verify_S_transform(data: DiscriminantData, rep: WeilRep, taus=S_SAMPLES,
                       tol: float = DEFAULT_TOL) -> TransformCheck:
    """Theta(-1/tau) = (-i tau)^k rho_s^{-1} Theta(tau), both sides evaluated independently."""
    inv = rep.rho_s.conj().T
    res, tails = [], []
    for tau in taus:
        lhs = theta_vector(data, -1 / tau, plane="tau", tol=tol)
        th = theta_vector(data, tau, plane="tau", tol=tol)
        rhs = principal_power(-1j * tau, data.k) * (inv @ th.values)
        res.append(max_abs(lhs.values - rhs))
        tails.append(max(lhs.tail_bound, th.tail_bound))
    return TransformCheck("theta_S", tuple(taus), tuple(res), tuple(tails))


def verify_T_transform(data: DiscriminantData, rep: WeilRep, taus=S_SAMPLES,
                       tol: float = DEFAULT_TOL) -> TransformCheck:
    """Theta(tau + 1) = rho_t^{-1} Theta(tau)."""
    inv = rep.rho_t.conj()
    res, tails = [], []
    for tau in taus:
        lhs = theta_vector(data, tau + 1, plane="tau", tol=tol)
        th = theta_vector(data, tau, plane="tau", tol=tol)
        res.append(max_abs(lhs.values - inv @ th.values))
        tails.append(max(lhs.tail_bound, th.tail_bound))
    return TransformCheck("theta_T", tuple(taus), tuple(res), tuple(tails))


def verify_S_rotated(data: DiscriminantData, rep: WeilRep, xis=(1.0, 0.7, 1.3 + 0.4j),
                     phase: complex = 1.0, tol: float = DEFAULT_TOL) -> TransformCheck:
    """Theta(1/xi) = phase * xi^k rho_s^{-1} Theta(xi) on the right half-plane.

    ``phase = 1`` is what the tau-plane law gives under tau = i xi; passing
    ``phase = e(k/2)`` tests the variant with the extra half-weight phase.
    """
    inv = rep.rho_s.conj().T
    res, tails = [], []
    for xi in xis:
        lhs = theta_vector(data, 1 / xi, tol=tol)
        th = theta_vector(data, xi, tol=tol)
        rhs = phase * principal_power(xi, data.k) * (inv @ th.values)
        res.append(max_abs(lhs.values - rhs))
        tails.append(max(lhs.tail_bound, th.tail_bound))
    return TransformCheck("theta_S_rotated", tuple(complex(x) for x in xis), tuple(res), tuple(tails))


def verify_S_squared(data: DiscriminantData, rep: WeilRep, taus=S_SAMPLES,
                     tol: float = DEFAULT_TOL) -> TransformCheck:
    """Compose the S law with itself: Theta(tau) = j(tau) rho_s^{-2} Theta(tau), j = 1 exactly.

    With rho_s^{-2} = rho_c this is the action of the centre on theta vectors.
    """
    inv2 = np.linalg.matrix_power(rep.rho_s.conj().T, 2)
    res, tails = [], []
    for tau in taus:
        th = theta_vector(data, tau, plane="tau", tol=tol)
        j = principal_power(-1j * (-1 / tau), data.k) * principal_power(-1j * tau, data.k)
        res.append(max_abs(th.values - j * (inv2 @ th.values)))
        tails.append(th.tail_bound)
    return TransformCheck("theta_SS", tuple(taus), tuple(res), tuple(tails))


def weil_action_S(rep: WeilRep, f):
    """(pi(S) F)(tau) = (-i tau)^{-k} rho_s F(-1/tau); theta vectors are fixed by it."""
    return lambda tau: principal_power(-1j * tau, -rep.k) * (rep.rho_s @ f(-1 / tau))


def weil_action_T(rep: WeilRep, f):
    return lambda tau: rep.rho_t @ f(tau + 1)


def cocycle_obstruction(data: DiscriminantData, rep: WeilRep, taus=S_SAMPLES,
                        tol: float = DEFAULT_TOL) -> dict[str, float]:
    """Max residual of Psi - pi(g) Psi - (pi(g) - Id) e_0 for g in {S, T}."""
    e0 = np.zeros(data.l, dtype=complex)
    e0[0] = 1

    def psi(tau):
        return theta_vector(data, tau, plane="tau", tol=tol).psi.values

    def const(tau):
        return e0

    out = {}
    for name, act in (("S", weil_action_S), ("T", weil_action_T)):
        g_psi, g_e0 = act(rep, psi), act(rep, const)
        worst = 0.0
        for tau in taus:
            c = g_e0(tau) - e0
            worst = max(worst, max_abs(psi(tau) - g_psi(tau) - c))
        out[name] = worst
    return out


@dataclass(frozen=True)
class InvariantTheta:
    """Sign mask picking the C-invariant combination out of the theta vector."""

    mask: np.ndarray
    pattern: str

    def values(self, theta: ThetaEvaluation) -> np.ndarray:
        return self.mask * theta.values


def invariant_combination(inv: InvariantSubspace, symbol: str) -> tuple[np.ndarray, str] | None:
    if inv.dimension == 0:
        return None
    mask = np.real(sum(inv.basis)).astype(float)
    entries = []
    first = {}
    for a, m in enumerate(mask):
        if m == 0:
            entries.append("0")
            continue
        # paired components carry the label of the smaller index
        label = first.setdefault(a, a)
        for v in inv.basis:
            nz = np.flatnonzero(np.abs(v) > 0)
            if a in nz:
                label = int(nz[0])
        entries.append(("-" if m < 0 else "") + f"{symbol}{label}")
    return mask, "(" + ",".join(entries) + ")"


def invariant_theta(data: DiscriminantData, rep: WeilRep) -> list[InvariantTheta]:
    found = invariant_combination(c_invariant_subspace(rep), "theta")
    if found is None:
        return []
    return [InvariantTheta(*found)]
