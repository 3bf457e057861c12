"""Weil matrices for the generators S, T, C and the C-invariant subspace."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from adez.lattice import DiscriminantData, LatticeSpec, discriminant_data

_QUARTER = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}


def e(q) -> complex:
    """``exp(i pi q)``; exact for multiples of 1/2, double precision otherwise."""
    q = Fraction(q) % 2
    if (2 * q).denominator == 1:
        return _QUARTER[int(2 * q)]
    return cmath.exp(1j * math.pi * float(q))


@dataclass(frozen=True, eq=False)
class WeilRep:
    data: DiscriminantData
    phi: np.ndarray
    rho_s: np.ndarray
    rho_t: np.ndarray
    rho_c: np.ndarray

    @property
    def l(self) -> int:
        return self.data.l

    @property
    def k(self) -> Fraction:
        return self.data.k

    @property
    def c_eigenvalue(self) -> complex:
        return e(self.k)

    @property
    def s_phase(self) -> complex:
        """The scalar ``e(-k/2)`` multiplying ``rho_s`` in the Mellin-side S action."""
        return e(-self.k / 2)

    def permutation(self) -> list[int]:
        """``rho_c`` as an index map: ``rho_c[a, perm[a]] == 1``."""
        return [int(np.argmax(np.abs(row))) for row in self.rho_c]


def build_weil(data: DiscriminantData) -> WeilRep:
    l = data.l
    gram_w = [[data.coset_inner(a, b) for b in range(l)] for a in range(l)]
    # Phi_ab = e(+2(w_a, w_b)): with rho_t = e(-(w_a, w_a)) this sign makes
    # (rho_s rho_t)^3 proportional to rho_c; the opposite sign does not for l > 2
    phi = np.array([[e(2 * gram_w[a][b]) for b in range(l)] for a in range(l)], dtype=complex)
    rho_s = phi / math.sqrt(l)
    rho_t = np.diag([e(-gram_w[a][a]) for a in range(l)]).astype(complex)
    rho_c = rho_s @ rho_s
    # entries of Phi^2 / l are sums of roots of unity; snap the rounding noise
    rho_c = np.where(np.abs(rho_c) < 1e-12, 0, rho_c)
    return WeilRep(data, phi, rho_s, rho_t, rho_c)


def weil_for(spec: LatticeSpec) -> WeilRep:
    return build_weil(discriminant_data(spec))


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class CenterCheck:
    deviation: float
    cyclic_deviation: float | None
    is_permutation: bool


def center_matrix_exact(data: DiscriminantData) -> np.ndarray:
    """``(a, b) -> 1`` iff ``w_a + w_b`` lies in the root lattice."""
    l = data.l
    out = np.zeros((l, l))
    for a in range(l):
        for b in range(l):
            s = [x + y for x, y in zip(data.cosets[a], data.cosets[b])]
            out[a, b] = 1.0 if data.in_root_lattice(s) else 0.0
    return out


def verify_center(rep: WeilRep) -> CenterCheck:
    l = rep.l
    dev = max_abs(rep.rho_c - center_matrix_exact(rep.data))
    cyc = None
    if rep.data.group_type == "cyclic":
        inv = np.array([[1.0 if (a + b) % l == 0 else 0.0 for b in range(l)] for a in range(l)])
        cyc = max_abs(rep.rho_c - inv)
    r = np.round(rep.rho_c.real)
    perm = (max_abs(rep.rho_c - r) < 1e-12 and np.all((r == 0) | (r == 1))
            and np.all(r.sum(0) == 1) and np.all(r.sum(1) == 1))
    return CenterCheck(dev, cyc, bool(perm))


# ---------------------------------------------------------------------------
# Mp(2,Z) relations

PROBE_TAUS = (1j, 2j, 0.5 + 1j)


def pi_s(rep: WeilRep, f):
    k = float(rep.k)
    return lambda tau: tau ** (-k) * (rep.rho_s @ f(-1 / tau))


def pi_t(rep: WeilRep, f):
    return lambda tau: rep.rho_t @ f(tau + 1)


def pi_c(rep: WeilRep, f):
    ph = e(-rep.k)
    return lambda tau: ph * (rep.rho_c @ f(tau))


def probe_function(l: int):
    """Polynomial probe vector ``F_a(tau) = (a + 1) + tau^(a + 1)``."""
    powers = np.arange(1, l + 1)
    return lambda tau: (powers + np.power(complex(tau), powers)).astype(complex)


@dataclass(frozen=True)
class Mp2Check:
    s_squared_minus_c: float
    c_squared_minus_id: float
    unitarity: float
    zeta: complex
    st_cubed_residual: float
    operator_zeta: tuple[complex, ...]
    operator_residual: float
    operator_vs_matrix: float


def verify_mp2_relations(rep: WeilRep, taus=PROBE_TAUS) -> Mp2Check:
    l = rep.l
    eye = np.eye(l)
    st3 = np.linalg.matrix_power(rep.rho_s @ rep.rho_t, 3)
    # (rho_s rho_t)^3 = zeta rho_c; rho_c is a permutation so zeta = <rho_c, st3> / l
    zeta = complex(np.vdot(rep.rho_c, st3) / l)
    f = probe_function(l)
    g = f
    for _ in range(3):
        g = pi_s(rep, pi_t(rep, g))
    c = pi_c(rep, f)
    zs, res = [], 0.0
    for tau in taus:
        lhs, rhs = g(tau), c(tau)
        z = complex(np.vdot(rhs, lhs) / np.vdot(rhs, rhs))
        zs.append(z)
        res = max(res, max_abs(lhs - z * rhs) / max(1.0, max_abs(lhs)))
    return Mp2Check(
        s_squared_minus_c=max_abs(rep.rho_s @ rep.rho_s - rep.rho_c),
        c_squared_minus_id=max_abs(rep.rho_c @ rep.rho_c - eye),
        unitarity=max_abs(rep.rho_s @ rep.rho_s.conj().T - eye),
        zeta=zeta,
        st_cubed_residual=max_abs(st3 - zeta * rep.rho_c),
        operator_zeta=tuple(zs),
        operator_residual=res,
        operator_vs_matrix=max(abs(z - zeta) for z in zs),
    )


# ---------------------------------------------------------------------------
# C-invariant subspace


@dataclass(frozen=True)
class InvariantSubspace:
    dimension: int
    basis: tuple[np.ndarray, ...]
    eigenvalue: complex
    pattern: str
    reference_dimension: int
    agrees_with_reference: bool

    def projector(self) -> np.ndarray:
        l = len(self.basis[0]) if self.basis else 0
        p = np.zeros((l, l), dtype=complex)
        for v in self.basis:
            p += np.outer(v, v.conj()) / np.vdot(v, v)
        return p


def reference_invariant_dimension(spec: LatticeSpec) -> int:
    """Invariant dimension from the reference classification table (lists 4 for every D_{2m})."""
    n = spec.rank
    if spec.family == "A":
        if n % 2:
            return 0
        return n // 2 + 1 if n % 4 == 0 else n // 2
    if spec.family == "D":
        return 0 if n % 2 else 4
    return {6: 1, 7: 0, 8: 1}[n]


def c_invariant_subspace(rep: WeilRep) -> InvariantSubspace:
    """Eigenspace of the permutation ``rho_c`` for eigenvalue ``e(k)``.

    Built from the cycle structure (fixed points and transpositions), so the
    basis vectors are exact 0/+-1 vectors.
    """
    l = rep.l
    lam = rep.c_eigenvalue
    perm = rep.permutation()
    basis: list[np.ndarray] = []
    symbols = ["0"] * l
    if lam in (1, -1):
        sign = 1 if lam == 1 else -1
        for a in range(l):
            b = perm[a]
            if b < a:
                continue
            v = np.zeros(l, dtype=complex)
            if a == b:
                if sign == 1:
                    v[a] = 1
                    symbols[a] = f"x{a}"
                    basis.append(v)
                continue
            v[a], v[b] = 1, sign
            symbols[a] = f"x{a}"
            symbols[b] = f"x{a}" if sign == 1 else f"-x{a}"
            basis.append(v)
    ref = reference_invariant_dimension(rep.data.spec)
    pattern = "(" + ",".join(symbols) + ")"
    return InvariantSubspace(len(basis), tuple(basis), lam, pattern, ref, ref == len(basis))


@dataclass(frozen=True)
class ClassificationRow:
    spec: LatticeSpec
    k: Fraction
    eigenvalue: complex
    computed: int
    reference: int
    pattern: str

    @property
    def agrees(self) -> bool:
        return self.computed == self.reference

    @property
    def note(self) -> str:
        if self.agrees:
            return ""
        return (f"mismatch: computed dimension {self.computed}, reference classification lists {self.reference} "
                f"(rho_c has eigenvalues +-1 only, e(k) = {fmt_unit(self.eigenvalue)})")


def fmt_unit(z: complex) -> str:
    return {1: "1", -1: "-1", 1j: "i", -1j: "-i"}.get(z, f"{z:.6g}")


def all_specs(max_rank: int) -> list[LatticeSpec]:
    out = [LatticeSpec("A", n) for n in range(1, max_rank + 1)]
    out += [LatticeSpec("D", n) for n in range(3, max_rank + 1)]
    out += [LatticeSpec("E", n) for n in (6, 7, 8) if n <= max_rank]
    return out


def classify_all(max_rank: int) -> list[ClassificationRow]:
    if max_rank < 1:
        raise ValueError("max_rank must be >= 1")
    rows = []
    for spec in all_specs(max_rank):
        inv = c_invariant_subspace(weil_for(spec))
        rows.append(ClassificationRow(spec, spec.k, inv.eigenvalue, inv.dimension,
                                      inv.reference_dimension, inv.pattern))
    return rows
