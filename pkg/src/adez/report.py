"""Verification checks, report assembly and serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from adez import __version__
from adez.lattice import (
    DEFAULT_SPECS,
    DiscriminantData,
    LatticeSpec,
    determinant,
    discriminant_data,
    enumerate_norms,
    rational_inverse,
)
from adez.theta import (
    cocycle_obstruction,
    invariant_theta,
    theta_vector,
    verify_S_squared,
    verify_S_transform,
    verify_T_transform,
)
from adez.weil import WeilRep, build_weil, c_invariant_subspace, e, fmt_unit, max_abs, verify_center, verify_mp2_relations
from adez.zeta import (
    c_invariant_zeta,
    gamma_pi,
    mellin_consistency,
    residue_limit,
    verify_functional_equation,
    xi_continued,
    zeta_direct,
)

REPORT_SCHEMA = 1
SUITES = ("lattice", "weil", "theta", "fe")
STATUSES = ("pass", "fail", "expected-obstruction")
DEFAULT_TOL = 1e-8
TOL_RANGE = (1e-12, 1e-2)
RESIDUE_TOL = 1e-6  # accuracy of the extrapolated pole limits


# ---------------------------------------------------------------------------
# serialization helpers


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_complex(z) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def fmt_vector(v) -> list[dict]:
    return [fmt_complex(z) for z in np.asarray(v)]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# checks


@dataclass(frozen=True)
class Check:
    spec: str
    name: str
    tag: str
    residual: float
    tolerance: float
    status: str
    notes: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def decide(residual: float, tolerance: float, expected_obstruction: bool = False) -> str:
    if residual <= tolerance:
        return "pass"
    return "expected-obstruction" if expected_obstruction else "fail"


def make_check(spec, name, tag, residual, tolerance, expected=False, notes="") -> Check:
    residual = float(residual)
    return Check(str(spec), name, tag, residual, float(tolerance),
                 decide(residual, tolerance, expected), notes)


def discriminant_order(spec: LatticeSpec) -> int:
    """Order of the weight lattice modulo the root lattice."""
    if spec.family == "A":
        return spec.rank + 1
    if spec.family == "D":
        return 4
    return {6: 3, 7: 2, 8: 1}[spec.rank]


def root_count(spec: LatticeSpec) -> int:
    n = spec.rank
    if spec.family == "A":
        return n * (n + 1)
    if spec.family == "D":
        return 2 * n * (n - 1)
    return {6: 72, 7: 126, 8: 240}[n]


def lattice_checks(data: DiscriminantData, tol: float) -> list[Check]:
    spec = data.spec
    out = []
    det = determinant(data.gram)
    out.append(make_check(spec, "cartan_determinant", "discriminant-order",
                          abs(det - discriminant_order(spec)), 0.0,
                          notes=f"det = {det}, l = {data.l}"))
    inv = rational_inverse(data.gram)
    dev = max(abs(inv[i][j] - data.weight_gram[i][j])
              for i in range(data.rank) for j in range(data.rank))
    out.append(make_check(spec, "weight_gram_inverse", "weight-gram", float(dev), 0.0))
    roots = dict(enumerate_norms(data, 0, 2)).get(Fraction(2), 0)
    out.append(make_check(spec, "root_count", "root-count", abs(roots - root_count(spec)), 0.0,
                          notes=f"{roots} vectors of norm 2"))
    return out


def weil_checks(rep: WeilRep, tol: float) -> list[Check]:
    spec = rep.data.spec
    m = verify_mp2_relations(rep)
    c = verify_center(rep)
    inv = c_invariant_subspace(rep)
    zeta = f"zeta = {fmt_unit(complex(np.round(m.zeta, 12)))}"
    out = [
        make_check(spec, "rho_s_squared_equals_rho_c", "weil-relations", m.s_squared_minus_c, tol),
        make_check(spec, "rho_c_involution", "weil-relations", m.c_squared_minus_id, tol),
        make_check(spec, "rho_s_unitary", "weil-relations", m.unitarity, tol),
        make_check(spec, "st_cubed_proportional_to_rho_c", "weil-relations", m.st_cubed_residual, tol,
                   notes=zeta),
        make_check(spec, "st_cubed_scalar_unimodular", "weil-relations", abs(abs(m.zeta) - 1), tol),
        make_check(spec, "operator_probe_scalar", "weil-operators", m.operator_vs_matrix, tol,
                   notes=f"operator relation residual {m.operator_residual:.3g}"),
        make_check(spec, "rho_c_center_permutation", "weil-center", c.deviation, tol,
                   notes="permutation" if c.is_permutation else "not a permutation"),
    ]
    expected = spec.family == "D" and spec.rank % 4 == 2
    note = f"computed {inv.dimension}, pattern {inv.pattern}"
    if not inv.agrees_with_reference:
        note = (f"classification mismatch: computed dimension {inv.dimension}, "
                f"reference classification claims {inv.reference_dimension}")
    out.append(make_check(spec, "c_invariant_classification", "c-invariance",
                          abs(inv.dimension - inv.reference_dimension), 0.0, expected, note))
    return out


def theta_checks(rep: WeilRep, tol: float) -> list[Check]:
    data = rep.data
    spec = data.spec
    out = []
    for name, fn in (("theta_S_law", verify_S_transform), ("theta_T_law", verify_T_transform),
                     ("theta_SS_composition", verify_S_squared)):
        r = fn(data, rep)
        out.append(make_check(spec, name, name.replace("_", "-").lower(), r.max_residual, tol,
                              notes=f"max tail bound {r.max_tail:.3g}"))
    co = cocycle_obstruction(data, rep)
    out.append(make_check(spec, "psi_cocycle", "theta-cocycle", max(co.values()), tol,
                          notes=f"S {co['S']:.3g}, T {co['T']:.3g}"))
    combos = invariant_theta(data, rep)
    if combos:
        th = theta_vector(data, 1.0)
        v = combos[0].values(th)
        res = max_abs(e(data.k) * (rep.rho_c.conj().T @ v) - v)
        out.append(make_check(spec, "theta_c_invariant_combination", "theta-c-invariance", res, tol,
                              notes=combos[0].pattern))
    else:
        out.append(make_check(spec, "theta_c_invariant_combination", "theta-c-invariance", 0.0, tol,
                              notes="no invariant combination"))
    return out


def fe_checks(rep: WeilRep, tol: float) -> list[Check]:
    data = rep.data
    spec = data.spec
    k = float(data.k)
    out = []
    rtol = max(tol, RESIDUE_TOL)
    r0 = residue_limit(data, rep, 0)
    rk = residue_limit(data, rep, data.k)
    out.append(make_check(spec, "residue_at_0", "pole-structure", r0.deviation, rtol,
                          notes="limit of s Xi(s) against -e0"))
    out.append(make_check(spec, "residue_at_k", "pole-structure", rk.deviation, rtol,
                          notes="limit of (s-k) Xi(s) against e(-k/2) rho_s e0"))
    out.append(make_check(spec, "residue_at_k_theta_law", "pole-structure-corrected", rk.true_deviation, rtol,
                          notes="limit of (s-k) Xi(s) against rho_s e0"))
    m = mellin_consistency(data, rep)
    out.append(make_check(spec, "mellin_consistency", "mellin", m.max_residual, tol,
                          notes=f"max quadrature error {max(m.quad_errors):.3g}"))
    s = complex(k + 1.5, 0.5)
    x = xi_continued(data, rep, s)
    z = zeta_direct(data, s)
    g = gamma_pi(s)
    diff = max_abs(x.xi - g * z.zeta)
    bound = x.abs_error + abs(g) * z.abs_error
    out.append(make_check(spec, "continuation_vs_direct", "method-agreement", diff, bound,
                          notes=f"difference within combined error bound {bound:.3g}"))
    fe = verify_functional_equation(data, rep)
    trivial = fe.invariant_dimension == 0
    if trivial:
        out.append(make_check(spec, "fe_raw_obstruction", "fe-raw", min(fe.raw_norm), tol, True,
                              notes="obstruction vector at s = "
                                    f"{fe.samples[0]:.6g}: {json.dumps(fmt_vector(fe.obstruction[0]))}"))
    else:
        note = "e0 term projected away" if fe.e0_projected_away else ""
        out.append(make_check(spec, "fe_invariant_projection", "fe-invariant-projection",
                              max(fe.hat_projected), tol, notes=note))
        out.append(make_check(spec, "fe_proof_form_projected", "fe-proof-form", max(fe.proof_form_projected), tol))
    out.append(make_check(spec, "fe_obstruction_matches_c_term", "fe-obstruction",
                          max(fe.raw_vs_obstruction), tol, expected=not trivial,
                          notes="raw residual against (e(-k) rho_c - Id) e0 / s"))
    out.append(make_check(spec, "fe_theta_law", "fe-corrected", max(fe.corrected), tol,
                          notes="Xi(s) - rho_s Xi(k - s)"))
    out.append(make_check(spec, "fe_primed_part", "fe-primed", max(fe.primed_projected), tol, trivial))
    out.append(make_check(spec, "pole_term_identity", "pole-term", max(fe.pole_term), tol))
    out.append(make_check(spec, "kernel_identity", "kernel", max(fe.kernel), tol, trivial))
    inv = c_invariant_zeta(data, rep)
    if inv:
        out.append(make_check(spec, "zeta_c_invariant_combination", "zeta-c-invariance",
                              inv[0].c_residual, tol, notes=inv[0].pattern))
    return out


SUITE_FUNCS = {"lattice": lambda rep, tol: lattice_checks(rep.data, tol),
               "weil": weil_checks, "theta": theta_checks, "fe": fe_checks}


def run_checks(spec: LatticeSpec, suites, tol: float) -> list[Check]:
    rep = build_weil(discriminant_data(spec))
    checks = []
    for s in suites:
        checks.extend(SUITE_FUNCS[s](rep, tol))
    return sorted(checks, key=lambda c: c.name)


# ---------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    specs: list[str]
    suites: list[str]
    tolerance: float
    checks: list[Check]
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        return {s: sum(c.status == s for c in self.checks) for s in STATUSES}

    @property
    def exit_code(self) -> int:
        return 1 if any(c.status == "fail" for c in self.checks) else 0

    def payload(self) -> dict:
        return {
            "report_schema": REPORT_SCHEMA,
            "artifact_version": __version__,
            "command": "verify",
            "specs": self.specs,
            "suites": self.suites,
            "tolerance": self.tolerance,
            "checks": [c.as_dict() for c in self.checks],
            "summary": self.summary,
        }


def payload_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True)


def envelope(payload: dict, wall_time: float) -> str:
    """JSON document: the deterministic payload plus a metadata block kept out of its checksum."""
    body = payload_json(payload)
    meta = {"payload_sha256": hashlib.sha256(body.encode()).hexdigest(),
            "wall_time_s": round(wall_time, 3)}
    return json.dumps({"payload": payload, "meta": meta}, sort_keys=True, indent=2)


def checks_csv(checks: list[Check]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["spec", "name", "tag", "residual", "tolerance", "status", "notes"])
    for c in checks:
        w.writerow([c.spec, c.name, c.tag, fmt_float(c.residual), fmt_float(c.tolerance), c.status, c.notes])
    return buf.getvalue()


def describe(spec: LatticeSpec) -> dict:
    data = discriminant_data(spec)
    rep = build_weil(data)
    inv = c_invariant_subspace(rep)
    doc = {
        "report_schema": REPORT_SCHEMA,
        "artifact_version": __version__,
        "command": "describe",
        "spec": str(spec),
        "rank": spec.rank,
        "k": fmt_rational(data.k),
        "l": data.l,
        "group_type": data.group_tag,
        "gram": [[int(x) for x in row] for row in data.gram],
        "weight_gram": [[fmt_rational(x) for x in row] for row in data.weight_gram],
        "cosets": [[fmt_rational(x) for x in c] for c in data.cosets],
        "coset_labels": list(data.labels),
        "coset_norms": [fmt_rational(data.coset_norm(a)) for a in range(data.l)],
        "invariant_dimension": inv.dimension,
        "invariant_pattern": inv.pattern,
        "invariant_eigenvalue": fmt_complex(inv.eigenvalue),
        "classification_agrees": inv.agrees_with_reference,
    }
    if not inv.agrees_with_reference:
        doc["classification_note"] = (f"reference classification claims dimension {inv.reference_dimension}")
    return doc


def default_spec_set() -> list[LatticeSpec]:
    return list(DEFAULT_SPECS)
