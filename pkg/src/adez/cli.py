"""``adez`` command line: describe, eval, verify, scan."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from adez import __version__, report
from adez.lattice import DEFAULT_SPECS, EnumerationLimitError, discriminant_data, parse_spec
from adez.numerics import PoleError
from adez.theta import ThetaDomainError, theta_vector
from adez.weil import build_weil
from adez.zeta import (
    POLE_RADIUS,
    ToleranceError,
    ZetaDomainError,
    xi_continued,
    zeta_continued,
    zeta_direct,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SCAN_SHIFT = 1e-5


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    tolerance: float = report.DEFAULT_TOL
    bound: str | None = None
    points: list = field(default_factory=list)
    format: str = "json"
    out: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = report.TOL_RANGE
        if not lo <= self.tolerance <= hi:
            raise UsageError(f"tolerance must lie in [{lo:g}, {hi:g}], got {self.tolerance:g}")
        if self.format not in ("json", "csv"):
            raise UsageError("format must be json or csv")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["points"] = [report.fmt_complex(p) for p in self.points]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["points"] = [complex(p["re"], p["im"]) for p in d.get("points", [])]
        return cls(**d)


def parse_point(text: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"point must be RE or RE,IM, got {text!r}") from None
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise UsageError(f"point must be RE or RE,IM, got {text!r}")


def emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([report.fmt_float(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_describe(cfg: RunConfig) -> int:
    doc = report.describe(parse_spec(cfg.spec))
    if cfg.format == "csv":
        rows = [(key, json.dumps(val, sort_keys=True)) for key, val in sorted(doc.items())]
        emit(rows_csv(["field", "value"], rows), cfg)
    else:
        emit(report.payload_json(doc), cfg)
    return EXIT_OK


def _vector_rows(label: str, s: complex, values, err: float):
    return [(label, float(s.real), float(s.imag), a, float(complex(v).real), float(complex(v).imag), float(err))
            for a, v in enumerate(values)]


def cmd_eval(cfg: RunConfig) -> int:
    spec = parse_spec(cfg.spec)
    data = discriminant_data(spec)
    rep = build_weil(data)
    what = cfg.options["what"]
    method = cfg.options.get("method", "auto")
    point = cfg.points[0]
    bound = cfg.bound
    doc = {"report_schema": report.REPORT_SCHEMA, "artifact_version": __version__,
           "command": "eval", "spec": str(spec), "what": what, "point": report.fmt_complex(point)}
    rows = []
    if what == "theta":
        plane = cfg.options.get("plane", "xi")
        th = theta_vector(data, point, plane=plane, bound=bound)
        doc.update(plane=plane, values=report.fmt_vector(th.values),
                   truncation_bound=report.fmt_rational(th.truncation_bound), abs_error=float(th.tail_bound))
        rows = _vector_rows("theta", point, th.values, th.tail_bound)
    elif what == "xi":
        ev = xi_continued(data, rep, point, bound=bound)
        doc.update(xi=report.fmt_vector(ev.xi), xi_prime=report.fmt_vector(ev.xi_prime),
                   e_term=report.fmt_vector(ev.e_term), xi_hat=report.fmt_vector(ev.xi_hat),
                   abs_error=float(ev.abs_error), truncation_bound=report.fmt_rational(ev.bound))
        rows = _vector_rows("xi", point, ev.xi, ev.abs_error) + _vector_rows("xi_hat", point, ev.xi_hat, ev.abs_error)
    elif what == "zeta":
        k = float(data.k)
        results = {}
        if method in ("direct", "auto") and (method == "direct" or point.real > k + 0.5):
            results["direct"] = zeta_direct(data, point, bound=bound)
        if method in ("continued", "auto"):
            results["continued"] = zeta_continued(data, rep, point, bound=bound)
        for name, ev in results.items():
            doc[name] = {"zeta": report.fmt_vector(ev.zeta), "abs_error": float(ev.abs_error),
                         "truncation_bound": report.fmt_rational(ev.bound)}
            rows += _vector_rows(f"zeta_{name}", point, ev.zeta, ev.abs_error)
        if len(results) == 2:
            d, c = results["direct"], results["continued"]
            diff = float(np.max(np.abs(d.zeta - c.zeta)))
            both = float(d.abs_error + c.abs_error)
            doc["cross_check"] = {"max_difference": diff, "combined_error_bound": both,
                                  "consistent": bool(diff <= both)}
    else:
        raise UsageError(f"unknown quantity {what!r}")
    if cfg.format == "csv":
        emit(rows_csv(["quantity", "re_s", "im_s", "component", "re", "im", "abs_error"], rows), cfg)
    else:
        emit(report.payload_json(doc), cfg)
    return EXIT_OK


def verify_payload(cfg: RunConfig) -> tuple[report.VerificationReport, float]:
    if cfg.spec == "all":
        specs = list(DEFAULT_SPECS)
    else:
        specs = [parse_spec(cfg.spec)]
    suite = cfg.options.get("suite", "all")
    suites = list(report.SUITES) if suite == "all" else [suite]
    t0 = time.perf_counter()
    checks = []
    for spec in specs:
        checks.extend(report.run_checks(spec, suites, cfg.tolerance))
    rep = report.VerificationReport([str(s) for s in specs], suites, cfg.tolerance, checks)
    return rep, time.perf_counter() - t0


def cmd_verify(cfg: RunConfig) -> int:
    rep, wall = verify_payload(cfg)
    if cfg.format == "csv":
        emit(report.checks_csv(rep.checks), cfg)
    else:
        emit(report.envelope(rep.payload(), wall), cfg)
    return rep.exit_code


def cmd_scan(cfg: RunConfig) -> int:
    spec = parse_spec(cfg.spec)
    data = discriminant_data(spec)
    rep = build_weil(data)
    o = cfg.options
    steps = o["steps"]
    if steps < 2:
        raise UsageError("scan needs at least 2 steps")
    k = float(data.k)
    ts = np.linspace(o["t_min"], o["t_max"], steps)
    rows = []
    for t in ts:
        s = complex(o["re"], float(t))
        warn = ""
        for pole in (0.0, k):
            if abs(s - pole) < POLE_RADIUS:
                s = complex(s.real, s.imag + SCAN_SHIFT)
                warn = f"shifted by {SCAN_SHIFT:g}i to avoid the pole at s = {pole:g}"
        ev = xi_continued(data, rep, s, bound=cfg.bound)
        row = [float(t)]
        for v in ev.xi_hat:
            row += [float(v.real), float(v.imag), float(ev.abs_error)]
        rows.append(row + [warn])
    header = ["t"]
    for a in range(data.l):
        header += [f"re_xi_hat_{a}", f"im_xi_hat_{a}", f"abs_error_{a}"]
    header.append("warning")
    if cfg.format == "json":
        doc = {"report_schema": report.REPORT_SCHEMA, "artifact_version": __version__,
               "command": "scan", "spec": str(spec), "k": report.fmt_rational(data.k), "re": o["re"],
               "columns": header, "rows": rows}
        emit(report.payload_json(doc), cfg)
    else:
        head = f"# adez scan spec={spec} k={report.fmt_rational(data.k)} re={report.fmt_float(o['re'])}\n"
        emit(head + rows_csv(header, rows), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json; csv for scan)")
    common.add_argument("--out", metavar="PATH")

    p = argparse.ArgumentParser(prog="adez", description="Theta and Epstein zeta vectors of ADE root lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("describe", parents=[common], help="lattice and discriminant data")
    d.add_argument("spec")

    e = sub.add_parser("eval", parents=[common], help="evaluate theta, zeta or Xi at a point")
    e.add_argument("spec")
    e.add_argument("--what", choices=("theta", "zeta", "xi"), required=True)
    e.add_argument("--point", required=True, help="RE,IM")
    e.add_argument("--method", choices=("direct", "continued", "auto"), default="auto")
    e.add_argument("--plane", choices=("xi", "tau"), default="xi", help="theta argument plane")
    e.add_argument("--bound", help="norm truncation bound (rational)")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("spec", help='lattice such as "E8", or "all"')
    v.add_argument("--suite", choices=(*report.SUITES, "all"), default="all")
    v.add_argument("--tol", type=float, default=report.DEFAULT_TOL)

    s = sub.add_parser("scan", parents=[common], help="shifted Xi vector along a vertical line")
    s.add_argument("spec")
    s.add_argument("--re", type=float, required=True)
    s.add_argument("--t-min", type=float, required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--bound", help="norm truncation bound (rational)")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {}
    points = []
    tol = report.DEFAULT_TOL
    if ns.command == "eval":
        opts = {"what": ns.what, "method": ns.method, "plane": ns.plane}
        points = [parse_point(ns.point)]
    elif ns.command == "verify":
        opts = {"suite": ns.suite}
        tol = ns.tol
    elif ns.command == "scan":
        opts = {"re": ns.re, "t_min": ns.t_min, "t_max": ns.t_max, "steps": ns.steps}
    fmt = ns.format or ("csv" if ns.command == "scan" else "json")
    return RunConfig(ns.command, ns.spec, tol, getattr(ns, "bound", None), points, fmt, ns.out, opts)


COMMANDS = {"describe": cmd_describe, "eval": cmd_eval, "verify": cmd_verify, "scan": cmd_scan}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except PoleError as exc:
        print(f"adez: pole error: {exc}", file=sys.stderr)
    except (UsageError, ValueError, ZetaDomainError, ThetaDomainError,
            ToleranceError, EnumerationLimitError) as exc:
        print(f"adez: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
