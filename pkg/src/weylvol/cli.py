"""Command-line entry point: ``weylvol {roots,volume,verify} ...``.

Exit codes: 0 success, 1 a verification tolerance was missed, 2 usage or
input error. Data goes to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ._exact import to_str
from .heattrace import DEFAULT_MAX_TERMS, ScopeError, TruncationError
from .rootsys import RootSystemError, build_root_system, load_cartan_file, parse_group
from .verify import (
    default_t_grid,
    em_regression_suite,
    integration_formula_check,
    log_grid,
    weyl_law_check,
)
from .volume import volume_report

INTEGRATION_TOL = 1e-10
INTEGRATION_TS = (0.3, 1.0, 3.0)
WEYL_LAW_MAX_REL_ERROR = 1e-2


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    group: str | None
    scale: list
    t_start: float | None
    t_stop: float | None
    t_points: int
    rel_tol: float
    fmt: str
    out: str | None
    cartan_file: str | None
    max_terms: int

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        try:
            scale = [Fraction(s.strip()) for s in args.scale.split(",")] if args.scale else []
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --scale: {exc}") from exc
        cfg = cls(
            group=args.group,
            scale=scale,
            t_start=args.t_start,
            t_stop=args.t_stop,
            t_points=args.t_points,
            rel_tol=args.rel_tol,
            fmt=args.format,
            out=args.out,
            cartan_file=args.cartan_file,
            max_terms=args.max_terms,
        )
        if not 0 < cfg.rel_tol <= 1e-3:
            raise UsageError("--rel-tol must lie in (0, 1e-3]")
        if cfg.t_points < 2:
            raise UsageError("--t-points must be >= 2")
        if cfg.t_start is not None and cfg.t_stop is not None and not cfg.t_start > cfg.t_stop > 0:
            raise UsageError("need --t-start > --t-stop > 0")
        if cfg.max_terms < 1:
            raise UsageError("--max-terms must be positive")
        return cfg

    def root_system(self):
        if self.group is None and self.cartan_file is None:
            raise UsageError("one of --group or --cartan-file is required")
        if self.cartan_file:
            spec = load_cartan_file(self.cartan_file)
            if self.scale:
                spec = type(spec)(spec.factors, tuple(self.scale), spec.cartan)
            return build_root_system(spec)
        return build_root_system(parse_group(self.group, self.scale))

    def t_grid(self, rs):
        if self.t_start is None and self.t_stop is None:
            return default_t_grid(rs, self.t_points)
        default = default_t_grid(rs)
        start = self.t_start if self.t_start is not None else default[0]
        stop = self.t_stop if self.t_stop is not None else default[-1]
        if not start > stop > 0:
            raise UsageError("need t-start > t-stop > 0")
        return log_grid(start, stop, self.t_points)


def _emit(cfg: CliConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _kv_csv(doc: dict) -> str:
    lines = ["key,value"]
    for k, v in doc.items():
        lines.append(f"{k},{json.dumps(v) if isinstance(v, (list, dict)) else v}")
    return "\n".join(lines)


def _fmt_value(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def _render(cfg: CliConfig, doc: dict, csv_text: str | None = None) -> str:
    if cfg.fmt == "json":
        return json.dumps(doc, indent=2)
    if cfg.fmt == "csv":
        return csv_text if csv_text is not None else _kv_csv(doc)
    rows = [
        (k, _fmt_value(v))
        for k, v in doc.items()
        if not isinstance(v, dict) and not (isinstance(v, list) and v and isinstance(v[0], dict))
    ]
    return _table(rows)


def roots_document(rs) -> dict:
    return {
        "group": rs.label,
        "r": rs.r,
        "m": rs.m,
        "n": rs.n,
        "cartan": [list(row) for row in rs.cartan],
        "positive_roots": [list(a) for a in rs.positive_roots],
        "rho": list(rs.rho),
        "gram_weights": [[to_str(v) for v in row] for row in rs.gram_weights],
        "weyl_order": rs.weyl_order,
        "rho_pairings": [to_str(v) for v in rs.rho_pairings],
    }


def cmd_roots(cfg: CliConfig) -> int:
    rs = cfg.root_system()
    _emit(cfg, _render(cfg, roots_document(rs)))
    return 0


def cmd_volume(cfg: CliConfig) -> int:
    rs = cfg.root_system()
    _emit(cfg, _render(cfg, volume_report(rs).to_dict()))
    return 0


def _weyl_law_section(cfg, rs):
    try:
        report = weyl_law_check(rs, cfg.t_grid(rs), cfg.rel_tol, max_terms=cfg.max_terms)
    except ScopeError as exc:
        _note(f"formula-only: {exc}")
        return {"skipped": f"formula-only: {exc}"}, True, None
    except TruncationError as exc:
        _note(f"truncation failure: {exc} (partial z={exc.partial.z!r})")
        return {"error": str(exc), "partial": exc.partial.to_dict()}, False, None
    ok = report.passed(WEYL_LAW_MAX_REL_ERROR)
    if not ok:
        _note(f"weyl-law: rel_error={report.rel_error!r} slope={report.fit_slope_loglog!r} outside tolerance")
    return report.to_dict(), ok, report


def _integration_section(rs):
    gaps = [integration_formula_check(rs, t) for t in INTEGRATION_TS]
    ok = all(g < INTEGRATION_TOL for g in gaps)
    if not ok:
        _note(f"integration-formula: discrepancy {max(gaps)!r} >= {INTEGRATION_TOL}")
    return {"t": list(INTEGRATION_TS), "discrepancy": gaps, "tolerance": INTEGRATION_TOL, "passed": ok}, ok


def cmd_verify(cfg: CliConfig, which: str) -> int:
    if which == "euler-maclaurin":
        suite = em_regression_suite()
        for c in suite["checks"]:
            if not c["passed"]:
                _note(f"euler-maclaurin: {c['name']} failed ({c['value']} vs {c['threshold']})")
        text = json.dumps(suite, indent=2) if cfg.fmt != "table" else _table(
            [(c["name"], ("pass " if c["passed"] else "FAIL ") + str(c["value"])) for c in suite["checks"]]
        )
        _emit(cfg, text)
        return 0 if suite["all_passed"] else 1

    rs = cfg.root_system()
    if which == "weyl-law":
        section, ok, report = _weyl_law_section(cfg, rs)
        if "skipped" in section:
            section.update(group=rs.label, **{k: v for k, v in volume_report(rs).to_dict().items() if k != "group"})
        csv_text = report.to_csv() if report is not None else None
        _emit(cfg, _render(cfg, section, csv_text))
        return 0 if ok else 1

    if which == "integration-formula":
        try:
            section, ok = _integration_section(rs)
        except ScopeError as exc:
            _note(str(exc))
            return 2
        _emit(cfg, _render(cfg, {"group": rs.label, **section}))
        return 0 if ok else 1

    doc = {"group": rs.label, "volume": volume_report(rs).to_dict()}
    results = []
    section, ok, report = _weyl_law_section(cfg, rs)
    doc["weyl_law"] = section
    results.append(ok)
    try:
        section, ok = _integration_section(rs)
    except ScopeError as exc:
        _note(f"formula-only: {exc}")
        section, ok = {"skipped": f"formula-only: {exc}"}, True
    doc["integration_formula"] = section
    results.append(ok)
    suite = em_regression_suite()
    doc["euler_maclaurin"] = suite
    results.append(suite["all_passed"])
    doc["passed"] = all(results)
    if cfg.fmt == "table":
        rows = [("group", rs.label)]
        rows += [(f"volume.{k}", _fmt_value(v)) for k, v in doc["volume"].items() if k != "group"]
        rows += [(f"weyl_law.{k}", _fmt_value(v)) for k, v in doc["weyl_law"].items() if k not in ("samples", "t_grid", "partial")]
        rows += [(f"integration_formula.{k}", _fmt_value(v)) for k, v in doc["integration_formula"].items()]
        rows += [("euler_maclaurin.all_passed", str(suite["all_passed"])), ("passed", str(doc["passed"]))]
        _emit(cfg, _table(rows))
    else:
        csv_text = report.to_csv() if (cfg.fmt == "csv" and report is not None) else None
        _emit(cfg, csv_text if csv_text is not None else json.dumps(doc, indent=2))
    return 0 if doc["passed"] else 1


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--group", help='group spec, e.g. "A2", "B2xG2", "A1 x A1"')
    parser.add_argument("--scale", help="comma-separated rationals, one per simple factor")
    parser.add_argument("--cartan-file", help='JSON file {"cartan": [[...]], "scale": [...]}')
    parser.add_argument("--t-start", type=float, default=None)
    parser.add_argument("--t-stop", type=float, default=None)
    parser.add_argument("--t-points", type=int, default=8)
    parser.add_argument("--rel-tol", type=float, default=1e-9)
    parser.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    parser.add_argument("--format", choices=("json", "csv", "table"), default="json")
    parser.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylvol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("roots", help="root data, Gram matrix, |W|, <alpha, rho>"))
    _common(sub.add_parser("volume", help="closed-form volumes"))
    verify = sub.add_parser("verify", help="numerical verification")
    verify.add_argument("which", choices=("weyl-law", "euler-maclaurin", "integration-formula", "all"))
    _common(verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig.from_args(args)
        if args.command == "roots":
            return cmd_roots(cfg)
        if args.command == "volume":
            return cmd_volume(cfg)
        return cmd_verify(cfg, args.which)
    except (UsageError, RootSystemError, ValueError) as exc:
        _note(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
