"""Command-line front end: ``possalloc {moments,allocate,sweep,verify}``."""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys

import numpy as np

from . import allocation as alloc
from . import config, oracle, verify
from .errors import ConfigError, PossallocError
from .fuzzy import TriangularFuzzyNumber
from .operators import central_moments, triangular_closed_moments

log = logging.getLogger("possalloc")

MOMENT_FIELDS = ("expected_value", "variance", "skewness", "kurtosis", "m2", "m3", "m4")


def fmt_csv(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def fmt_table(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "n/a"
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def render(rows: list[dict], columns: list[str], output_format: str, extra: dict | None = None) -> str:
    if output_format == "json":
        doc = {"rows": rows}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, default=_json_default) + "\n"
    if output_format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(fmt_csv(r.get(c)) for c in columns) for r in rows]
        return "\n".join(lines) + "\n"
    cells = [[fmt_table(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    out = io.StringIO()
    out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    out.write("  ".join("-" * w for w in widths) + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")
    if extra:
        for key, value in extra.items():
            if isinstance(value, dict):
                out.write(f"\n{key}:\n")
                for kk, vv in value.items():
                    out.write(f"  {kk:<28s} {fmt_table(vv)}\n")
            else:
                out.write(f"{key}: {fmt_table(value)}\n")
    return out.getvalue()


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not serialisable: {type(x).__name__}")


def cmd_moments(cfg: config.RunConfig) -> str:
    doc = cfg.document
    op = config.parse_operator(doc, cfg.nodes)
    A = config.risk_for_moments(doc)
    quad = central_moments(op, A)
    closed = None
    if isinstance(A, TriangularFuzzyNumber) and op.kind == "T1" and op.weighting.is_default:
        closed = triangular_closed_moments(A.a, A.alpha, A.beta, operator=op)
    rows = []
    for f in MOMENT_FIELDS:
        q = getattr(quad, f)
        c = getattr(closed, f) if closed else None
        rows.append({"quantity": f, "quadrature": q, "closed_form": c,
                     "abs_diff": abs(q - c) if closed else None})
    extra = {"max_abs_discrepancy": max(r["abs_diff"] for r in rows) if closed else None}
    return render(rows, ["quantity", "quadrature", "closed_form", "abs_diff"],
                  cfg.output_format, extra)


def _allocation_rows(m, order: int, solver):
    res = alloc.allocate(m)
    rows = [{"method": "order2", "alpha": res.alpha_order2}]
    if order >= 3:
        rows.append({"method": "order3", "alpha": res.alpha_order3})
    error = None
    try:
        o = oracle.solve_foc(m, solver)
        rows.append({"method": "oracle", "alpha": o.alpha_star, "foc_residual": o.foc_residual})
        ref = o.alpha_star
    except PossallocError as exc:
        error = f"{type(exc).__name__}: {exc}"
        rows.append({"method": "oracle", "alpha": None, "error": error})
        ref = None
    for row in rows:
        if ref is not None and row["alpha"] is not None:
            row["abs_err"] = abs(row["alpha"] - ref)
            row["rel_err"] = abs(row["alpha"] - ref) / abs(ref) if ref else None
    return res, rows


def cmd_allocate(cfg: config.RunConfig) -> str:
    m = config.parse_model(cfg.document, k=cfg.k, nodes=cfg.nodes)
    if not m.k > 0:
        raise ConfigError("k: allocate needs k > 0")
    res, rows = _allocation_rows(m, cfg.order, config.parse_solver(cfg.document))
    for row in rows:
        a = row["alpha"]
        if a is not None and not 0.0 <= a <= m.w0:
            log.warning("%s allocation %.6g lies outside [0, w0=%g]", row["method"], a, m.w0)
    extra = None
    if cfg.verbose:
        extra = {
            "derivative_chain": {
                "alpha_prime0": res.alpha_prime0,
                "alpha_doubleprime0": res.alpha_doubleprime0,
                "alpha_tripleprime0": res.alpha_tripleprime0,
            },
            "f_terms": res.f_terms.to_dict(),
            "order3_from_f_terms": res.alpha_order3_f_terms,
            "moments": res.moments.to_dict(),
            "indicators": res.indicators.to_dict(),
        }
    cols = ["method", "alpha", "abs_err", "rel_err", "foc_residual", "error"]
    return render(rows, cols, cfg.output_format, extra)


SWEEP_COLUMNS = ["k", "alpha_order2", "alpha_order3", "alpha_oracle", "err2", "err3"]


def sweep_rows(m: alloc.PortfolioModel, ks, solver=None) -> list[dict]:
    rows = []
    for k in ks:
        mk = m.with_k(float(k))
        row = {"k": float(k), "alpha_order2": alloc.approx_order2(mk),
               "alpha_order3": alloc.approx_order3(mk)}
        try:
            a = oracle.solve_foc(mk, solver).alpha_star
        except PossallocError as exc:
            log.warning("oracle failed at k=%g: %s", k, exc)
            a = None
        row["alpha_oracle"] = a
        row["err2"] = abs(row["alpha_order2"] - a) if a is not None else None
        row["err3"] = abs(row["alpha_order3"] - a) if a is not None else None
        rows.append(row)
    return rows


def cmd_sweep(cfg: config.RunConfig) -> str:
    k_min, k_max, steps = cfg.sweep_range()
    m = config.parse_model(cfg.document, k=k_min, nodes=cfg.nodes)
    ks = np.linspace(k_min, k_max, steps)
    rows = sweep_rows(m, ks, config.parse_solver(cfg.document))
    return render(rows, SWEEP_COLUMNS, cfg.output_format)


def cmd_verify(cfg: config.RunConfig, benchmark: bool = False) -> tuple[str, int]:
    if benchmark:
        checks = verify.benchmark_checks()
    else:
        checks = verify.document_checks(cfg.document, cfg.nodes)
    rows = [{"check": c.name, "status": "PASS" if c.passed else "FAIL",
             "residual": c.residual, "threshold": c.threshold, "detail": c.detail}
            for c in checks]
    failed = sum(not c.passed for c in checks)
    text = render(rows, ["check", "status", "residual", "threshold", "detail"],
                  cfg.output_format, {"failed": failed, "total": len(checks)})
    return text, 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="possalloc",
                                description="Possibilistic portfolio allocation under expected-utility operators.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cfg_required=True):
        sp.add_argument("config", nargs=None if cfg_required else "?",
                        help="JSON model document")
        sp.add_argument("--nodes", type=int, help="outer quadrature nodes")
        sp.add_argument("--format", dest="output_format", choices=config.FORMATS)
        sp.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("moments", help="moments of the risk component"))
    a = sub.add_parser("allocate", help="approximate and exact optimal allocation")
    common(a)
    a.add_argument("--k", type=float)
    a.add_argument("--order", type=int, choices=(2, 3), default=3)
    s = sub.add_parser("sweep", help="CSV sweep of allocations over k")
    common(s)
    s.add_argument("--k-min", type=float)
    s.add_argument("--k-max", type=float)
    s.add_argument("--steps", type=int)
    v = sub.add_parser("verify", help="run invariant checks")
    common(v, cfg_required=False)
    v.add_argument("--benchmark", action="store_true", help="check the built-in benchmark suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    default_format = "csv" if args.command == "sweep" else "table"
    try:
        doc = {}
        if args.config:
            doc = config.load_document(args.config)
        elif not getattr(args, "benchmark", False):
            raise ConfigError("a config file is required (or --benchmark for verify)")
        cfg = config.RunConfig(
            command=args.command,
            document=doc,
            k=getattr(args, "k", None),
            order=getattr(args, "order", 3),
            nodes=args.nodes,
            output_format=args.output_format or doc.get("format", default_format),
            k_min=getattr(args, "k_min", None),
            k_max=getattr(args, "k_max", None),
            steps=getattr(args, "steps", None),
            verbose=args.verbose,
        )
        status = 0
        if args.command == "moments":
            text = cmd_moments(cfg)
        elif args.command == "allocate":
            text = cmd_allocate(cfg)
        elif args.command == "sweep":
            text = cmd_sweep(cfg)
        else:
            text, status = cmd_verify(cfg, benchmark=args.benchmark)
    except PossallocError as exc:
        print(f"possalloc: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
