"""``lck`` command line: verify, audit, search, catalog, curvature, sweep."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import catalog
from . import linalg as la
from .exterior import FormError, MetricError
from .hermitian import (LibraryFalsified, StructureError, check_lck, classify_J, curvature,
                        scalar_curvature)
from .lie import JacobiError, LieAlgebraError, ad, is_unimodular
from .search import SearchConfig, falsification_sweep, search_lck_metric
from .structure import (PreconditionError, audit_abelian_lck, normal_form_abelian,
                        recognize_bi_invariant_model, recognize_heisenberg)

SCHEMA = "lck.report/1"
EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID, EXIT_PRECONDITION = 0, 1, 2, 3

log = logging.getLogger("lck")


class Report:
    def __init__(self, command: Sequence[str], path: str | None = None):
        self.command = list(command)
        self.input = None
        if path is not None:
            data = Path(path).read_bytes()
            self.input = {"path": str(path), "sha256": hashlib.sha256(data).hexdigest()}
        self.results: dict = {}
        self.lines: list[str] = []

    def say(self, line: str) -> None:
        self.lines.append(line)

    def to_json(self, status: int) -> str:
        doc = {"schema": SCHEMA, "command": self.command, "input": self.input,
               "results": self.results, "exit": status}
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    return x


def _scalar(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return f"{float(x):.6g}"


def _load(args) -> catalog.AlgebraFile:
    return catalog.load(args.path, force_exact=getattr(args, "exact", False))


def _need_structure(f: catalog.AlgebraFile):
    missing = [k for k, v in (("J", f.J), ("metric", f.metric)) if v is None]
    if missing:
        raise catalog.ParseError("required field missing", ", ".join(missing))
    return f.structure()


# -- commands ---------------------------------------------------------------------------

def cmd_verify(args, rep: Report) -> int:
    h = _need_structure(_load(args))
    g = h.algebra
    cls = classify_J(g, h.J)
    cert = check_lck(h)
    unimod, traces = is_unimodular(g)
    theta = cert.theta.format(g.dual_labels or None)
    rep.results.update({
        "lck": cert.is_lck, "kahler": cert.is_kahler, "vaisman": cert.is_vaisman,
        "residual": cert.residual, "residual_sq": cert.residual_sq, "theta": theta,
        "theta_coefficients": cert.theta.coeffs, "theta_closed": cert.theta_closed,
        "unimodular": unimod, "ad_traces": traces, "exact": h.exact,
        "J": {"integrable": cls.integrable, "abelian": cls.abelian,
              "bi_invariant": cls.bi_invariant},
    })
    if cert.is_lck and cert.is_kahler:
        rep.say("kahler: yes, theta = 0")
    elif cert.is_lck:
        rep.say(f"lcK: yes, theta = {theta}, vaisman: {'yes' if cert.is_vaisman else 'no'}")
    else:
        rep.say(f"lcK: no, residual = {cert.residual:.6g}")
    rep.say(f"residual = {_scalar(cert.residual_sq)} (squared), theta closed: "
            f"{'yes' if cert.theta_closed else 'no'}")
    rep.say(f"J: integrable {'yes' if cls.integrable else 'no'}, abelian "
            f"{'yes' if cls.abelian else 'no'}, bi-invariant {'yes' if cls.bi_invariant else 'no'}")
    rep.say(f"unimodular: {'yes' if unimod else 'no'}")
    return EXIT_OK if cert.is_lck else EXIT_NEGATIVE


def cmd_audit(args, rep: Report) -> int:
    h = _need_structure(_load(args))
    g = h.algebra
    cert = check_lck(h)
    if not cert.is_lck:
        rep.say(f"not l.c.K.: residual = {cert.residual:.6g}")
        rep.results["lck"] = False
        return EXIT_NEGATIVE
    if cert.A is None:
        rep.say("precondition failed: theta = 0 (Kähler), there is no vector A")
        rep.results["precondition"] = "kahler"
        return EXIT_PRECONDITION
    cls = classify_J(g, h.J)
    unimod, _ = is_unimodular(g)
    tr_a = np.trace(ad(g, cert.A))
    rep.results.update({"abelian": cls.abelian, "bi_invariant": cls.bi_invariant,
                        "unimodular": unimod, "trace_ad_A": tr_a})
    status = EXIT_OK
    if cls.abelian:
        report = audit_abelian_lck(h, cert)
        rep.say(report.table())
        rep.results["checks"] = [{"name": c.name, "status": c.status,
                                  "worst_violation": c.worst_violation} for c in report.checks]
        if not unimod:
            rep.say(f"precondition failed: not unimodular: tr ad_A = {_scalar(tr_a)}")
            status = EXIT_PRECONDITION
        elif not report.passed:
            rep.say("audit FAILED on valid input")
            return EXIT_NEGATIVE
        else:
            rec = recognize_heisenberg(g)
            nf = normal_form_abelian(h, cert, report)
            if rec is None or not nf.ok:
                raise LibraryFalsified("audit passed but the normal form was not reached")
            rep.say(f"isomorphic to R x h_{{2n+1}}, n = {rec.n}, lambda = {_scalar(nf.lam)}")
            rep.results["recognized"] = {"model": "R x h_{2n+1}", "n": rec.n, "lambda": nf.lam}
    if cls.bi_invariant:
        rec = recognize_bi_invariant_model(h, cert)
        rep.say(rec.report.table() if rec else "bi-invariant model checks failed")
        if rec is None:
            return EXIT_NEGATIVE
        rep.say(f"recognized R^2 x| R^{2 * rec.n}, n = {rec.n}")
        rep.results["recognized"] = {"model": "R^2 x| R^{2n}", "n": rec.n}
        if not unimod:
            rep.say(f"not unimodular: tr ad_A = {_scalar(tr_a)}")
    if not (cls.abelian or cls.bi_invariant):
        rep.say("precondition failed: J is not abelian and not bi-invariant")
        rep.results["precondition"] = "J is not abelian and not bi-invariant"
        return EXIT_PRECONDITION
    return status


def cmd_search(args, rep: Report) -> int:
    f = _load(args)
    if f.J is None:
        raise catalog.ParseError("required field missing", "J")
    cfg = SearchConfig(restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                       tol_residual=args.tol, workers=args.workers)
    res = search_lck_metric(f.algebra, f.J, cfg)
    rep.results.update(res.summary())
    rep.say(f"best residual = {res.best_residual:.6g} (scale-free), "
            f"{res.best_absolute:.6g} (absolute, trace-normalised metric)")
    rep.say(f"restarts: {cfg.restarts}, seed {cfg.seed}, converged "
            f"{sum(t.converged for t in res.traces)}")
    if not res.certified:
        rep.say("no certified metric found (this is not a proof of nonexistence)")
        return EXIT_NEGATIVE
    out = Path(args.out) if args.out else Path(args.path).with_suffix(".found.json")
    g = f.algebra.to_float() if f.exact else f.algebra
    catalog.save(catalog.AlgebraFile(g, la.to_float(f.J), res.best_metric, f.orientation, f.name),
                 out)
    rep.results["output"] = str(out)
    kind = "Kähler" if res.certificate.is_kahler else "l.c.K."
    rep.say(f"certified {kind} metric written to {out}")
    return EXIT_OK


def cmd_catalog(args, rep: Report) -> int:
    if not args.name:
        for name in catalog.CATALOG_NAMES:
            rep.say(name)
        rep.say("aff algebras: " + ", ".join(catalog.associative_catalog()))
        rep.results["names"] = list(catalog.CATALOG_NAMES)
        return EXIT_OK
    try:
        h = catalog.builtin(args.name, args.params)
    except KeyError as exc:
        raise catalog.ParseError(str(exc.args[0]), "name") from None
    except ValueError as exc:
        raise catalog.ParseError(str(exc), "params") from None
    text = catalog.dumps(h)
    rep.results["name"] = h.name
    if args.emit:
        Path(args.emit).write_text(text)
        rep.say(f"wrote {h.name} to {args.emit}")
        rep.results["output"] = args.emit
    else:
        rep.say(text.rstrip("\n"))
    return EXIT_OK


def cmd_curvature(args, rep: Report) -> int:
    f = _load(args)
    if f.metric is None:
        raise catalog.ParseError("required field missing", "metric")
    g, gm = f.algebra, f.metric
    s = scalar_curvature(g, gm)
    rep.results["scalar_curvature"] = s
    rep.say(f"scalar curvature = {_scalar(s)}")
    if args.tensor:
        r = curvature(g, gm)
        entries = []
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                for k in range(g.dim):
                    v = r[i, j][:, k]
                    if not la.is_zero(v):
                        terms = " + ".join(f"{_scalar(x)}*{g.label(m)}" for m, x in enumerate(v)
                                           if not la.is_zero(np.array([x], dtype=v.dtype)))
                        rep.say(f"R({g.label(i)},{g.label(j)}){g.label(k)} = {terms}")
                        entries.append([i, j, k, v])
        rep.results["tensor"] = entries
    return EXIT_OK


def cmd_sweep(args, rep: Report) -> int:
    names = [("complex_heisenberg", catalog.complex_heisenberg()),
             ("bi_model(1)", catalog.bi_model(1)),
             ("heisenberg(1,1)", catalog.heisenberg_family(1, 1))]
    cfg = SearchConfig(restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                       tol_residual=args.tol, workers=args.workers)
    table = falsification_sweep([(n, h.algebra, h.J) for n, h in names], cfg)
    rep.say(table.format())
    rep.results["label"] = table.label
    rep.results["rows"] = [r.__dict__ for r in table.rows]
    return EXIT_OK


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lck", description="Verify l.c.K. structures on Lie algebras.")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def with_path(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("path")
        sp.add_argument("--exact", action="store_true", help="refuse float input")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    with_path("verify", "check the l.c.K. condition").set_defaults(func=cmd_verify)
    with_path("audit", "run the structural audit and recognizers").set_defaults(func=cmd_audit)
    sp = with_path("search", "search for an l.c.K. metric compatible with J")
    sp.set_defaults(func=cmd_search)
    sp.add_argument("--out", help="where to write a certified metric")

    def search_flags(sp, restarts):
        sp.add_argument("--restarts", type=int, default=restarts)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--max-iters", type=int, default=200)
        sp.add_argument("--workers", type=int, default=1)

    search_flags(sp, 8)
    sp = with_path("curvature", "scalar curvature of the metric")
    sp.set_defaults(func=cmd_curvature)
    sp.add_argument("--tensor", action="store_true", help="also print R(e_i,e_j)e_k")
    sp = sub.add_parser("catalog", help="list or emit built-in structures")
    sp.add_argument("name", nargs="?")
    sp.add_argument("params", nargs="*")
    sp.add_argument("--emit", metavar="PATH")
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_catalog)
    sp = sub.add_parser("sweep", help="falsification sweep over built-in targets")
    search_flags(sp, 32)
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    level = os.environ.get("LCK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    rep = Report(["lck"] + argv)
    try:
        if getattr(args, "path", None) is not None:
            rep = Report(["lck"] + argv, args.path)
        status = args.func(args, rep)
    except (catalog.ParseError, JacobiError, LieAlgebraError, MetricError, StructureError,
            FormError, OSError) as exc:
        kind = type(exc).__name__
        rep.results["error"] = {"type": kind, "message": str(exc)}
        rep.say(f"error ({kind}): {exc}")
        status = EXIT_PRECONDITION if isinstance(exc, PreconditionError) else EXIT_INVALID
    if args.json:
        print(rep.to_json(status))
    else:
        stream = sys.stdout if status in (EXIT_OK, EXIT_NEGATIVE) else sys.stderr
        for line in rep.lines:
            print(line, file=stream)
    return status


if __name__ == "__main__":
    sys.exit(main())
