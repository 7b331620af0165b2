"""Command-line front end.

Every command prints (or writes with ``--out``) one JSON report.  Exit codes:
0 success, 2 malformed input, 3 mathematical failure (non-representable root,
insufficient truncation, ...), 4 internal cross-check mismatch.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from . import __version__
from . import formats as F
from .blowup import (NotSingular, PathTooLong, contact_from_path, noether_intersection,
                     shared_path, upsilon_from_path)
from .embedding import (completeness_obstruction, jet_eigenpair, obstruction,
                        present_resonances, resonant_monomials, stabilizer_jet2)
from .errors import (CrossCheckError, FieldMismatch, NotNilpotent, NotRepresentable,
                     TruncationError, Unverifiable)
from .moduli import (AffinityError, NoWitness, contact_exponent_deformation, contact_set,
                     deform, lambda_invariant, moduli_equivalent, normal_form, replay)
from .puiseux import euclid_multiplicities, prepare, semigroup
from .scalars import field
from .vfield import (Invariant, contact_exponent, is_nilpotent, iterated_tangency,
                     tangency_order, upsilon)

EXIT_OK, EXIT_PARSE, EXIT_MATH, EXIT_CROSSCHECK = 0, 2, 3, 4

MATH_ERRORS = (NotRepresentable, TruncationError, Unverifiable, PathTooLong, NotSingular,
               NotNilpotent, FieldMismatch, NoWitness, ZeroDivisionError, ArithmeticError)


@dataclass
class JobConfig:
    command: str
    inputs: list = dc_field(default_factory=list)
    trunc_t: int | None = None
    trunc_eps: int = 4
    cyclotomic: int | None = None
    scale: str = "exact"
    max_depth: int | None = None
    out: str | None = None
    jobs: int = 1
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        for name in ("trunc_t", "max_depth", "cyclotomic"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise F.InputError(f"--{name.replace('_', '-')} must be positive")
        if self.trunc_eps < 1 or self.jobs < 1:
            raise F.InputError("limits must be positive")


def _curve(cfg: JobConfig, path: str):
    return F.curve_from_dict(F.load_json(path), cfg.cyclotomic, cfg.trunc_t)


def _field(cfg: JobConfig, path: str, phi=None):
    L = cfg.cyclotomic or (phi.fld.order if phi is not None else 12)
    return F.field_from_dict(F.load_json(path), L)


# -- commands ------------------------------------------------------------------------

def cmd_invariants(cfg: JobConfig, path: str) -> dict:
    phi = _curve(cfg, path)
    prep = prepare(phi)
    out = {"input": F.curve_to_dict(phi),
           "head_flows": [h.describe() for h in prep.log]}
    if prep.smooth:
        out.update({"n": 1, "smooth": True, "m": None, "lambda": None,
                    "generators": [1], "conductor": 0, "contact_set_to_conductor": []})
        return out
    p = prep.param
    sg = semigroup(p)
    c = sg.conductor
    lam = lambda_invariant(p)
    bound = max(c, 1)
    Lam = sorted(contact_set(p, bound)) if bound + p.n <= p.trunc else None
    out.update({
        "n": p.n, "smooth": False, "m": p.y.ord(), "lambda": lam,
        "generators": list(sg.generators), "conductor": c,
        "characteristic_exponents": list(sg.char_exponents),
        "multiplicity_sequence": euclid_multiplicities(sg.char_exponents,
                                                      len(euclid_multiplicities(sg.char_exponents, 64))),
        "contact_set_to_conductor": Lam,
    })
    out["multiplicity_sequence"] = _trim_ones(out["multiplicity_sequence"])
    return out


def _trim_ones(seq):
    k = seq.index(1) if 1 in seq else len(seq)
    return seq[: k + 1]


def cmd_contact(cfg: JobConfig, curve: str, fld: str) -> dict:
    phi = _curve(cfg, curve)
    X = _field(cfg, fld, phi)
    if not X.is_singular():
        raise NotSingular("the field must vanish at the origin")
    n = phi.n
    ups = upsilon(X.dual_form(), phi)
    ce = contact_exponent(X, phi)
    out = {"input": F.curve_to_dict(phi), "field": F.field_to_dict(X),
           "upsilon": F.value(ups), "contact_exponent": F.value(ce),
           "nilpotent": is_nilpotent(X)}
    if isinstance(ce, Invariant):
        out["invariant"] = True
        return out
    ced = contact_exponent_deformation(phi, X, cfg.trunc_eps)
    path = shared_path(X, phi, cfg.max_depth)
    pc = contact_from_path(path)
    c = semigroup(prepare(phi).param).conductor if n > 1 else 0
    tang = tangency_order(X, phi)
    iterated = iterated_tangency(X, phi, 3)
    noether = noether_intersection(path)
    out.update({
        "contact_from_deformation": F.value(ced),
        "contact_from_path": pc,
        "upsilon_from_path": upsilon_from_path(path),
        "tangency_order": F.value(tang),
        "iterated_tangency": [F.value(v) for v in iterated],
        "conductor": c,
        "shared_path": path.to_dict(),
        "noether": noether,
    })
    if not (ce == ced == pc):
        raise CrossCheckError(f"contact exponents disagree: upsilon-n={ce}, "
                              f"deformation={ced}, path={pc}")
    if upsilon_from_path(path) != ups:
        raise CrossCheckError("upsilon from path disagrees with the pullback order")
    if tang != ce + n + c - 1:
        raise CrossCheckError(f"tangency {tang} != contact + n + c - 1 = {ce + n + c - 1}")
    finite = [v for v in iterated if not isinstance(v, Invariant)]
    if finite and min(finite) != noether:
        raise CrossCheckError(f"Noether number {noether} != min iterated tangency {min(finite)}")
    return out


def cmd_deform(cfg: JobConfig, curve: str, fld: str) -> dict:
    phi = _curve(cfg, curve)
    X = _field(cfg, fld, phi)
    dp = deform(phi, X, cfg.trunc_eps)
    return {"input": F.curve_to_dict(phi), "field": F.field_to_dict(X),
            "n": dp.n, "trunc": dp.trunc, "eps_degree": dp.D,
            "y": [[e, F.eps_to_list(c)] for e, c in sorted(dp.coeffs.items())],
            "first_moving_exponent": dp.first_nonconstant()}


def cmd_shared_path(cfg: JobConfig, curve: str, fld: str) -> dict:
    phi = _curve(cfg, curve)
    X = _field(cfg, fld, phi)
    path = shared_path(X, phi, cfg.max_depth)
    return {"input": F.curve_to_dict(phi), "field": F.field_to_dict(X),
            "shared_path": path.to_dict(), "noether": noether_intersection(path),
            "contact_from_path": contact_from_path(path) if path.N else None}


def cmd_normal_form(cfg: JobConfig, path: str) -> dict:
    phi = _curve(cfg, path)
    r = normal_form(phi, cfg.scale)
    return F.report_to_dict(r)


def cmd_equivalence(cfg: JobConfig, p1: str, p2: str) -> dict:
    r1 = normal_form(_curve(cfg, p1), "exact")
    r2 = normal_form(_curve(cfg, p2), "exact")
    return {"first": F.curve_to_dict(r1.output), "second": F.curve_to_dict(r2.output),
            "equivalent": moduli_equivalent(r1, r2),
            "invariants": [[r.n, r.m, r.lam, r.c] for r in (r1, r2)]}


def cmd_embeddability(cfg: JobConfig, jet: str, curve: str | None) -> dict:
    L = cfg.cyclotomic or 12
    J = F.jet_from_dict(F.load_json(jet), L)
    if curve is not None:
        phi = _curve(cfg, curve)
        cert = completeness_obstruction(phi, J)
        return {"jet": F.jet_to_dict(J), "curve": F.curve_to_dict(phi),
                "certificate": cert.to_dict()}
    e = jet_eigenpair(J, field(L))
    res = obstruction(e, present_resonances(J, e))
    return {"jet": F.jet_to_dict(J), "certificate": res.to_dict(),
            "resonant_degree2": [list(m) for m in resonant_monomials(e, 2)]}


def cmd_stabilizer(cfg: JobConfig, path: str) -> dict:
    phi = _curve(cfg, path)
    return {"input": F.curve_to_dict(phi), "stabilizer_jet2": stabilizer_jet2(phi).to_dict()}


def cmd_verify(cfg: JobConfig, path: str) -> dict:
    d = F.load_json(path)
    if d.get("schema") != F.REPORT_SCHEMA or d.get("command") != "normal-form":
        raise F.InputError("verify needs a normal-form report")
    rep = F.report_from_dict(d["result"])
    got = replay(rep)
    ok = got == rep.output and got.fld.order == rep.output.fld.order
    if not ok:
        raise CrossCheckError("replayed transcript does not reproduce the output")
    return {"verified": True, "steps": len(rep.steps), "output": F.curve_to_dict(got)}


# -- driver --------------------------------------------------------------------------

def _one(cfg: JobConfig, args: tuple) -> dict:
    fn = COMMANDS[cfg.command]
    return fn(cfg, *args)


COMMANDS = {
    "invariants": cmd_invariants,
    "contact": cmd_contact,
    "deform": cmd_deform,
    "shared-path": cmd_shared_path,
    "normal-form": cmd_normal_form,
    "equivalence": cmd_equivalence,
    "embeddability": cmd_embeddability,
    "stabilizer": cmd_stabilizer,
    "verify": cmd_verify,
}
MULTI = {"invariants", "normal-form", "stabilizer"}


def _error(code: str, exc: BaseException) -> dict:
    return {"schema": F.REPORT_SCHEMA, "status": "error", "error": code,
            "exception": type(exc).__name__, "message": str(exc)}


def run(cfg: JobConfig) -> tuple[int, dict]:
    """Execute a job; returns (exit status, report)."""
    try:
        if cfg.command in MULTI and len(cfg.inputs) > 1:
            if cfg.jobs > 1:
                with ProcessPoolExecutor(cfg.jobs) as ex:
                    results = list(ex.map(_one, [cfg] * len(cfg.inputs),
                                          [(p,) for p in cfg.inputs]))
            else:
                results = [_one(cfg, (p,)) for p in cfg.inputs]
            result = {"jobs": [{"path": p, "result": r} for p, r in zip(cfg.inputs, results)]}
        else:
            result = _one(cfg, tuple(cfg.inputs))
    except F.InputError as exc:
        return EXIT_PARSE, _error("parse", exc)
    except (CrossCheckError, AffinityError) as exc:
        return EXIT_CROSSCHECK, _error("cross-check", exc)
    except MATH_ERRORS as exc:
        return EXIT_MATH, _error(_math_code(exc), exc)
    except ValueError as exc:
        return EXIT_MATH, _error("domain", exc)
    return EXIT_OK, {"schema": F.REPORT_SCHEMA, "status": "ok", "version": __version__,
                     "command": cfg.command, "result": result}


def _math_code(exc) -> str:
    return {NotRepresentable: "not-representable", TruncationError: "truncation",
            Unverifiable: "unverifiable", PathTooLong: "path-too-long",
            NotSingular: "not-singular", NotNilpotent: "not-nilpotent",
            FieldMismatch: "field-mismatch", NoWitness: "no-witness"}.get(type(exc), "arithmetic")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(F.dumps({"schema": F.REPORT_SCHEMA, "status": "error",
                                  "error": "parse", "message": message}))
        sys.exit(EXIT_PARSE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc-t", type=int, default=None, metavar="N",
                        help="truncation of the t-series (terms >= N dropped)")
    common.add_argument("--trunc-eps", type=int, default=4, metavar="N",
                        help="initial eps-degree for deformations (default 4)")
    common.add_argument("--cyclotomic", type=int, default=None, metavar="L",
                        help="coefficient field Q(zeta_L) (default: file value or 12)")
    common.add_argument("--scale", choices=("exact", "skip", "numeric"), default="exact")
    common.add_argument("--max-depth", type=int, default=None, metavar="N")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="write the report atomically to PATH")
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker processes for several input files")

    p = _Parser(prog="planebranch", description="Invariants and normal forms of plane branches.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("invariants", parents=[common], help="n, m, lambda, semigroup, conductor, contact set")
    s.add_argument("curves", nargs="+")
    s = sub.add_parser("contact", parents=[common], help="contact exponent, cross-checked three ways")
    s.add_argument("curve"); s.add_argument("field")
    s = sub.add_parser("deform", parents=[common], help="flow deformation in a formal eps")
    s.add_argument("curve"); s.add_argument("field")
    s = sub.add_parser("shared-path", parents=[common], help="blow-up path shared by curve and field")
    s.add_argument("curve"); s.add_argument("field")
    s = sub.add_parser("normal-form", parents=[common], help="normal form with replayable transcript")
    s.add_argument("curves", nargs="+")
    s = sub.add_parser("equivalence", parents=[common], help="compare two branches via normal forms")
    s.add_argument("curve1"); s.add_argument("curve2")
    s = sub.add_parser("embeddability", parents=[common], help="resonance obstruction of a 2-jet")
    s.add_argument("jet"); s.add_argument("curve", nargs="?", default=None)
    s = sub.add_parser("stabilizer", parents=[common], help="2-jet stabilizer system of a branch")
    s.add_argument("curves", nargs="+")
    s = sub.add_parser("verify", parents=[common], help="replay a normal-form report")
    s.add_argument("report")
    return p


def config_from_args(ns) -> JobConfig:
    if ns.command in MULTI:
        inputs = list(ns.curves)
    elif ns.command in ("contact", "deform", "shared-path"):
        inputs = [ns.curve, ns.field]
    elif ns.command == "equivalence":
        inputs = [ns.curve1, ns.curve2]
    elif ns.command == "embeddability":
        inputs = [ns.jet, ns.curve]
    else:
        inputs = [ns.report]
    return JobConfig(ns.command, inputs, ns.trunc_t, ns.trunc_eps, ns.cyclotomic,
                     ns.scale, ns.max_depth, ns.out, ns.jobs)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except F.InputError as exc:
        status, report = EXIT_PARSE, _error("parse", exc)
    else:
        status, report = run(cfg)
    text = F.dumps(report)
    if ns.out:
        F.write_atomic(ns.out, text)
    else:
        sys.stdout.write(text)
    if status:
        sys.stderr.write(f"planebranch: {report['error']}: {report['message']}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
