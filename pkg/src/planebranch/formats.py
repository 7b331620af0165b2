"""JSON schemas for curves, fields, jets and reports.

Curve:  {"n": 6, "y": [[7, "1"], [10, "1"]], "trunc": 40, "cyclotomic": 12}
Field:  {"A": [[i, j, "c"], ...], "B": [[i, j, "c"], ...]}      (A d/dx + B d/dy)
Jet:    {"x": [[i, j, "c"], ...], "y": [...], "order": 2}
Scalars are strings such as "3/2", "-z^4" or "1 + 2*z" (z = zeta_L).
Reports carry ``"schema": REPORT_SCHEMA`` and are written with sorted keys.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from gmpy2 import mpq

from .moduli import NormalFormReport, Scaling, Step
from .puiseux import HeadFlow, PuiseuxParam
from .scalars import DEFAULT_ORDER, field, format_scalar, parse_scalar
from .series import INF, BiPoly, EpsPoly, TSeries
from .vfield import Invariant, JetDiffeo, VectorField

REPORT_SCHEMA = "planebranch.report/1"


class InputError(ValueError):
    """Input does not match the documented schema."""


def _scalar(text, L: int):
    if isinstance(text, int):
        return mpq(text)
    if not isinstance(text, str):
        raise InputError(f"scalar must be a string or integer, got {text!r}")
    try:
        return parse_scalar(text, L)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def fmt(s) -> str:
    return format_scalar(s)


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"{what} must be an integer, got {v!r}")
    return v


# -- curves ---------------------------------------------------------------------

def curve_from_dict(d: dict, L: int | None = None, trunc: int | None = None) -> PuiseuxParam:
    if not isinstance(d, dict) or "n" not in d or "y" not in d:
        raise InputError("curve needs keys 'n' and 'y'")
    L = L or d.get("cyclotomic", DEFAULT_ORDER)
    L = _int(L, "cyclotomic")
    fld = field(L)
    n = _int(d["n"], "n")
    if n < 1:
        raise InputError("n must be positive")
    terms = {}
    for item in d["y"]:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"curve term must be [exponent, coefficient], got {item!r}")
        e = _int(item[0], "exponent")
        if e < n:
            raise InputError(f"exponent {e} below n = {n}")
        c = _scalar(item[1], L)
        if c:
            terms[e] = terms.get(e, 0) + c
    K = trunc if trunc is not None else d.get("trunc")
    if K is not None:
        K = _int(K, "trunc")
        terms = {e: c for e, c in terms.items() if e < K}
    try:
        return PuiseuxParam.from_terms(n, terms, K, fld)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def curve_to_dict(phi: PuiseuxParam) -> dict:
    return {"n": phi.n, "y": series_terms(phi.y), "trunc": _trunc(phi.trunc),
            "cyclotomic": phi.fld.order}


def series_terms(s: TSeries) -> list:
    return [[e, fmt(c)] for e, c in s.items()]


def _trunc(K):
    return None if K == INF else int(K)


def _poly_from(items, L: int) -> BiPoly:
    terms = {}
    for item in items:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise InputError(f"polynomial term must be [i, j, coefficient], got {item!r}")
        i, j = _int(item[0], "i"), _int(item[1], "j")
        if i < 0 or j < 0:
            raise InputError("negative exponent in polynomial")
        terms[(i, j)] = terms.get((i, j), 0) + _scalar(item[2], L)
    return BiPoly({k: c for k, c in terms.items() if c})


def poly_terms(p: BiPoly) -> list:
    return [[i, j, fmt(c)] for (i, j), c in sorted(p.terms.items())]


def field_from_dict(d: dict, L: int = DEFAULT_ORDER) -> VectorField:
    if not isinstance(d, dict) or not ("A" in d or "B" in d):
        raise InputError("field needs keys 'A' and/or 'B'")
    return VectorField(_poly_from(d.get("A", []), L), _poly_from(d.get("B", []), L))


def field_to_dict(X: VectorField) -> dict:
    return {"A": poly_terms(X.A), "B": poly_terms(X.B)}


def jet_from_dict(d: dict, L: int = DEFAULT_ORDER) -> JetDiffeo:
    if not isinstance(d, dict) or "x" not in d or "y" not in d:
        raise InputError("jet needs keys 'x' and 'y'")
    N = d.get("order")
    if N is not None:
        N = _int(N, "order")
    try:
        return JetDiffeo(_poly_from(d["x"], L), _poly_from(d["y"], L), N)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def jet_to_dict(J: JetDiffeo) -> dict:
    return {"x": poly_terms(J.P), "y": poly_terms(J.Q), "order": J.N}


def eps_to_list(p: EpsPoly) -> list:
    return [fmt(c) for c in p.coeffs]


def value(v):
    """JSON rendering of an int / AtLeast / Invariant result ("infinity" when exact)."""
    if hasattr(v, "bound"):
        b = "infinity" if v.bound == INF else int(v.bound)
        return {"invariant_up_to": b} if isinstance(v, Invariant) else {"at_least": b}
    return v


# -- normal-form reports ------------------------------------------------------------

def _step_to_dict(st: Step) -> dict:
    return {"j": st.j, "witness": field_to_dict(st.witness), "s0": fmt(st.s0),
            "slope": fmt(st.slope), "source": st.source, "jet_order": st.N}


def report_to_dict(r: NormalFormReport) -> dict:
    sc = r.scaling
    scaling = None
    if sc is not None:
        scaling = {
            "mode": sc.mode,
            "u": None if sc.u is None else fmt(sc.u),
            "v_pow_m": None if sc.v_pow_m is None else fmt(sc.v_pow_m),
            "constraints": {k: fmt(v) for k, v in sorted(sc.constraints.items())},
            "numeric": {k: [v.real, v.imag] for k, v in sorted(sc.numeric.items())},
        }
    return {
        "input": curve_to_dict(r.input),
        "prepared": curve_to_dict(r.prepared),
        "head_flows": [{"k": h.k, "a": fmt(h.a), "flow": h.describe()} for h in r.head_flows],
        "output": curve_to_dict(r.output),
        "unscaled": curve_to_dict(r.unscaled) if r.unscaled is not None else None,
        "n": r.n, "m": r.m, "lambda": r.lam, "conductor": r.c,
        "generators": list(r.generators),
        "contact_set_to_conductor": list(r.contact_set),
        "nilpotent_contacts_in_window": list(r.nilpotent_window),
        "window": r.window,
        "cofinal_truncation": r.cofinal,
        "steps": [_step_to_dict(s) for s in r.steps],
        "scaling": scaling,
    }


def report_from_dict(d: dict) -> NormalFormReport:
    try:
        L = d["input"].get("cyclotomic", DEFAULT_ORDER)
        inp = curve_from_dict(d["input"])
        prep = curve_from_dict(d["prepared"])
        out = curve_from_dict(d["output"])
        un = curve_from_dict(d["unscaled"]) if d.get("unscaled") else None
        heads = [HeadFlow(h["k"], _scalar(h["a"], L)) for h in d["head_flows"]]
        steps = [Step(s["j"], field_from_dict(s["witness"], L), _scalar(s["s0"], L),
                      s["source"], _scalar(s["slope"], L), s["jet_order"])
                 for s in d["steps"]]
        sc = d.get("scaling")
        scaling = None
        if sc is not None:
            scaling = Scaling(
                sc["mode"],
                None if sc["u"] is None else _scalar(sc["u"], L),
                None if sc["v_pow_m"] is None else _scalar(sc["v_pow_m"], L))
        return NormalFormReport(inp, prep, heads, out, d["n"], d["m"], d["lambda"],
                                d["conductor"], tuple(d["generators"]),
                                d["contact_set_to_conductor"],
                                d["nilpotent_contacts_in_window"], d["window"],
                                d["cofinal_truncation"], steps, un, scaling)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed normal-form report: {exc!r}") from exc


# -- files --------------------------------------------------------------------------

def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, type(mpq(0))):
        return fmt(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
