"""``robba-lab``: batch front end over the library operations.

Every subcommand reads JSON documents, runs one operation and prints a
result document

    {"command", "params", "result", "log", "precision_loss"}

with sorted keys.  Exit status: 0 success, 1 schema error, 2 precondition
failure, 3 certificate violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import laurent, mw, nabla, padic, residue, robba
from .errors import CertificateViolation, PreconditionError, RobbaLabError, SchemaError
from .laurent import OCLaurent
from .mw import MWElement
from .padic import LogNorm, PadicScalar, format_rational, parse_rational
from .residue import FpLaurent, ResidueDoubleSeries
from .robba import RobbaElement

DEFAULT_SEED = 20240601


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message)


# serialization ---------------------------------------------------------------

def to_jsonable(x):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return "inf" if x == float("inf") else x
    if isinstance(x, Fraction):
        return format_rational(x)
    if hasattr(x, "to_json"):
        return to_jsonable(x.to_json())
    if dataclasses.is_dataclass(x):
        return to_jsonable(dataclasses.asdict(x))
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise SchemaError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def _rat(value: str) -> Fraction:
    return parse_rational(value)


def _load_list(path: str, key: str, parse):
    doc = _load(path)
    if not isinstance(doc, dict) or set(doc) - {key, "p"} or key not in doc or not isinstance(doc[key], list):
        raise SchemaError(f"{path}: expected {{\"{key}\": [...]}}")
    return [parse(x) for x in doc[key]]


# commands ------------------------------------------------------------------------
# each returns (result, log, precision_loss)

def _scalar_binop(op):
    def run(a):
        x = PadicScalar.from_json(_load(a.a))
        y = PadicScalar.from_json(_load(a.b))
        return op(x, y), [], 0
    return run


def cmd_scalar_inv(a):
    return padic.scalar_inv(PadicScalar.from_json(_load(a.a))), [], 0


def cmd_lognorm(a):
    return padic.lognorm_of(PadicScalar.from_json(_load(a.a))), [], 0


def _oc_binop(op):
    def run(a):
        return op(OCLaurent.from_json(_load(a.f)), OCLaurent.from_json(_load(a.g))), [], 0
    return run


def cmd_eta_norm(a):
    return laurent.eta_norm(OCLaurent.from_json(_load(a.f)), _rat(a.alpha)), [], 0


def cmd_pi_norm(a):
    return laurent.pi_norm(OCLaurent.from_json(_load(a.f))), [], 0


def cmd_oc_reduce(a):
    return laurent.reduce_mod_pi(OCLaurent.from_json(_load(a.f))), [], 0


def cmd_oc_invert(a):
    return laurent.oc_invert(OCLaurent.from_json(_load(a.f)), a.prec, a.tprec), [], 0


def cmd_frobenius(a):
    return laurent.frobenius_sigma(OCLaurent.from_json(_load(a.f))), [], 0


def cmd_epsnorm(a):
    alpha, cert = laurent.epsnorm_select(OCLaurent.from_json(_load(a.f)), _rat(a.alpha0), _rat(a.eps))
    return {"alpha": alpha, "certificate": cert}, [], 0


def _robba_binop(op):
    def run(a):
        return op(RobbaElement.from_json(_load(a.f)), RobbaElement.from_json(_load(a.g))), [], 0
    return run


def cmd_eta_s_norm(a):
    return robba.eta_s_norm(RobbaElement.from_json(_load(a.f)), _rat(a.alpha), _rat(a.s)), [], 0


def cmd_aux_norm(a):
    f = RobbaElement.from_json(_load(a.f))
    return robba.aux_norm_Rs(f, _rat(a.alpha), _rat(a.s), _rat(a.c_shift)), [], 0


def _residue(path: str) -> ResidueDoubleSeries:
    return ResidueDoubleSeries.from_json(_load(path))


def cmd_membership(a):
    verdict, witness = residue.residue_membership(_residue(a.f), a.c, a.d)
    return {"verdict": verdict, "witness": witness}, [], 0


def cmd_lift_residue(a):
    return robba.lift_residue(_residue(a.f), _rat(a.alpha)), [], 0


def cmd_partial_valuation(a):
    return residue.partial_valuation(_residue(a.f), a.n), [], 0


def cmd_residue_invert(a):
    return residue.residue_invert(_residue(a.f), a.length, a.tprec), [], 0


def cmd_hensel_residue(a):
    doc = _load(a.poly)
    if not isinstance(doc, dict) or "coeffs" not in doc or set(doc) - {"coeffs", "x0", "p"}:
        raise SchemaError("polynomial document needs coeffs (+x0)")
    P = [ResidueDoubleSeries.from_json(c) for c in doc["coeffs"]]
    x0 = FpLaurent.from_json(doc["x0"]) if doc.get("x0") is not None else None
    out = residue.hensel_root_residue(P, x0, a.n, a.tprec)
    return out, out.pop("log", []), 0


def cmd_hensel_int(a):
    coeffs = _load_list(a.poly, "coeffs", RobbaElement.from_json)
    out = robba.hensel_lift_int(coeffs, W=a.prec, max_iter=a.max_iter)
    return out, out.pop("log", []), 0


def cmd_unit_invert(a):
    log: list = []
    out = robba.int_unit_invert(RobbaElement.from_json(_load(a.f)), W=a.prec, log=log)
    return out, log, 0


def cmd_substitute(a):
    log: list = []
    out = robba.substitute(RobbaElement.from_json(_load(a.f)), RobbaElement.from_json(_load(a.g)),
                           W=a.prec, log=log)
    return out, log, 0


def cmd_trace(a):
    return robba.trace_map(RobbaElement.from_json(_load(a.f)), a.m, a.prec), [], 0


def _mw_binop(op):
    def run(a):
        return op(MWElement.from_json(_load(a.f)), MWElement.from_json(_load(a.g))), [], 0
    return run


def cmd_order(a):
    return mw.order(MWElement.from_json(_load(a.f))), [], 0


def cmd_order_cert(a):
    return mw.order_certificate(MWElement.from_json(_load(a.f)), a.k), [], 0


def cmd_wdiv(a):
    out = mw.weierstrass_divide(MWElement.from_json(_load(a.f)), MWElement.from_json(_load(a.g)), floor=a.floor)
    return out, out.pop("log", []), 0


def cmd_wprep(a):
    return mw.weierstrass_prepare(MWElement.from_json(_load(a.f)), floor=a.floor), [], 0


def cmd_embed(a):
    return mw.embed_into_robba(MWElement.from_json(_load(a.f))), [], 0


def cmd_quotient_rep(a):
    return mw.quotient_rep(RobbaElement.from_json(_load(a.f))), [], 0


def cmd_mw_frobenius(a):
    return mw.mw_frobenius(MWElement.from_json(_load(a.f))), [], 0


def _module(path: str) -> nabla.NablaModule:
    return nabla.NablaModule.from_json(_load(path))


def cmd_compat(a):
    return nabla.check_phi_nabla_compat(_module(a.module)), [], 0


def cmd_unipotent(a):
    return nabla.is_unipotent_basis(_module(a.module)), [], 0


def cmd_reduce(a):
    red = nabla.strongly_unipotent_reduce(_module(a.module))
    return red, [], red.precision_loss


def cmd_cohomology(a):
    M = _module(a.module)
    res = nabla.cohomology_unipotent(M) if M.base.startswith("robba") else nabla.mw_cohomology(M)
    return res, [], res.precision_loss


def cmd_horizontal(a):
    M = _module(a.module)
    vec = _load(a.vector)
    if not isinstance(vec, dict) or set(vec) != {"v"} or not isinstance(vec["v"], list):
        raise SchemaError('vector document must be {"v": [RobbaElement, ...]}')
    v = [RobbaElement.from_json(x) for x in vec["v"]]
    out = nabla.horizontal_sections(M, v, e=a.e, steps=a.steps, floor=a.floor)
    return out, out.pop("log"), out["precision_loss"]


def cmd_base_change(a):
    out = nabla.base_change_compare(_module(a.module))
    results = out.pop("results")
    out["dagger_result"], out["E_result"] = results
    return out, [], max(r.precision_loss for r in results)


def _suite_case(args) -> dict:
    seed, k = args
    rng = random.Random(seed * 1000003 + k)
    n = rng.randint(1, 4)
    p = rng.choice((5, 7)) if n > 2 else rng.choice((3, 5))
    M, _, _ = nabla.random_unipotent_module(rng, p, n)
    rep = nabla.base_change_compare(M)
    return {"case": k, "p": p, "rank": n, "dagger": rep["dagger"], "E": rep["E"], "equal": rep["equal"]}


def cmd_suite(a):
    cases = [(a.seed, k) for k in range(a.count)]
    if a.jobs > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as pool:
            rows = list(pool.map(_suite_case, cases))
    else:
        rows = [_suite_case(c) for c in cases]
    return {"cases": rows, "all_equal": all(r["equal"] for r in rows)}, rows, 0


# parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="robba-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--emit", choices=("result", "log"), default="result",
                    help="print the result document, or the per-iteration log as JSON lines")
    ap.add_argument("--out", help="write the result document here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, *specs):
        sp = sub.add_parser(name)
        for flag, kw in specs:
            sp.add_argument(flag, **kw)
        sp.set_defaults(fn=fn)
        return sp

    req = {"required": True}
    F = ("--f", req)
    G = ("--g", req)
    MOD = ("--module", req)
    add("scalar-add", _scalar_binop(padic.scalar_add), ("--a", req), ("--b", req))
    add("scalar-mul", _scalar_binop(padic.scalar_mul), ("--a", req), ("--b", req))
    add("scalar-inv", cmd_scalar_inv, ("--a", req))
    add("lognorm", cmd_lognorm, ("--a", req))
    add("oc-add", _oc_binop(laurent.oc_add), F, G)
    add("oc-mul", _oc_binop(laurent.oc_mul), F, G)
    add("eta-norm", cmd_eta_norm, F, ("--alpha", req))
    add("pi-norm", cmd_pi_norm, F)
    add("oc-reduce", cmd_oc_reduce, F)
    add("oc-invert", cmd_oc_invert, F, ("--prec", {"type": int, "default": None}),
        ("--tprec", {"type": int, "default": 20}))
    add("frobenius", cmd_frobenius, F)
    add("epsnorm", cmd_epsnorm, F, ("--alpha0", req), ("--eps", req))
    add("robba-add", _robba_binop(robba.robba_add), F, G)
    add("robba-mul", _robba_binop(robba.robba_mul), F, G)
    add("eta-s-norm", cmd_eta_s_norm, F, ("--alpha", req), ("--s", req))
    add("aux-norm", cmd_aux_norm, F, ("--alpha", req), ("--s", req), ("--c-shift", req))
    add("membership", cmd_membership, F, ("--c", {"type": int, **req}), ("--d", {"type": int, **req}))
    add("lift-residue", cmd_lift_residue, F, ("--alpha", {"default": "1"}))
    add("partial-valuation", cmd_partial_valuation, F, ("--n", {"type": int, **req}))
    add("residue-invert", cmd_residue_invert, F, ("--length", {"type": int, "default": None}),
        ("--tprec", {"type": int, "default": 20}))
    add("hensel-residue", cmd_hensel_residue, ("--poly", req), ("--n", {"type": int, "default": 12}),
        ("--tprec", {"type": int, "default": 20}))
    add("hensel-int", cmd_hensel_int, ("--poly", req), ("--prec", {"type": int, "default": 12}),
        ("--max-iter", {"type": int, "default": 12}))
    add("unit-invert", cmd_unit_invert, F, ("--prec", {"type": int, "default": 12}))
    add("substitute", cmd_substitute, F, G, ("--prec", {"type": int, "default": None}))
    add("trace", cmd_trace, F, ("--m", {"type": int, **req}), ("--prec", {"type": int, "default": 20}))
    add("mw-add", _mw_binop(mw.mw_add), F, G)
    add("mw-mul", _mw_binop(mw.mw_mul), F, G)
    add("order", cmd_order, F)
    add("order-cert", cmd_order_cert, F, ("--k", {"type": int, **req}))
    add("wdiv", cmd_wdiv, F, G, ("--floor", {"type": int, "default": mw.DEFAULT_FLOOR}))
    add("wprep", cmd_wprep, F, ("--floor", {"type": int, "default": mw.DEFAULT_FLOOR}))
    add("embed", cmd_embed, F)
    add("quotient-rep", cmd_quotient_rep, F)
    add("mw-frobenius", cmd_mw_frobenius, F)
    add("compat", cmd_compat, MOD)
    add("unipotent", cmd_unipotent, MOD)
    add("reduce", cmd_reduce, MOD)
    add("cohomology", cmd_cohomology, MOD)
    add("horizontal", cmd_horizontal, MOD, ("--vector", req), ("--e", {"type": int, "default": None}),
        ("--steps", {"type": int, "default": None}), ("--floor", {"type": int, "default": nabla.DEFAULT_FLOOR}))
    add("base-change", cmd_base_change, MOD)
    add("suite", cmd_suite, ("--count", {"type": int, "default": 50}),
        ("--seed", {"type": int, "default": DEFAULT_SEED}), ("--jobs", {"type": int, "default": 1}))
    return ap


def run(argv=None) -> tuple[int, dict | None]:
    """Parse and execute; returns (exit status, result document or None)."""
    try:
        args = build_parser().parse_args(argv)
        result, log, loss = args.fn(args)
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("fn", "command", "emit", "out") and v is not None}
        doc = {
            "command": args.command,
            "params": to_jsonable(params),
            "result": to_jsonable(result),
            "log": to_jsonable(log),
            "precision_loss": loss,
        }
    except RobbaLabError as exc:
        doc = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(doc, sort_keys=True), file=sys.stderr)
        return exc.exit_code, None
    text = json.dumps(doc, sort_keys=True)
    if args.emit == "log":
        for entry in doc["log"]:
            print(json.dumps(entry, sort_keys=True))
    elif args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0, doc


def main(argv=None) -> int:
    status, _ = run(argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
