"""Command line driver.

    asfgerms grade --group A1 --x 0 --q 3
    asfgerms nilorbits --group A2 --x "1/3 1/3" --d 1/3 --q 7
    asfgerms hess --group A1 --x 0 --d 0 --q 3 --e 0,0,1 --gamma 1,0,1
    asfgerms descend --group C2 --x "0 0" --d 0 --q 5 --e 0,0,0,0,1,0,0,0,0,0
    asfgerms asf count|stratify|descend --group SL2 --q 3 --gamma g.json --x 0 --d 0 --precision 4
    asfgerms shalika germs --group SL2 --q 3 --gamma g.json --precision 4
    asfgerms goldens check|regen --corpus DIR --shards 4

Exit codes: 0 all certificates pass, 2 schema or configuration error,
3 budget exhausted, 4 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from . import asf, shalika
from .core.fields import FieldError
from .core.laurent import PrecisionError
from .graded import StructuralError, check_grading, descent_invariant, grade_at_point
from .hessenberg import TemplateInstance, report as hess_report
from .orbits import BudgetError, associated_cocharacter, datum_from_lambda, group_points, nilpotent_orbits
from .report import EXIT_BUDGET, EXIT_CERTIFICATE, EXIT_OK, EXIT_SCHEMA, Report
from .rootdata import BuildingPoint, RootDataError, RootDatum

CORPUS_ENV = "ASFGERMS_CORPUS"


class SchemaError(ValueError):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("asfgerms.schemas").joinpath(f"{name}.schema.json").read_text())


# -- input parsing ---------------------------------------------------------------------------

def parse_group(name: str, isogeny: str | None) -> RootDatum:
    iso = isogeny or ("AD" if name.upper().startswith("PGL") else "SC")
    return RootDatum(name, iso)


def parse_vector(text: str | None, dim: int) -> np.ndarray:
    if text is None:
        raise SchemaError("vector argument missing")
    vals = [int(s) for s in text.replace(",", " ").split()]
    if len(vals) != dim:
        raise SchemaError(f"expected {dim} coordinates, got {len(vals)}")
    return np.asarray(vals, dtype=np.int64)


def parse_lambda(text: str | None):
    return None if text is None else tuple(int(s) for s in text.replace(",", " ").split())


def load_gamma(path: str, q: int) -> asf.GammaElement:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read gamma file: {exc}") from None
    try:
        jsonschema.validate(data, load_schema("gamma"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"gamma file: {exc.message}") from None
    gamma = asf.GammaElement.from_json(data)
    if gamma.field.q != q:
        raise SchemaError(f"gamma is over F_{gamma.field.q} but --q is {q}")
    return gamma


def _require_sl2(rd: RootDatum) -> None:
    if rd.cartan_type != "A1" or rd.isogeny != "SC":
        raise asf.UnsupportedError("affine Springer fibers and germs are implemented for SL2 only")


def _datum(g, e, d, lam):
    if lam is not None:
        datum = datum_from_lambda(g, e, d, lam)
        if datum is None:
            raise SchemaError("e and lambda do not form an sl2-triple at this level")
        return datum
    datum = associated_cocharacter(g, e, d)
    if not np.array_equal(datum.e, e):
        raise SchemaError(f"e is not in normal form; use --e {','.join(str(int(c)) for c in datum.e)} or pass --lam")
    return datum


# -- subcommands -----------------------------------------------------------------------------

def cmd_grade(a) -> dict:
    g = grade_at_point(parse_group(a.group, a.isogeny), BuildingPoint.parse(a.x), a.q)
    check_grading(g)
    return {"grading": g.to_json(), "jacobi": {"pass": True}}


def cmd_nilorbits(a) -> dict:
    g = grade_at_point(parse_group(a.group, a.isogeny), BuildingPoint.parse(a.x), a.q)
    d = Fraction(a.d)
    G = group_points(g, a.budget)
    rows = []
    for orb in nilpotent_orbits(g, d, G, a.budget):
        datum = associated_cocharacter(g, orb.rep, d, G)
        row = {**orb.to_json(), "datum": datum.to_json()}
        if orb.rep.any():
            res = descent_invariant(datum)
            row["descent"] = {**res.to_json(), "pass": res.s0 == res.s1}
        rows.append(row)
    return {"piece": [int(i) for i in g.piece(d)], "orbits": rows, "group_order": G.order}


def cmd_hess(a) -> dict:
    g = grade_at_point(parse_group(a.group, a.isogeny), BuildingPoint.parse(a.x), a.q)
    d = Fraction(a.d)
    e = parse_vector(a.e, g.dim)
    datum = _datum(g, e, d, parse_lambda(a.lam))
    gamma = parse_vector(a.gamma, g.dim)
    rep = hess_report(TemplateInstance(datum, gamma), group_points(g, a.budget))
    return {"datum": datum.to_json(), "template": {**rep, "pass": rep["smooth"]}}


def cmd_descend(a) -> dict:
    g = grade_at_point(parse_group(a.group, a.isogeny), BuildingPoint.parse(a.x), a.q)
    d = Fraction(a.d)
    datum = _datum(g, parse_vector(a.e, g.dim), d, parse_lambda(a.lam))
    res = descent_invariant(datum)
    return {"datum": datum.to_json(), "descent": {**res.to_json(), "pass": res.s0 == res.s1}}


def _orbit_job(args) -> dict:
    """One nilpotent orbit of an asf run, recomputed from plain inputs so it can run in a worker."""
    mode, gamma_json, x, d, N, index = args
    gamma = asf.GammaElement.from_json(gamma_json)
    g = grade_at_point(asf.SL2, BuildingPoint.parse(x), gamma.field)
    d = Fraction(d)
    G = group_points(g)
    orb = nilpotent_orbits(g, d, G)[index]
    datum = associated_cocharacter(g, orb.rep, d, G)
    out = {"datum": datum.to_json()}
    if mode == "stratify":
        out["stratified"] = asf.stratified_count_check(gamma, datum, N)
        if orb.rep.any():
            out["fiber_at_e"] = asf.fiber_at_e_check(datum, G)
    else:
        out["descent"] = asf.descent_isomorphism_check(gamma, datum, N)
    return out


def _map(fn, jobs: list, shards: int) -> list:
    if shards <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=shards) as ex:
        return list(ex.map(fn, jobs))


def cmd_asf(a) -> dict:
    _require_sl2(parse_group(a.group, a.isogeny))
    gamma = load_gamma(a.gamma, a.q)
    a.gamma = gamma.to_json()
    g = grade_at_point(asf.SL2, BuildingPoint.parse(a.x), gamma.field)
    d = Fraction(a.d)
    N = a.precision
    head = {"depth": str(asf.depth(gamma)), "torus": asf.torus_kind(gamma)}
    if a.action == "count":
        cosets, cert = asf.stable_fiber(gamma, g, d, N)
        out = {**head, "count": len(cosets), "cosets": [z.to_json() for z in cosets], "certificate": cert}
        if d >= asf.depth(gamma):
            out["emptiness"] = asf.emptiness_check(gamma, g, d, N)
        return out
    n_orbits = len(nilpotent_orbits(g, d))
    if a.action == "descend" and d >= asf.depth(gamma):
        raise SchemaError("asf descend needs d < depth(gamma)")
    jobs = [(a.action, gamma.to_json(), a.x, str(d), N, i) for i in range(n_orbits)]
    return {**head, "orbits": _map(_orbit_job, jobs, a.shards)}


def cmd_shalika(a) -> dict:
    _require_sl2(parse_group(a.group, a.isogeny))
    gamma = load_gamma(a.gamma, a.q)
    a.gamma = gamma.to_json()
    out = shalika.germ_report(gamma, a.precision)
    out["census"] = shalika.sample_census(gamma.field, 10)
    out["pass"] = bool(out["tables_agree"] and out["triangular"] and out["support_containment"])
    return out


COMMANDS = {
    "grade": cmd_grade,
    "nilorbits": cmd_nilorbits,
    "hess": cmd_hess,
    "descend": cmd_descend,
    "asf": cmd_asf,
    "shalika": cmd_shalika,
}


# -- parser --------------------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asfgerms", description="Affine Springer fibers and Shalika germs over F_q((t)).")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, point=True):
        p.add_argument("--group", default="SL2")
        p.add_argument("--isogeny", choices=("SC", "AD"))
        p.add_argument("--q", type=_positive, required=True)
        p.add_argument("--budget", type=_positive, default=60000)
        p.add_argument("--shards", type=_positive, default=1)
        p.add_argument("--out")
        p.add_argument("--timing", action="store_true", help="add wall-clock milliseconds to the report")
        if point:
            p.add_argument("--x", default="0", help="building point in simple-coroot coordinates")

    p = sub.add_parser("grade")
    common(p)
    p = sub.add_parser("nilorbits")
    common(p)
    p.add_argument("--d", default="0")
    for name in ("hess", "descend"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--d", default="0")
        p.add_argument("--e", required=True)
        p.add_argument("--lam")
        if name == "hess":
            p.add_argument("--gamma", required=True, help="graded element on the piece")
    p = sub.add_parser("asf")
    p.add_argument("action", choices=("count", "stratify", "descend"))
    common(p)
    p.add_argument("--gamma", required=True, help="gamma JSON file")
    p.add_argument("--d", default="0")
    p.add_argument("--precision", type=_positive, default=4)
    p = sub.add_parser("shalika")
    p.add_argument("action", choices=("germs",))
    common(p, point=False)
    p.add_argument("--gamma", required=True)
    p.add_argument("--precision", type=_positive, default=4)
    p = sub.add_parser("goldens")
    p.add_argument("action", choices=("check", "regen"))
    p.add_argument("--corpus", default=os.environ.get(CORPUS_ENV))
    p.add_argument("--shards", type=_positive, default=1)
    return ap


def _inputs(a) -> dict:
    skip = {"out", "timing", "shards", "budget"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip and v is not None}


def run(argv: list[str]) -> tuple[int, Report | None, str]:
    """Execute one subcommand; returns (exit code, report, message)."""
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            return EXIT_OK, None, ""  # --help
        return EXIT_SCHEMA, None, "argument error"
    if a.command == "goldens":
        from .goldens import check_corpus, regen_corpus

        if not a.corpus:
            return EXIT_SCHEMA, None, f"no corpus directory (use --corpus or ${CORPUS_ENV})"
        if a.action == "regen":
            codes = regen_corpus(a.corpus, a.shards)
            bad = sorted(n for n, c in codes.items() if c != EXIT_OK)
            return (EXIT_CERTIFICATE if bad else EXIT_OK), None, f"regenerated {a.corpus}" + "".join(f"\nfailed: {n}" for n in bad)
        diffs = check_corpus(a.corpus, a.shards)
        return (EXIT_OK if not diffs else EXIT_CERTIFICATE), None, "\n".join(diffs) or "corpus identical"
    t0 = time.perf_counter()
    name = a.command + (f" {a.action}" if hasattr(a, "action") else "")
    try:
        results = COMMANDS[a.command](a)
    except (SchemaError, FieldError, RootDataError, asf.UnsupportedError, shalika.ConfigurationError) as exc:
        return EXIT_SCHEMA, None, f"schema error: {exc}"
    except (BudgetError, asf.StabilityError, PrecisionError) as exc:
        return EXIT_BUDGET, None, f"budget exhausted: {exc}"
    except StructuralError as exc:
        return EXIT_CERTIFICATE, None, f"structural check failed: {exc}"
    timing = {"wall_ms": int(1000 * (time.perf_counter() - t0))} if a.timing else None
    rep = Report(name, _inputs(a), results, timing)
    return (EXIT_OK if rep.passed else EXIT_CERTIFICATE), rep, "ok" if rep.passed else "certificate failure"


def main(argv: list[str] | None = None) -> int:
    code, rep, msg = run(sys.argv[1:] if argv is None else argv)
    if rep is not None:
        text = rep.dumps()
        a = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
        if a.out:
            with open(a.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    if msg and (code != EXIT_OK or rep is None):
        print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
