"""Command-line front end: ``excouple pages | pairing | converge``.

Exit codes: 0 when every check passes, 2 when a mathematical check fails
(a Leibniz failure, a refused descent, missing strong convergence), 1 on
input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any

from .abgroup import GroupError, PresentedGroup, render_invariants
from .convergence import ConvergenceError, verdict
from .couple import (
    Bidegree,
    CoupleError,
    ExactCouple,
    ExactnessError,
    global_stabilization_page,
    page,
)
from .pairing import (
    DescentRefused,
    PagePairing,
    PairingError,
    TowerPairing,
    einfinity_pairing,
    gr_compatibility,
    induce_E1,
    render_element,
    run_descent,
)
from .signcalc import leibniz_sign
from .tower import (
    CONVENTIONS,
    AugmentedTowerData,
    FilteredComplex,
    TowerError,
    from_augmented_tower,
    from_filtered_complex,
    lim_couple,
    reindex,
)

FORMAT_VERSION = 1
DEFAULT_PAGE_CAP = 64

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2

# "summary" drops differential matrices and all but the first witness per page
VERBOSITY = ("full", "summary")


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# documents


@dataclass
class Document:
    version: int
    options: dict[str, Any]
    complexes: dict[str, FilteredComplex | AugmentedTowerData]
    pairings: list[dict[str, Any]] = field(default_factory=list)


def _need(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise InputError(f"{where}: field {key!r} must be of type {kind.__name__}")
    return v


def _int_matrix(M, where) -> list[list[int]]:
    if not isinstance(M, list) or any(not isinstance(r, list) or any(type(a) is not int for a in r) for r in M):
        raise InputError(f"{where}: expected an integer matrix")
    return M


def _bidegree(v, where) -> tuple[int, int]:
    if not isinstance(v, list) or len(v) != 2 or any(type(a) is not int for a in v):
        raise InputError(f"{where}: expected a bidegree [p, q]")
    return (v[0], v[1])


def _group(obj, where) -> PresentedGroup:
    if isinstance(obj, dict) and "invariants" in obj:
        inv = obj["invariants"]
        rank = _need(inv, "rank", where, int)
        tors = _need(inv, "torsion", where, list)
        return PresentedGroup.from_invariants(rank, tors)
    n = _need(obj, "generators", where, int)
    rels = _int_matrix(obj.get("relations", []), where)
    if any(len(r) != n for r in rels):
        raise InputError(f"{where}: relations must have {n} columns")
    return PresentedGroup(n, tuple(tuple(r) for r in rels))


def _complex(name, obj) -> FilteredComplex | AugmentedTowerData:
    where = f"complex {name!r}"
    kind = obj.get("type", "filtered")
    if kind == "filtered":
        ranks, bnd, levels = {}, {}, {}
        for k, d in enumerate(_need(obj, "degrees", where, list)):
            w = f"{where} degree entry {k}"
            n = _need(d, "degree", w, int)
            if n in ranks:
                raise InputError(f"{w}: degree {n} listed twice")
            lv = _need(d, "levels", w, list)
            if any(type(a) is not int for a in lv):
                raise InputError(f"{w}: levels must be integers")
            ranks[n], levels[n] = len(lv), lv
            if "boundary" in d:
                bnd[n] = _int_matrix(d["boundary"], w)
        return FilteredComplex(ranks, bnd, levels)
    if kind == "augmented":
        def groups(key):
            out = {}
            for k, e in enumerate(obj.get(key, [])):
                w = f"{where} {key}[{k}]"
                out[_bidegree(_need(e, "at", w), w)] = _group(e, w)
            return out

        def maps(key):
            out = {}
            for k, e in enumerate(obj.get(key, [])):
                w = f"{where} {key}[{k}]"
                out[_bidegree(_need(e, "at", w), w)] = _int_matrix(_need(e, "matrix", w), w)
            return out

        for key in ("d_below", "d_above"):
            if obj.get(key) is not None and type(obj[key]) is not int:
                raise InputError(f"{where}: {key} must be an integer or null")
        if obj.get("bounded", True) is not True:
            raise InputError(f"{where}: only bounded towers are supported")
        return AugmentedTowerData(
            groups("D"), groups("E"), maps("i"), maps("j"), maps("kappa"),
            obj.get("d_below"), obj.get("d_above"), obj.get("indexing", "colim"),
        )
    raise InputError(f"{where}: unknown type {kind!r}")


def parse_document(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError("document must be a JSON object")
    version = raw.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InputError(f"unsupported format version {version!r}")
    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise InputError("options must be an object")
    if options.get("verbosity", "full") not in VERBOSITY:
        raise InputError(f"verbosity must be one of {', '.join(VERBOSITY)}")
    comps = raw.get("complexes", {})
    if not isinstance(comps, dict) or not comps:
        raise InputError("document needs a nonempty 'complexes' object")
    complexes = {}
    for name, obj in comps.items():
        try:
            complexes[name] = _complex(name, obj)
        except (TowerError, GroupError) as exc:
            raise InputError(f"complex {name!r}: {exc}") from None
    pairings = raw.get("pairings", [])
    if not isinstance(pairings, list):
        raise InputError("pairings must be a list")
    for k, p in enumerate(pairings):
        for key in ("left", "right", "target"):
            ref = _need(p, key, f"pairing {k}", str)
            if ref not in complexes:
                raise InputError(f"pairing {k}: {key} refers to unknown complex {ref!r}")
    return Document(version, options, complexes, pairings)


# ---------------------------------------------------------------------------
# building engine objects


def build_couple(obj, indexing: str) -> ExactCouple:
    if isinstance(obj, FilteredComplex):
        return from_filtered_complex(obj) if indexing == "colim" else lim_couple(obj)
    couple = from_augmented_tower(obj)
    if couple.indexing != indexing:
        couple = reindex(couple, couple.indexing, indexing)
    return couple


def build_pairing(doc: Document, block: dict, where: str, couples: dict[str, ExactCouple]):
    kind = block.get("type", "chain")
    names = (block["left"], block["right"], block["target"])
    if kind == "chain":
        cx = [doc.complexes[n] for n in names]
        if not all(isinstance(c, FilteredComplex) for c in cx):
            raise InputError(f"{where}: chain pairings need filtered complexes")
        mu = {}
        for k, e in enumerate(_need(block, "products", where, list)):
            w = f"{where} product {k}"
            a, b = _bidegree(_need(e, "left", w), w), _bidegree(_need(e, "right", w), w)
            v = _need(e, "value", w, list)
            mu[(a, b)] = v
        return TowerPairing(*cx, mu)
    if kind == "page":
        r = block.get("r", 1)
        tensors = {}
        for k, e in enumerate(_need(block, "products", where, list)):
            w = f"{where} product {k}"
            b1, b2 = _bidegree(_need(e, "left_at", w), w), _bidegree(_need(e, "right_at", w), w)
            tensors[(Bidegree(*b1), Bidegree(*b2))] = _need(e, "tensor", w, list)
        return PagePairing(r, *(couples[n] for n in names), tensors)
    raise InputError(f"{where}: unknown pairing type {kind!r}")


# ---------------------------------------------------------------------------
# reports


def page_cap() -> int:
    raw = os.environ.get("EXCOUPLE_MAX_PAGE")
    if raw is None:
        return DEFAULT_PAGE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InputError(f"EXCOUPLE_MAX_PAGE must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InputError("EXCOUPLE_MAX_PAGE must be at least 1")
    return cap


def _order(bs):
    return sorted(bs, key=lambda b: (b.q, b.p))


def pages_report(name: str, couple: ExactCouple, max_r: int) -> dict:
    pages = []
    for r in range(1, max_r + 1):
        P = page(couple, r)
        entries, diffs = [], []
        for b in _order(P.support()):
            G = P.group(*b)
            rank, tors = G.invariants()
            entries.append({"p": b.p, "q": b.q, "group": render_invariants(rank, tors),
                            "invariants": {"rank": rank, "torsion": list(tors)}})
            d = P.differential(*b)
            if d.target.ngens and not d.is_zero():
                diffs.append({"from": [b.p, b.q], "to": [b.p - 1, b.q + r], "matrix": d.reduced_matrix()})
        pages.append({"r": r, "entries": entries, "differentials": diffs})
    return {"complex": name, "indexing": couple.indexing, "pages": pages}


def render_pages_text(rep: dict) -> str:
    lines = [f"complex {rep['complex']} ({rep['indexing']} indexing)"]
    for pg in rep["pages"]:
        lines.append(f"page {pg['r']}")
        if not pg["entries"]:
            lines.append("  all entries zero")
        for e in pg["entries"]:
            lines.append(f"  E({e['p']},{e['q']}) = {e['group']}")
        for d in pg["differentials"]:
            lines.append(f"  d_{pg['r']} ({d['from'][0]},{d['from'][1]}) -> ({d['to'][0]},{d['to'][1]}): {d['matrix']}")
    return "\n".join(lines)


def pairing_report(name: str, pp: PagePairing, tp: TowerPairing | None) -> tuple[dict, bool]:
    log = run_descent(pp)
    pages = []
    for rep in log.reports:
        pages.append({
            "r": rep.r, "leibniz": "pass" if rep.passed else "fail", "pairs_checked": rep.checked,
            "witnesses": [
                {"left": [w.left.p, w.left.q], "left_generator": w.left_generator,
                 "right": [w.right.p, w.right.q], "right_generator": w.right_generator,
                 "at": [w.at.p, w.at.q], "residual": list(w.residual),
                 "residual_text": render_element(w.residual),
                 "rhs_text": render_element([a + b for a, b in zip(w.da_times_b, _signed(w))]),
                 "d_of_product_text": render_element(w.d_of_product)}
                for w in rep.witnesses
            ],
        })
    ok = log.complete
    out = {"pairing": name, "pages": pages, "descends": ok}
    if ok:
        out["stabilization_page"] = log.pairings[-1].r
        if tp is not None:
            comp = gr_compatibility(tp, einfinity_pairing(pp))
            out["gamma_compatibility"] = {"checked": comp.checked, "commutes": comp.commutes,
                                          "violations": len(comp.violations)}
            ok = ok and comp.commutes
    else:
        out["refused_at_page"] = log.refused.r
    return out, ok


def _signed(w):
    s = leibniz_sign(w.left.p)
    return [s * x for x in w.a_times_db]


def render_pairing_text(rep: dict) -> str:
    lines = [f"pairing {rep['pairing']}"]
    for pg in rep["pages"]:
        lines.append(f"page {pg['r']}: Leibniz {pg['leibniz']} ({pg['pairs_checked']} generator pairs)")
        for w in pg["witnesses"]:
            lines.append(
                f"  witness: a = gen {w['left_generator']} at ({w['left'][0]},{w['left'][1]}), "
                f"b = gen {w['right_generator']} at ({w['right'][0]},{w['right'][1]}): "
                f"d(ab) = {w['d_of_product_text']}, (da)b + (-1)^p a(db) = {w['rhs_text']}, "
                f"residual {w['residual_text']} at ({w['at'][0]},{w['at'][1]})"
            )
    if rep["descends"]:
        lines.append(f"descends to E_inf (page {rep['stabilization_page']})")
        if "gamma_compatibility" in rep:
            g = rep["gamma_compatibility"]
            lines.append(f"Gamma compatibility: {'commutes' if g['commutes'] else 'FAILS'} ({g['checked']} pairs)")
    else:
        lines.append(f"descent refused at page {rep['refused_at_page']}")
    return "\n".join(lines)


def converge_report(name: str, couple: ExactCouple) -> tuple[dict, bool]:
    v = verdict(couple)
    out = {
        "complex": name, "indexing": v.indexing,
        "stabilization": [{"p": b.p, "q": b.q, "N": n} for b, n in
                          sorted(v.stabilization.pages.items(), key=lambda kv: (kv[0].q, kv[0].p))],
        "lim1_zero": v.lim1_zero,
        "gamma": [{"p": g.p, "q": g.q, "graded": render_invariants(*g.graded),
                   "e_infinity": render_invariants(*g.e_infinity), "injective": g.injective,
                   "surjective": g.surjective, "well_defined": g.well_defined}
                  for g in sorted(v.gamma, key=lambda g: (g.q, g.p))],
        "gamma_injective": v.gamma_injective, "gamma_iso": v.gamma_iso,
        "clauses": [{"clause": c.clause, "holds": c.holds, "statement": c.statement, "detail": c.detail}
                    for c in v.clauses],
        "strong": v.strong, "route": list(v.route), "notes": list(v.notes),
    }
    return out, v.strong and v.gamma_injective


def render_converge_text(rep: dict) -> str:
    lines = [f"complex {rep['complex']} ({rep['indexing']} indexing)"]
    if rep["stabilization"]:
        lines.append("stabilization: " + ", ".join(f"N={s['N']} at ({s['p']},{s['q']})" for s in rep["stabilization"]))
    else:
        lines.append("stabilization: no nonzero entries")
    for g in rep["gamma"]:
        kind = "iso" if g["injective"] and g["surjective"] else ("injective" if g["injective"] else "NOT injective")
        lines.append(f"Gamma at ({g['p']},{g['q']}): Gr = {g['graded']} -> E_inf = {g['e_infinity']} [{kind}]")
    for c in rep["clauses"]:
        extra = f" [{c['detail']}]" if c["detail"] else ""
        lines.append(f"{c['clause']} {'holds' if c['holds'] else 'does not hold'}: {c['statement']}{extra}")
    if rep["strong"]:
        lines.append("strong convergence via " + "+".join(rep["route"]))
    else:
        lines.append("strong convergence not certified")
    for n in rep["notes"]:
        lines.append(f"note: {n}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _indexing(args, doc: Document) -> str:
    ind = args.indexing or doc.options.get("indexing", "colim")
    if ind not in CONVENTIONS:
        raise InputError(f"unknown indexing convention {ind!r}")
    return ind


def _selected(args, doc: Document) -> list[str]:
    if args.complex:
        if args.complex not in doc.complexes:
            raise InputError(f"no complex named {args.complex!r}")
        return [args.complex]
    return list(doc.complexes)


def _emit(reports: list[dict], fmt: str, render) -> str:
    if fmt == "json":
        return json.dumps(reports if len(reports) != 1 else reports[0], indent=2, sort_keys=False)
    return "\n\n".join(render(r) for r in reports)


def cmd_pages(args, doc: Document) -> tuple[str, int]:
    ind = _indexing(args, doc)
    cap = page_cap()
    reports = []
    for name in _selected(args, doc):
        couple = build_couple(doc.complexes[name], ind)
        r = args.r or doc.options.get("max_page") or global_stabilization_page(couple)
        if type(r) is not int or r < 1:
            raise InputError("max page must be a positive integer")
        rep = pages_report(name, couple, min(r, cap))
        if doc.options.get("verbosity") == "summary":
            for pg in rep["pages"]:
                pg["differentials"] = []
        reports.append(rep)
    return _emit(reports, args.format, render_pages_text), EXIT_OK


def cmd_pairing(args, doc: Document) -> tuple[str, int]:
    if not doc.pairings:
        raise InputError("document has no pairing blocks")
    ind = _indexing(args, doc)
    if ind != "colim":
        raise InputError("pairings are checked in colim indexing")
    couples = {n: build_couple(c, ind) for n, c in doc.complexes.items()}
    reports, ok = [], True
    for k, block in enumerate(doc.pairings):
        where = f"pairing {block.get('name', k)}"
        obj = build_pairing(doc, block, where, couples)
        if isinstance(obj, TowerPairing):
            pp, tp = induce_E1(obj), obj
        else:
            pp, tp = obj, None
        rep, good = pairing_report(block.get("name", str(k)), pp, tp)
        if doc.options.get("verbosity") == "summary":
            for pg in rep["pages"]:
                pg["witnesses"] = pg["witnesses"][:1]
        reports.append(rep)
        ok = ok and good
    return _emit(reports, args.format, render_pairing_text), EXIT_OK if ok else EXIT_MATH


def cmd_converge(args, doc: Document) -> tuple[str, int]:
    ind = _indexing(args, doc)
    reports, ok = [], True
    for name in _selected(args, doc):
        rep, good = converge_report(name, build_couple(doc.complexes[name], ind))
        reports.append(rep)
        ok = ok and good
    return _emit(reports, args.format, render_converge_text), EXIT_OK if ok else EXIT_MATH


COMMANDS = {"pages": cmd_pages, "pairing": cmd_pairing, "converge": cmd_converge}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="excouple", description="Spectral sequences of bounded algebraic towers.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("pages", "page tables with differentials"),
                       ("pairing", "Leibniz, descent and Gamma-compatibility report"),
                       ("converge", "convergence verdict")):
        p = sub.add_parser(name, help=text)
        p.add_argument("input", help="JSON document, or '-' for stdin")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--indexing", choices=CONVENTIONS, default=None)
        p.add_argument("--complex", default=None, help="restrict to one named complex")
        if name == "pages":
            p.add_argument("--r", type=int, default=None, help="last page to print")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if getattr(args, "r", None) is not None and args.r < 1:
            raise InputError("--r must be at least 1")
        doc = parse_document(_read(args.input))
        text, code = COMMANDS[args.command](args, doc)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExactnessError as exc:
        print(f"input error: not an exact couple: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TowerError, PairingError, CoupleError, GroupError, ConvergenceError) as exc:
        if isinstance(exc, DescentRefused):
            print(f"descent refused: {exc}", file=sys.stderr)
            return EXIT_MATH
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
