"""JSON documents for systems, certificates and Fourier elements.

Rationals are always strings ``"p/q"``; floats are rejected on input.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .conjugacy import ConjugacyCertificate, EdgeFunction, Verdict
from .fock import FourierElement
from .rationals import QComplex, q, qstr
from .spaces import FiniteSpace, IntervalSpace, PLFunc
from .wps import WPS, Branch, graph_system, matrix_system


class DocumentError(ValueError):
    """Input document problem; the message starts with the offending field path."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _rat(v, where: str) -> Fraction:
    if isinstance(v, float):
        raise DocumentError(where, "floats are not allowed; write rationals as \"p/q\" strings")
    try:
        return q(v)
    except (TypeError, ValueError) as exc:
        raise DocumentError(where, str(exc)) from None


def _need(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(where, f"missing field '{key}'")
    return doc[key]


# PL data


def _pl_from(doc, where: str, spans: list) -> PLFunc:
    if isinstance(doc, str) and doc == "identity":
        return PLFunc.identity(spans)
    if isinstance(doc, (str, int)) and not isinstance(doc, bool):
        return PLFunc.constant(spans, _rat(doc, where))
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected a constant, 'identity', or breakpoint data")
    if "pieces" in doc:
        raw = doc["pieces"]
    elif "breakpoints" in doc:
        raw = [doc]
    else:
        raise DocumentError(where, "expected 'pieces' or 'breakpoints'/'values'")
    pieces = []
    for k, pc in enumerate(raw):
        w = f"{where}.pieces[{k}]"
        xs = [_rat(x, w + ".breakpoints") for x in _need(pc, "breakpoints", w)]
        ys = [_rat(y, w + ".values") for y in _need(pc, "values", w)]
        if len(xs) != len(ys) or not xs:
            raise DocumentError(w, "breakpoints and values must be non-empty and of equal length")
        pieces.append((tuple(xs), tuple(ys)))
    try:
        return PLFunc(tuple(pieces))
    except ValueError as exc:
        raise DocumentError(where, str(exc)) from None


def _pl_to(f: PLFunc) -> dict:
    return {"pieces": [{"breakpoints": [qstr(x) for x in xs], "values": [qstr(y) for y in ys]}
                       for xs, ys in f.pieces]}


def _table_from(doc, where: str, dom, rational: bool) -> dict:
    if isinstance(doc, (str, int)) and not isinstance(doc, bool) and rational:
        c = _rat(doc, where)
        return {x: c for x in dom}
    if not isinstance(doc, list):
        raise DocumentError(where, "expected a list of [point, value] pairs")
    out = {}
    for k, pair in enumerate(doc):
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(f"{where}[{k}]", "expected a [point, value] pair")
        out[pair[0]] = _rat(pair[1], f"{where}[{k}]") if rational else pair[1]
    return out


# systems


def parse_system(doc: Any) -> WPS:
    if isinstance(doc, dict) and "matrix" in doc:
        A = doc["matrix"]
        try:
            return matrix_system([[_rat(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)]
                                  for i, row in enumerate(A)])
        except DocumentError:
            raise
        except ValueError as exc:
            raise DocumentError("matrix", str(exc)) from None
    if isinstance(doc, dict) and "graph" in doc:
        g = doc["graph"]
        pts = _need(g, "points", "graph")
        edges = [tuple(e) for e in _need(g, "edges", "graph")]
        try:
            return graph_system(pts, edges)
        except ValueError as exc:
            raise DocumentError("graph", str(exc)) from None
    sp = _need(doc, "space", "document")
    kind = _need(sp, "type", "space")
    if kind == "finite":
        try:
            space = FiniteSpace(tuple(_need(sp, "points", "space")))
        except ValueError as exc:
            raise DocumentError("space.points", str(exc)) from None
    elif kind == "intervals":
        comps = _need(sp, "components", "space")
        try:
            space = IntervalSpace(tuple((_rat(a, f"space.components[{k}]"), _rat(b, f"space.components[{k}]"))
                                        for k, (a, b) in enumerate(comps)))
        except DocumentError:
            raise
        except (ValueError, TypeError) as exc:
            raise DocumentError("space.components", str(exc)) from None
    else:
        raise DocumentError("space.type", f"unknown space type {kind!r}")
    branches = []
    for i, bd in enumerate(_need(doc, "branches", "document")):
        where = f"branches[{i}]"
        dom = _need(bd, "domain", where)
        if dom == "all":
            dom = list(space.points) if space.is_finite else list(range(len(space.components)))
        if not isinstance(dom, list):
            raise DocumentError(where + ".domain", "expected a list")
        if space.is_finite:
            mp = _table_from(_need(bd, "map", where), where + ".map", dom, rational=False)
            wt = _table_from(_need(bd, "weight", where), where + ".weight", dom, rational=True)
            branches.append(Branch(frozenset(dom), mp, wt))
        else:
            for k in dom:
                if not isinstance(k, int) or not 0 <= k < len(space.components):
                    raise DocumentError(where + ".domain",
                                        f"{k!r} is not a component index (clopen sets are unions of components)")
            spans = [space.components[k] for k in sorted(dom)]
            mp = _pl_from(_need(bd, "map", where), where + ".map", spans)
            wt = _pl_from(_need(bd, "weight", where), where + ".weight", spans)
            branches.append(Branch(frozenset(dom), mp, wt))
    try:
        return WPS(space, branches)
    except ValueError as exc:
        raise DocumentError("branches", str(exc)) from None


def dump_system(sys: WPS) -> dict:
    if sys.is_finite:
        space = {"type": "finite", "points": list(sys.space.points)}
        order = {p: k for k, p in enumerate(sys.space.points)}
        brs = []
        for br in sys.branches:
            dom = sorted(br.domain, key=order.get)
            brs.append({"domain": dom, "map": [[x, br.map[x]] for x in dom],
                        "weight": [[x, qstr(br.weight[x])] for x in dom]})
    else:
        space = {"type": "intervals", "components": [[qstr(a), qstr(b)] for a, b in sys.space.components]}
        brs = [{"domain": sorted(br.domain), "map": _pl_to(br.map), "weight": _pl_to(br.weight)}
               for br in sys.branches]
    return {"space": space, "branches": brs}


def load_system(path: str) -> WPS:
    return parse_system(read_json(path))


def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}", exc.msg) from None
    except OSError as exc:
        raise DocumentError(path, exc.strerror or str(exc)) from None


# certificates


def parse_gamma(doc, a: WPS):
    if doc is None or doc == "identity":
        if a.is_finite:
            return {x: x for x in a.space.points}
        return PLFunc.identity(a.space.components)
    if a.is_finite:
        return _table_from(doc, "gamma", a.space.points, rational=False)
    return _pl_from(doc, "gamma", list(a.space.components))


def dump_gamma(gamma):
    if isinstance(gamma, dict):
        return [[x, y] for x, y in gamma.items()]
    return _pl_to(gamma)


def parse_certificate(doc: Any, a: WPS) -> ConjugacyCertificate:
    gamma = parse_gamma(doc.get("gamma") if isinstance(doc, dict) else None, a)
    Hd = _need(doc, "H", "certificate")
    if Hd == "inverse-ratio":
        H = EdgeFunction(inverse_ratio=True)
    elif isinstance(Hd, dict) and "table" in Hd:
        tab = {}
        for k, row in enumerate(Hd["table"]):
            if not isinstance(row, list) or len(row) != 3:
                raise DocumentError(f"H.table[{k}]", "expected [range, source, value]")
            r, s = (row[0], row[1]) if a.is_finite else (_rat(row[0], f"H.table[{k}]"), _rat(row[1], f"H.table[{k}]"))
            tab[(r, s)] = _rat(row[2], f"H.table[{k}]")
        H = EdgeFunction(table=tab)
    elif isinstance(Hd, dict) and "branches" in Hd:
        hs = []
        for i, bd in enumerate(Hd["branches"]):
            spans = a.branches[i].map.spans() if i < a.d else []
            hs.append(_pl_from(bd, f"H.branches[{i}]", spans))
        H = EdgeFunction(branches=tuple(hs))
    else:
        raise DocumentError("H", "expected 'inverse-ratio', {'table': ...} or {'branches': ...}")
    C = _rat(doc.get("C", "1"), "C")
    return ConjugacyCertificate(gamma, H, C)


def dump_certificate(cert: ConjugacyCertificate) -> dict:
    if cert.H.inverse_ratio:
        H: Any = "inverse-ratio"
    elif cert.H.table is not None:
        H = {"table": [[r if not isinstance(r, Fraction) else qstr(r), s if not isinstance(s, Fraction) else qstr(s),
                        qstr(v)] for (r, s), v in sorted(cert.H.table.items(), key=repr)]}
    else:
        H = {"branches": [_pl_to(h) for h in cert.H.branches]}
    return {"gamma": dump_gamma(cert.gamma), "H": H, "C": qstr(cert.C)}


def load_certificate(path: str, a: WPS) -> ConjugacyCertificate:
    return parse_certificate(read_json(path), a)


# Fourier elements


def _scalar(v, where: str):
    if isinstance(v, list):
        if len(v) != 2:
            raise DocumentError(where, "complex values are [re, im] pairs")
        return QComplex(_rat(v[0], where), _rat(v[1], where))
    return _rat(v, where)


def parse_element(doc: Any, sys: WPS) -> FourierElement:
    N = _need(doc, "N", "element")
    if not isinstance(N, int) or N < 0:
        raise DocumentError("element.N", "expected a non-negative integer")
    coeffs: dict = {}
    for k, cd in enumerate(_need(doc, "coefficients", "element")):
        where = f"coefficients[{k}]"
        n = _need(cd, "degree", where)
        vals = {}
        for j, row in enumerate(_need(cd, "values", where)):
            if not isinstance(row, list) or len(row) != 2 or not isinstance(row[0], list):
                raise DocumentError(f"{where}.values[{j}]", "expected [path, value] with path a vertex list")
            path = tuple(row[0])
            if len(path) != n + 1:
                raise DocumentError(f"{where}.values[{j}]", f"path must list {n + 1} vertices")
            vals[path] = _scalar(row[1], f"{where}.values[{j}]")
        coeffs[n] = vals
    try:
        return FourierElement(sys, N, coeffs)
    except ValueError as exc:
        raise DocumentError("element", str(exc)) from None


def dump_element(T: FourierElement) -> dict:
    out = []
    for n in sorted(T.coeffs):
        rows = []
        for mu, v in sorted(T.coeffs[n].items(), key=repr):
            rows.append([list(mu), jsonable(v)])
        out.append({"degree": n, "values": rows})
    return {"N": T.N, "coefficients": out}


def load_element(path: str, sys: WPS) -> FourierElement:
    return parse_element(read_json(path), sys)


# output


def jsonable(obj):
    """Convert results to JSON-ready values (rationals become "p/q" strings)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return qstr(obj)
    if isinstance(obj, QComplex):
        return [qstr(obj.re), qstr(obj.im)]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        if all(isinstance(k, str) for k in obj):
            return {k: jsonable(v) for k, v in obj.items()}
        return [[jsonable(k), jsonable(v)] for k, v in obj.items()]
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, PLFunc):
        return _pl_to(obj)
    return str(obj)


def verdict_record(v: Verdict) -> dict:
    rec = {"status": v.status, "relation": v.relation, "exit_code": v.exit_code, "reason": v.reason}
    if v.witness is not None:
        rec["witness"] = jsonable(v.witness)
    if v.certificate is not None:
        rec["certificate"] = dump_certificate(v.certificate)
    if v.depth is not None:
        rec["depth"] = v.depth
    if v.details:
        rec["details"] = jsonable(v.details)
    return rec
