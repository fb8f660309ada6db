"""Reading and writing presentation files.

A presentation file is a JSON document::

    {
      "format": "kbeta-presentation/1",
      "name": "P33_p3",
      "prime": 3,
      "generators": [{"name": "y", "degree": 1}, ...],
      "relations": [{"label": "yy'=0", "poly": [[1, {"y": 1, "y'": 1}]]}, ...],
      "beta": {"y": [[1, {"x": 1}]], "x": [], ...},
      "p1": {"X": [[1, {"x": 2, "X": 1}], [1, {"y": 1, "z": 1}]], ...},
      "higher_bocksteins": [{"page": 2, "gen": "u", "poly": [...]}],
      "meta": {...}
    }

A polynomial is a list of ``[coeff, {generator: exponent}]`` pairs with
coefficients in ``[1, p)``; ``[]`` is zero.  Each relation means
``poly = 0``.  ``meta`` is carried through untouched (audit notes, recorded
defaults, scalar choices, advisory claims).
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError
from .gca import FreeAlgebra, GeneratorInfo, HigherBockstein, Polynomial, Presentation, Relation

FORMAT = "kbeta-presentation/1"
_WIDTH = 100


def _is_odd_prime(p) -> bool:
    return isinstance(p, int) and p >= 3 and p % 2 == 1 and all(p % q for q in range(3, int(p**0.5) + 1, 2))


def parse_poly(ring: FreeAlgebra, data, where: str) -> Polynomial:
    if not isinstance(data, list):
        raise ParseError("polynomial must be a list of [coeff, monomial] pairs", where)
    terms = {}
    for k, term in enumerate(data):
        loc = f"{where}[{k}]"
        if not (isinstance(term, list) and len(term) == 2 and isinstance(term[1], dict)):
            raise ParseError("term must be [coeff, {gen: exp}]", loc)
        c, mono = term
        if not isinstance(c, int) or not 1 <= c < ring.p:
            raise ParseError(f"coefficient {c!r} outside [1, {ring.p})", loc)
        exps = [0] * ring.ngens
        for name, e in mono.items():
            if name not in ring.index:
                raise ParseError(f"undeclared generator {name!r}", loc)
            if not isinstance(e, int) or e < 1:
                raise ParseError(f"exponent of {name} must be a positive integer", loc)
            i = ring.index[name]
            if ring.odd[i] and e > 1:
                raise ParseError(f"odd generator {name} squared", loc)
            exps[i] = e
        m = tuple(exps)
        if m in terms:
            raise ParseError(f"repeated monomial {ring.format_monomial(m)}", loc)
        terms[m] = c
    return Polynomial(ring, terms)


def from_dict(doc: dict, source: str = "<presentation>") -> Presentation:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", source)
    p = doc.get("prime")
    if not _is_odd_prime(p):
        raise ParseError(f"prime must be an odd prime, got {p!r}", f"{source}: prime")
    gens = []
    for k, g in enumerate(doc.get("generators", [])):
        loc = f"{source}: generators[{k}]"
        try:
            name, degree = g["name"], g["degree"]
        except (KeyError, TypeError):
            raise ParseError("generator needs name and degree", loc) from None
        if not isinstance(degree, int) or degree < 1:
            raise ParseError(f"degree of {name} must be >= 1", loc)
        gens.append(GeneratorInfo(name, degree))
    try:
        ring = FreeAlgebra(p, gens)
    except ValueError as exc:
        raise ParseError(str(exc), f"{source}: generators") from None

    relations = []
    for k, r in enumerate(doc.get("relations", [])):
        label = r.get("label", f"#{k}") if isinstance(r, dict) else f"#{k}"
        loc = f"{source}: relations[{k}] ({label})"
        if not isinstance(r, dict) or "poly" not in r:
            raise ParseError("relation needs a poly", loc)
        poly = parse_poly(ring, r["poly"], loc)
        if poly.is_zero():
            raise ParseError("relation is zero", loc)
        if not poly.is_homogeneous():
            raise ParseError(f"relation {label} is not homogeneous", loc)
        relations.append(Relation(label, poly))

    def table(name, shift):
        out = {}
        for gname, data in (doc.get(name) or {}).items():
            loc = f"{source}: {name}[{gname}]"
            if gname not in ring.index:
                raise ParseError(f"undeclared generator {gname!r}", loc)
            poly = parse_poly(ring, data, loc)
            want = ring.degrees[ring.index[gname]] + shift
            if not poly.is_homogeneous() or (poly.degree is not None and poly.degree != want):
                raise ParseError(f"value must have degree {want}", loc)
            out[gname] = poly
        return out

    beta = table("beta", 1)
    p1 = table("p1", 2 * (p - 1))
    hbs = []
    for k, e in enumerate(doc.get("higher_bocksteins", [])):
        loc = f"{source}: higher_bocksteins[{k}]"
        try:
            page, gname, data = e["page"], e["gen"], e["poly"]
        except (KeyError, TypeError):
            raise ParseError("entry needs page, gen, poly", loc) from None
        if gname not in ring.index:
            raise ParseError(f"undeclared generator {gname!r}", loc)
        if not isinstance(page, int) or page < 2:
            raise ParseError("page must be an integer >= 2", loc)
        poly = parse_poly(ring, data, loc)
        want = ring.degrees[ring.index[gname]] + 1
        if not poly.is_homogeneous() or (poly.degree is not None and poly.degree != want):
            raise ParseError(f"value must have degree {want}", loc)
        hbs.append(HigherBockstein(page, gname, poly))
    meta = dict(doc.get("meta") or {})
    meta.setdefault("name", doc.get("name"))
    return Presentation(ring, relations, beta, p1, hbs, meta)


def loads(text: str, source: str = "<presentation>") -> Presentation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{source}: line {exc.lineno} col {exc.colno}") from None
    return from_dict(doc, source)


def load(path) -> Presentation:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))


def to_dict(pres: Presentation) -> dict:
    ring = pres.ring
    meta = dict(pres.meta)
    name = meta.pop("name", None)
    doc = {"format": FORMAT, "name": name, "prime": ring.p,
           "generators": [{"name": g.name, "degree": g.degree} for g in ring.generators],
           "relations": [{"label": r.label, "poly": r.poly.to_terms()} for r in pres.relations],
           "beta": {n: pres.beta[n].to_terms() for n in ring.names if n in pres.beta},
           "p1": {n: pres.p1[n].to_terms() for n in ring.names if n in pres.p1},
           "higher_bocksteins": [{"page": h.page, "gen": h.gen, "poly": h.value.to_terms()}
                                 for h in pres.higher_bocksteins],
           "meta": meta}
    return doc


def _emit(obj, indent: int) -> str:
    flat = json.dumps(obj, ensure_ascii=False)
    if len(flat) + indent <= _WIDTH or not isinstance(obj, (dict, list)) or not obj:
        return flat
    pad = " " * (indent + 2)
    if isinstance(obj, dict):
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_emit(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    items = [pad + _emit(v, indent + 2) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"


def dumps(pres: Presentation) -> str:
    return _emit(to_dict(pres), 0) + "\n"


def dump(pres: Presentation, path) -> None:
    Path(path).write_text(dumps(pres), encoding="utf-8")
