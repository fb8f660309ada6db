"""Generate the shipped presentation files.

Relations are written as text in the ring's expression syntax and parsed
here; the JSON files under ``data/`` are the output of this module and are
what :mod:`kbeta.catalog` loads.  Run ``python -m kbeta.catalog_build`` to
regenerate them.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from . import presfile
from .gca import FreeAlgebra, GeneratorInfo, HigherBockstein, Presentation, Relation

DATA_DIR = Path(__file__).with_name("data")

SHIPPED = (
    [("P33", 3, None, None)]
    + [("Pp3", 5, None, None)]
    + [("Ppn", p, n, None) for p in (3, 5) for n in (4, 5, 6)]
    + [("Tower", p, None, i) for p in (3, 5) for i in (1, 2, 3)]
    + [("Cyclic", p, None, i) for p in (3, 5) for i in (1, 2, 3)]
)


def file_stem(family: str, p: int, n: int | None = None, i: int | None = None) -> str:
    stem = f"{family}_p{p}"
    if n is not None:
        stem += f"_n{n}"
    if i is not None:
        stem += f"_i{i}"
    return stem


class _Builder:
    def __init__(self, name, p, gens):
        self.ring = FreeAlgebra(p, [GeneratorInfo(g, d) for g, d in gens])
        self.name = name
        self.relations = []
        self.beta = {}
        self.p1 = {}
        self.hbs = []
        self.meta = {"beta_defaults": [], "notes": []}
        self.subs = {}

    def expand(self, text):
        for k, v in self.subs.items():
            text = text.replace(k, f"({v})")
        return text

    def poly(self, text):
        return self.ring.parse(self.expand(text))

    def rel(self, text, label=None):
        lhs, rhs = text.split("=")
        poly = self.poly(lhs) - self.poly(rhs)
        self.relations.append(Relation(label or text, poly))

    def set_beta(self, gen, text):
        self.beta[gen] = self.poly(text) if text != "0" else self.ring.zero()

    def default_beta(self, *gens):
        for g in gens:
            self.beta[g] = self.ring.zero()
            self.meta["beta_defaults"].append(g)

    def claim(self, label, op, element, value="0"):
        self.meta.setdefault("claims", []).append(
            {"label": label, "op": op, "element": self.poly(element).to_terms(),
             "value": self.poly(value).to_terms() if value != "0" else []})

    def note(self, text):
        self.meta["notes"].append(text)

    def build(self) -> Presentation:
        meta = dict(self.meta)
        meta["name"] = self.name
        beta = {n: self.beta[n] for n in self.ring.names if n in self.beta}
        return Presentation(self.ring, self.relations, beta, self.p1, self.hbs, meta)


XP = "x'"


def _power(base: str, e: int) -> str:
    return base if e == 1 else f"{base}^{{{e}}}"


def p33() -> Presentation:
    b = _Builder("P33_p3", 3, [("y", 1), ("y'", 1), ("x", 2), ("x'", 2), ("Y", 2), ("Y'", 2),
                              ("X", 3), ("X'", 3), ("z", 6)])
    for r in ["yy'=0", "xy'=x'y", "yY=xy'", "y'Y'=xy'", "yY'=y'Y",
              "YY'=xx'", "Y^2=xY'", "Y'^2=x'Y",
              "yX=xY-xx'", "y'X'=x'Y'-xx'", "Xy'=x'Y-xY'", "X'y=xY'-x'Y",
              "XY=x'X", "X'Y'=xX'", "XY'=-X'Y", "xX'=-x'X",
              "XX'=0", "x(xY'+x'Y)=-xx'^2", "x'(xY'+x'Y)=-x'x^2",
              "x^3y'-x'^3y=0", "x^3x'-x'^3x=0", "x^3Y'+x'^3Y=-x^2x'^2", "x^3X'+x'^3X=0"]:
        b.rel(r)
    b.note("the chained relation yY=y'Y'=xy' is split into yY=xy' and y'Y'=xy'")
    b.note("Y^2 of an even generator is a genuine square; it is not an odd-square condition")
    for g, v in [("y", "x"), ("y'", "x'"), ("Y", "X"), ("Y'", "X'")]:
        b.set_beta(g, v)
    b.default_beta("x", "x'", "X", "X'", "z")
    b.note("beta is 0 on x, x' (they are Bocksteins and beta^2=0) and on X, X' for the same "
           "reason; beta(z)=0 since z is the top Chern class of a faithful representation")
    b.p1 = {"X": b.poly("x^2X+zy"), "X'": b.poly("x'^2X'-zy'"), "z": b.poly("z(xY'-x'Y-x^2-x'^2)")}
    b.note("P1(z)=z*c_2 with c_2=xY'-x'Y-x^2-x'^2 substituted")
    b.meta["weak_generators"] = ["y", "y'"]
    return b.build()


def pp3(p: int = 5, lam: int = 1, mu: int = 1) -> Presentation:
    if p < 5:
        raise ValueError("the p>=5 family needs p >= 5")
    ds = list(range(4, p + 1))
    cs = list(range(4, p))
    gens = [("y", 1), ("y'", 1), ("x", 2), ("x'", 2), ("Y", 2), ("Y'", 2), ("X", 3), ("X'", 3)]
    gens += [(f"d_{i}", 2 * i - 1) for i in ds] + [(f"c_{i}", 2 * i) for i in cs] + [("z", 2 * p)]
    b = _Builder(file_stem("Pp3", p), p, gens)
    b.subs = {"c_2": f"{lam}(xY'+x'Y)", "c_3": f"{mu}XX'"}
    b.meta["scalars"] = {"lambda": lam, "mu": mu}
    b.note("c_2 and c_3 are not generators; they stand for lambda(xY'+x'Y) and mu*XX' with "
           "lambda and mu recorded under scalars")
    q, q1 = p - 1, p - 2
    P = _power
    rels = ["yy'=0", "xy'=x'y", "yY=0", "y'Y'=0", "yY'=y'Y",
            "Y^2=0", "Y'^2=0", "YY'=0", "yX=xY", "y'X'=x'Y'",
            "Xy'=2xY'+x'Y", "X'y=2x'Y+xY'",
            "XY=0", "X'Y'=0", "XY'=-X'Y", "xX'=-x'X",
            "x(xY'+x'Y)=0", "x'(xY'+x'Y)=0",
            f"{P('x', p)}y'-{P(XP, p)}y=0",
            f"{P('x', p)}x'-{P(XP, p)}x=0",
            f"{P('x', p)}Y'+{P(XP, p)}Y=0",
            f"{P('x', p)}X'+{P(XP, p)}X=0"]
    for r in rels:
        b.rel(r)
    b.note("x^px'=x'^px=0 is read as x^px'-x'^px=0; x^px' is not nilpotent (it restricts "
           "nontrivially to an elementary abelian subgroup), so it cannot vanish")
    xs, xs1 = P("x", q), P("x'", q)
    for i in cs:
        top = i == p - 1
        cases = [("y", f"-{xs}y"), ("y'", f"-{xs1}y'"), ("x", f"-{P('x', p)}"), ("x'", f"-{P(XP, p)}"),
                 ("Y", f"-{xs}Y"), ("Y'", f"-{xs1}Y'"), ("X", f"-{xs}X"), ("X'", f"-{xs1}X'")]
        for g, v in cases:
            b.rel(f"c_{i}{g}={v if top else '0'}")
    b.note("c_{p-1}X'=-x'^{p-1}X' replaces the printed -x'^{p-1}X: only the primed form is "
           "closed under beta given d_{p-1}X'=-x'^{p-1}Y'")
    for i in cs:
        for j in cs:
            if j < i:
                continue
            if i + j < 2 * p - 2:
                b.rel(f"c_{i}c_{j}=0")
            else:
                b.rel(f"c_{i}c_{j}={P('x', 2 * p - 2)}+{P(XP, 2 * p - 2)}-{xs}{xs1}")
    for i in ds:
        b.rel(f"d_{i}y={'0' if i < p else f'-{xs}Y'}")
        # sign fixed by beta-closure and by the group's cohomology dimensions
        b.rel(f"d_{i}y'=" + ("0" if i < p else f"{xs1}Y'"))
        vx = "0" if i < p - 1 else (f"-{xs}y" if i == p - 1 else f"{xs}X")
        vx1 = "0" if i < p - 1 else (f"-{xs1}y'" if i == p - 1 else f"-{xs1}X'")
        b.rel(f"d_{i}x={vx}")
        b.rel(f"d_{i}x'={vx1}")
        b.rel(f"d_{i}Y=0")
        b.rel(f"d_{i}Y'=0")
        b.rel(f"d_{i}X={f'-{xs}Y' if i == p - 1 else '0'}")
        b.rel(f"d_{i}X'=" + (f"-{xs1}Y'" if i == p - 1 else "0"))
    b.note("d_iy and d_iy' share one case bracket; the condition column (0 for i<p, value for "
           "i=p) is applied to both.  Likewise d_ix, d_iX use the conditions printed beside "
           "d_ix', d_iX'")
    b.note("d_py'=x'^{p-1}Y' is taken with a plus sign: the printed minus breaks beta-closure "
           "(beta of the relation leaves 2x'^{p-1}X') and gives wrong dimensions from degree 12")
    for i in ds:
        for j in ds:
            if i <= j:
                continue  # odd generators: only one ordering per pair, squares vanish
            if i == p and j == p - 1:
                b.rel(f"d_{i}d_{j}={P('x', 2 * p - 3)}Y-{P(XP, 2 * p - 3)}Y'+{xs}{P(XP, q1)}Y'")
            else:
                b.rel(f"d_{i}d_{j}=0")
    b.note("d_pd_{p-1} takes -x'^{2p-3}Y' and d_{p-1}c_{p-1} takes +x^{2p-3}y: the printed signs "
           "break beta-closure from degree 16 and dimensions from degree 18")
    b.note("d_id_j=0 'for i<p' is read on unordered pairs other than {p, p-1}; taken literally "
           "it would give d_{p-1}d_p=0 and hence d_pd_{p-1}=0 by graded commutativity")
    for i in ds:
        for j in cs:
            if i == p - 1 and j == p - 1:
                v = f"{P('x', 2 * p - 3)}y+{P(XP, 2 * p - 3)}y'-{xs}{P(XP, q1)}y'"
            elif i == p and j == p - 1:
                v = f"-{P('x', 2 * p - 3)}X+{P(XP, 2 * p - 3)}X'-{xs}{P(XP, q1)}X'"
            else:
                v = "0"
            b.rel(f"d_{i}c_{j}={v}")
    for g, v in [("y", "x"), ("y'", "x'"), ("Y", "X"), ("Y'", "X'")]:
        b.set_beta(g, v)
    for i in ds:
        b.set_beta(f"d_{i}", f"c_{i}" if i < p else "0")
    b.default_beta("x", "x'", "X", "X'", *[f"c_{i}" for i in cs], "z")
    ctop = f"c_{p - 1}"
    b.p1 = {"X": b.poly(f"{xs}X+zy"), "X'": b.poly(f"{xs1}X'-zy'")}
    for i in cs:
        if i < p - 1:
            b.p1[f"c_{i}"] = b.poly(f"{i}zc_{i - 1}")
        else:
            b.p1[f"c_{i}"] = b.poly(f"-zc_{p - 2}+{P('x', 2 * p - 2)}+{P(XP, 2 * p - 2)}-{xs}{xs1}")
    b.p1["z"] = b.poly(f"z{ctop}")
    b.note("P1 on d_i is not given and stays undefined")
    # consequences of the c_i rules for the non-generator classes c_2, c_3
    for name in ("c_2", "c_3"):
        for g in ("y", "y'", "x", "x'", "Y", "Y'", "X", "X'"):
            b.claim(f"{name}{g}=0", "eq", f"{name}{g}")
        for i in ds:
            b.claim(f"d_{i}{name}=0", "eq", f"d_{i}{name}")
    for i, j in [(2, 2), (2, 3), (3, 3)] + [(k, c) for k in (2, 3) for c in cs]:
        if i + j < 2 * p - 2:
            b.claim(f"c_{i}c_{j}=0", "eq", f"c_{i}c_{j}")
    b.claim("P1(c_3)=3zc_2", "P1", "c_3", "3zc_2")
    b.claim("beta(c_2)=0", "beta", "c_2")
    b.meta["weak_generators"] = ["y", "y'"]
    return b.build()


def ppn(p: int, n: int) -> Presentation:
    if n < 4:
        raise ValueError("n must be >= 4")
    cs = list(range(2, p))
    gens = [("u", 1), ("y", 1), ("y'", 1), ("x", 2), ("x'", 2)]
    gens += [(f"c_{i}", 2 * i) for i in cs] + [("z", 2 * p)]
    b = _Builder(file_stem("Ppn", p, n), p, gens)
    b.subs = {"c_1": "y'y"}
    P = _power
    xp, xp1 = P("x", p), P("x'", p)
    xs, xs1 = P("x", p - 1), P("x'", p - 1)
    for r in ["xy'=x'y", f"{xp}y'={xp1}y", f"{xp}x'={xp1}x"]:
        b.rel(r)
    for i in cs:
        top = i == p - 1
        for g, v in [("y", f"-{xs}y"), ("y'", f"-{xs1}y'"), ("x", f"-{xp}"), ("x'", f"-{xp1}")]:
            b.rel(f"c_{i}{g}={v if top else '0'}")
    for i in cs:
        for j in cs:
            if j < i:
                continue
            if i + j < 2 * p - 2:
                b.rel(f"c_{i}c_{j}=0")
            else:
                b.rel(f"c_{i}c_{j}={P('x', 2 * p - 2)}+{P(XP, 2 * p - 2)}-{xs}{xs1}")
    if p == 3:
        b.note("at p=3 the only c-generator is c_2=c_{p-1}, so every c_i relation takes its "
               "i=p-1 case")
    b.set_beta("y", "x")
    b.set_beta("y'", "x'")
    if n == 4:
        b.set_beta("u", "y'y")
    else:
        b.set_beta("u", "0")
        b.hbs.append(HigherBockstein(n - 3, "u", b.poly("yy'")))
    b.default_beta("x", "x'", *[f"c_{i}" for i in cs], "z")
    b.p1 = {}
    for i in cs:
        if i < p - 1:
            b.p1[f"c_{i}"] = b.poly(f"{i}zc_{i - 1}")
        else:
            b.p1[f"c_{i}"] = b.poly(f"-zc_{p - 2}+{P('x', 2 * p - 2)}+{P(XP, 2 * p - 2)}-{xs}{xs1}")
    b.p1["z"] = b.poly(f"zc_{p - 1}")
    b.note("c_1 means y'y")
    if n == 4:
        b.note("beta(u)=y'y=-yy'; the higher Bockstein for n>4 is stated as yy'")
    b.meta["weak_generators"] = ["y", "y'"]
    return b.build()


def tower(p: int, i: int) -> Presentation:
    u, v = f"u_{i}", f"v_{i}"
    b = _Builder(file_stem("Tower", p, None, i), p,
                 [(u, 1), ("y", 1), ("y'", 1), (v, 2), ("x", 2), ("x'", 2)])
    b.set_beta("y", "x")
    b.set_beta("y'", "x'")
    if i == 1:
        b.set_beta(u, v)
    else:
        b.default_beta(u)
        b.hbs.append(HigherBockstein(i, u, b.poly(v)))
    b.default_beta(v, "x", "x'")
    b.note("cohomology of B(Z/p^i) x BZ/p x BZ/p; beta_i(u_i)=v_i, every other higher "
           "Bockstein on generators is 0")
    return b.build()


def cyclic(p: int, i: int) -> Presentation:
    b = _Builder(file_stem("Cyclic", p, None, i), p, [("u", 1), ("v", 2)])
    if i == 1:
        b.set_beta("u", "v")
    else:
        b.default_beta("u")
        b.hbs.append(HigherBockstein(i, "u", b.poly("v")))
    b.default_beta("v")
    b.note("cohomology of B(Z/p^i); beta_i(u)=v")
    return b.build()


def build(family: str, p: int, n: int | None = None, i: int | None = None) -> Presentation:
    if family == "P33":
        return p33()
    if family == "Pp3":
        return pp3(p)
    if family == "Ppn":
        return ppn(p, n)
    if family == "Tower":
        return tower(p, i)
    if family == "Cyclic":
        return cyclic(p, i)
    raise ValueError(f"unknown family {family}")


def write_all(out_dir: Path = DATA_DIR) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for family, p, n, i in SHIPPED:
        path = out_dir / f"{file_stem(family, p, n, i)}.json"
        presfile.dump(build(family, p, n, i), path)
        paths.append(path)
    return paths


def main(argv=None):
    ap = argparse.ArgumentParser(description="regenerate the shipped presentation files")
    ap.add_argument("--out", type=Path, default=DATA_DIR)
    args = ap.parse_args(argv)
    for path in write_all(args.out):
        print(path)


if __name__ == "__main__":
    main()
