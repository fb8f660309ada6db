"""Shipped presentations: keys, loading and validation."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from . import presfile
from .catalog_build import DATA_DIR, file_stem
from .errors import ParseError, UnsupportedKey
from .gca import GradedQuotient, Presentation
from .ops import CheckEntry, check_closure

ENV_DATA_DIR = "KBETA_DATA_DIR"
FAMILIES = ("P33", "Pp3", "Ppn", "Tower", "Cyclic")
SUPPORTED_PRIMES = (3, 5)
MAX_N = 6
MAX_I = 3


@dataclass(frozen=True)
class CatalogKey:
    family: str
    p: int
    n: int | None = None
    i: int | None = None

    def __post_init__(self):
        f, p, n, i = self.family, self.p, self.n, self.i
        if f not in FAMILIES:
            raise UnsupportedKey(f"unknown family {f!r}; expected one of {', '.join(FAMILIES)}")
        if p not in SUPPORTED_PRIMES:
            raise UnsupportedKey(f"p={p} not shipped (supported: {SUPPORTED_PRIMES})")
        if f == "P33":
            if p != 3 or n not in (None, 3) or i is not None:
                raise UnsupportedKey("P33 requires p=3 and takes no n or i")
            object.__setattr__(self, "n", None)
        elif f == "Pp3":
            if p < 5 or n not in (None, 3) or i is not None:
                raise UnsupportedKey("Pp3 requires p>=5 and takes no n or i")
            object.__setattr__(self, "n", None)
        elif f == "Ppn":
            if n is None or not 4 <= n <= MAX_N or i is not None:
                raise UnsupportedKey(f"Ppn requires 4 <= n <= {MAX_N}")
        else:
            if i is None or not 1 <= i <= MAX_I or n is not None:
                raise UnsupportedKey(f"{f} requires 1 <= i <= {MAX_I}")

    @property
    def stem(self) -> str:
        return file_stem(self.family, self.p, self.n, self.i)

    def __str__(self):
        return self.stem


def key_for(family: str, p: int, n: int | None = None, i: int | None = None) -> CatalogKey:
    """Build a key, accepting n=3 as an alias for the P33/Pp3 families."""
    if family == "Ppn" and n == 3:
        family = "P33" if p == 3 else "Pp3"
        n = None
    return CatalogKey(family, p, n, i)


def default_cap(key_or_p) -> int:
    p = key_or_p.p if isinstance(key_or_p, CatalogKey) else key_or_p
    return 8 if p == 3 else 2 * p + 4


def data_dir(override=None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(ENV_DATA_DIR)
    return Path(env) if env else DATA_DIR


def path_for(key: CatalogKey, directory=None) -> Path:
    return data_dir(directory) / f"{key.stem}.json"


@lru_cache(maxsize=None)
def _load_path(path: str, mtime: float) -> Presentation:
    return presfile.load(path)


def load(key: CatalogKey, directory=None) -> Presentation:
    path = path_for(key, directory)
    if not path.exists():
        raise UnsupportedKey(f"no data file for {key} at {path}")
    return _load_path(str(path), path.stat().st_mtime)


def load_external(path) -> Presentation:
    return presfile.load(path)


@dataclass
class ValidationReport:
    key: str
    cap: int
    entries: list = field(default_factory=list)
    hilbert: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e.status == "fail" and not e.advisory]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        out = {}
        for e in self.entries:
            k = f"{e.status}{' (advisory)' if e.advisory else ''}"
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))


def structural_checks(pres: Presentation) -> list:
    """Checks the parser already enforces, repeated on the in-memory object
    so presentations built in code get the same scrutiny."""
    ring = pres.ring
    out = []

    def add(name, ok, detail=""):
        out.append(CheckEntry("structure", name, "pass" if ok else "fail", None, "" if ok else detail))

    bad = [r.label for r in pres.relations if r.poly.is_zero() or not r.poly.is_homogeneous()]
    add("relations homogeneous and nonzero", not bad, ", ".join(bad))
    odd_sq = [r.label for r in pres.relations
              if any(e > 1 and ring.odd[k] for m in r.poly.terms for k, e in enumerate(m))]
    add("no odd squares", not odd_sq, ", ".join(odd_sq))
    wrong = []
    for name, table, shift in (("beta", pres.beta, 1), ("P1", pres.p1, 2 * (pres.p - 1))):
        for g, v in table.items():
            want = ring.degrees[ring.index[g]] + shift
            if not v.is_zero() and v.degree != want:
                wrong.append(f"{name}({g})")
    for hb in pres.higher_bocksteins:
        if not hb.value.is_zero() and hb.value.degree != ring.degrees[ring.index[hb.gen]] + 1:
            wrong.append(f"beta_{hb.page}({hb.gen})")
    add("table degrees", not wrong, ", ".join(wrong))
    missing = [g for g in ring.names if g not in pres.beta]
    add("beta defined on every generator", not missing, ", ".join(missing))
    return out


def family_checks(key: CatalogKey, pres: Presentation) -> list:
    out = []
    if key.family == "Ppn":
        beta_u = pres.beta.get("u")
        hbs = [hb for hb in pres.higher_bocksteins if hb.gen == "u"]
        if key.n == 4:
            ok = beta_u is not None and beta_u == pres.parse("y'y") and not hbs
        else:
            ok = (beta_u is not None and beta_u.is_zero() and len(hbs) == 1
                  and hbs[0].page == key.n - 3 and hbs[0].value == pres.parse("yy'"))
        out.append(CheckEntry("structure", "Bockstein on u matches n", "pass" if ok else "fail"))
    return out


def validate(key, cap: int | None = None, pres: Presentation | None = None,
             directory=None) -> ValidationReport:
    """Structural checks, closure under beta and P^1, and beta o beta = 0."""
    if pres is None:
        pres = load(key, directory)
    if cap is None:
        cap = default_cap(key if isinstance(key, CatalogKey) else pres.p)
    report = ValidationReport(str(key), cap)
    report.entries += structural_checks(pres)
    if isinstance(key, CatalogKey):
        report.entries += family_checks(key, pres)
    Q = GradedQuotient(pres, cap)
    report.entries += check_closure(Q, cap).entries
    report.hilbert = Q.hilbert(cap)
    return report


__all__ = ["CatalogKey", "ParseError", "UnsupportedKey", "default_cap", "key_for", "load",
           "load_external", "validate", "ValidationReport"]
