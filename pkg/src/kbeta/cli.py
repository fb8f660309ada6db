"""Command-line front end: one check suite per invocation.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager

from . import __version__
from .bss import check_axiom_b, run_pages, tower_report
from .catalog import CatalogKey, default_cap, key_for, load, load_external, validate
from .errors import KBetaError, SearchBudgetExceeded
from .gca import GradedQuotient
from .oracle import DEFAULT_BOUND, DEFAULT_HOM_CAP, betti, compare_dims, group_parameters
from .rigidity import DEFAULT_BUDGET, forced_steps, rigidity_theorem, scan_cap, weak_generation_check

COMMANDS = ("validate", "hilbert", "betti", "compare", "rigidity", "weakgen", "bss", "tower")


class UsageError(Exception):
    pass


class Report:
    def __init__(self, command: str, key: str, params: dict, timings: bool):
        self.doc = {"command": command, "key": key, "parameters": params, "checks": [], "passed": True,
                    "solutions": [], "dims": [], "timings_ms": {}}
        self._timings = timings

    def check(self, name: str, status: str, **extra):
        entry = {"check": name, "status": status}
        entry.update({k: v for k, v in extra.items() if v not in (None, "")})
        self.doc["checks"].append(entry)

    @contextmanager
    def timed(self, label: str):
        t0 = time.perf_counter()
        yield
        if self._timings:
            self.doc["timings_ms"][label] = round((time.perf_counter() - t0) * 1000, 1)

    def finish(self) -> dict:
        self.doc["passed"] = not any(c["status"] == "fail" for c in self.doc["checks"])
        return self.doc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kbeta", description="Check mod-p cohomology presentations with "
                                 "Steenrod and Bockstein structure.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--family", choices=("P33", "Pp3", "Ppn", "Tower", "Cyclic"))
    ap.add_argument("--p", type=int)
    ap.add_argument("--n", type=int)
    ap.add_argument("--i", type=int)
    ap.add_argument("--file", help="presentation file to use instead of the catalog entry")
    ap.add_argument("--cap", type=int, help="degree cap")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node limit")
    ap.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="largest group order for betti/compare")
    ap.add_argument("--full", action="store_true", help="run the full rigidity scan for p >= 5")
    ap.add_argument("--json", action="store_true", help="print one JSON document")
    ap.add_argument("--data-dir", help="directory of presentation files")
    ap.add_argument("--no-timings", action="store_true", help="omit timings so reports are byte-stable")
    return ap


def _key(args) -> CatalogKey | None:
    if args.family is None:
        if args.file is None:
            raise UsageError("--family and --p (or --file) are required")
        return None
    if args.p is None:
        raise UsageError("--p is required with --family")
    return key_for(args.family, args.p, args.n, args.i)


def _pres(args, key):
    if args.file:
        return load_external(args.file)
    return load(key, args.data_dir)


def _cap(args, key, pres, default=None) -> int:
    if args.cap is not None:
        if args.cap < 1:
            raise UsageError("--cap must be at least 1")
        return args.cap
    if default is not None:
        return default
    return default_cap(key) if key is not None else default_cap(pres.p)


def cmd_validate(args, key, rep: Report):
    pres = _pres(args, key)
    cap = _cap(args, key, pres)
    with rep.timed("validate"):
        v = validate(key if key is not None else args.file, cap, pres)
    for e in v.entries:
        d = e.to_dict()
        rep.check(d.pop("check"), "advisory-fail" if e.status == "fail" and e.advisory else e.status,
                  **{k: d[k] for k in ("subject", "degree", "detail") if k in d})
    rep.doc["dims"] = [{"name": "hilbert", "values": v.hilbert}]
    rep.doc["parameters"]["cap"] = cap


def cmd_hilbert(args, key, rep: Report):
    pres = _pres(args, key)
    cap = _cap(args, key, pres)
    with rep.timed("hilbert"):
        h = GradedQuotient(pres, cap).hilbert(cap)
    rep.doc["dims"] = [{"name": "hilbert", "values": h}]
    rep.doc["parameters"]["cap"] = cap


def _group(args, key) -> tuple[int, int]:
    if key is None:
        if args.p is None or args.n is None:
            raise UsageError("a group needs --family, or --p and --n")
        return args.p, args.n
    try:
        return group_parameters(key)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_betti(args, key, rep: Report):
    p, n = _group(args, key)
    cap = args.cap if args.cap is not None else DEFAULT_HOM_CAP
    with rep.timed("resolution"):
        b = betti(p, n, cap, args.bound)
    rep.doc["dims"] = [{"name": f"betti P({p},{n})", "values": b}]
    rep.doc["parameters"]["cap"] = cap


def cmd_compare(args, key, rep: Report):
    p, n = _group(args, key)
    pres = _pres(args, key)
    cap = args.cap if args.cap is not None else DEFAULT_HOM_CAP
    with rep.timed("resolution"):
        b = betti(p, n, cap, args.bound)
    with rep.timed("hilbert"):
        h = GradedQuotient(pres, cap).hilbert(cap)
    c = compare_dims(rep.doc["key"], b, h)
    rep.doc["dims"] = [{"name": f"betti P({p},{n})", "values": b}, {"name": "hilbert", "values": h}]
    rep.check("dimensions agree", "pass" if c.passed else "fail",
              degree=c.first_mismatch,
              detail=None if c.passed else f"betti {b[c.first_mismatch]} vs hilbert {h[c.first_mismatch]}")
    rep.doc["parameters"]["cap"] = cap


def cmd_rigidity(args, key, rep: Report):
    pres = _pres(args, key)
    full = pres.p < 5 or args.full
    cap = _cap(args, key, pres, scan_cap(pres.p) if full else None)
    rep.doc["parameters"]["cap"] = cap
    if not full:
        with rep.timed("forced steps"):
            f = forced_steps(pres, cap, args.budget)
        rep.check("phi(x)=x, phi(x')=x' forced by beta", "pass" if f.x_fixed else "fail",
                  detail="x -> {}, x' -> {}".format(f.beta_forced.get("x"), f.beta_forced.get("x'")))
        rep.check("phi(Y)=cY, phi(Y')=dY'", "pass" if f.y_scalar else "fail",
                  detail=f"Y -> {f.y_images}; Y' -> {f.y1_images}")
        rep.check(f"coefficient of d_{pres.p - 1} forced to 1", "pass" if f.top_forced_to_one else "fail",
                  detail=f"{f.branches} branches")
        rep.doc["forced_steps"] = f.to_dict()
        return
    try:
        with rep.timed("search"):
            v = rigidity_theorem(key, cap, args.budget, pres)
    except SearchBudgetExceeded as exc:
        rep.check("search", "fail", detail=str(exc))
        return
    rep.doc["solutions"] = [e.to_dict() for e in v.solutions]
    rep.check("solutions exist", "pass" if v.solutions else "fail", detail=f"{len(v.solutions)} found")
    bad = [k for k, ok in enumerate(v.surjective) if not ok]
    rep.check(f"all surjective through {cap}", "pass" if not bad else "fail",
              detail=f"solution {bad[0]} is not surjective" if bad else None)
    for s in v.skipped:
        rep.check("constraint", "skipped", detail=s)
    rep.doc["nodes"] = v.nodes


def cmd_weakgen(args, key, rep: Report):
    pres = _pres(args, key)
    cap = _cap(args, key, pres)
    rep.doc["parameters"]["cap"] = cap
    try:
        with rep.timed("search"):
            w = weak_generation_check(pres, cap, args.budget, rep.doc["key"])
    except SearchBudgetExceeded as exc:
        rep.check("search", "fail", detail=str(exc))
        return
    for row in w.rows:
        rep.check(f"L={row['L']}", "pass" if row["all_surjective"] else "fail",
                  detail=f"{row['solutions']} solutions")
    rep.doc["scanned"] = w.scanned
    rep.doc["extending"] = sum(1 for r in w.rows if r["solutions"])


def _bss_last(key, pres) -> int:
    if key is not None and key.family in ("Tower", "Cyclic"):
        return key.i + 1
    if key is not None and key.family == "Ppn":
        return max(2, key.n - 3)
    return max([2] + [hb.page for hb in pres.higher_bocksteins])


def cmd_bss(args, key, rep: Report):
    pres = _pres(args, key)
    cap = _cap(args, key, pres)
    last = _bss_last(key, pres)
    rep.doc["parameters"].update(cap=cap, last_page=last)
    try:
        with rep.timed("pages"):
            pages = run_pages(pres, cap, last)
    except KBetaError as exc:
        rep.check("pages", "fail", detail=f"{type(exc).__name__}: {exc}")
        return
    rep.doc["dims"] = [{"name": f"E_{pg.index}", "values": pg.dims()} for pg in pages]
    und = sum(pg.undetermined_total() for pg in pages)
    if und:
        rep.check("differentials determined", "undetermined", detail=f"{und} directions set to 0")
    ax = check_axiom_b(pages, pres.p)
    for e in ax.entries:
        d = e.to_dict()
        rep.check(f"axiom b page {d['page']}", "fail" if e.status == "mismatch" else e.status,
                  subject=d["class"], degree=d["degree"], detail=d.get("detail"))
    if key is not None and key.family in ("Tower", "Cyclic"):
        want = [1] + [0] * cap
        got = pages[-1].dims()
        rep.check(f"E_{last} is F_p in degree 0", "pass" if got == want else "fail", detail=str(got))


def cmd_tower(args, key, rep: Report):
    if key is None or key.family != "Ppn":
        raise UsageError("tower needs --family Ppn --p P --n N")
    cap = _cap(args, key, None)
    rep.doc["parameters"]["cap"] = cap
    with rep.timed("tower"):
        t = tower_report(key.p, key.n, cap, args.data_dir)
    for c in t.checks:
        rep.check(c["check"], c["status"], detail=c.get("detail"))


HANDLERS = {"validate": cmd_validate, "hilbert": cmd_hilbert, "betti": cmd_betti, "compare": cmd_compare,
            "rigidity": cmd_rigidity, "weakgen": cmd_weakgen, "bss": cmd_bss, "tower": cmd_tower}


def render_text(doc: dict) -> str:
    lines = [f"command: {doc['command']}", f"key: {doc['key']}"]
    for k, v in doc["parameters"].items():
        lines.append(f"{k}: {v}")
    for d in doc["dims"]:
        lines.append(f"{d['name']}: {' '.join(str(x) for x in d['values'])}")
    shown = [c for c in doc["checks"] if c["status"] not in ("pass", "skipped-cap")]
    counts: dict = {}
    for c in doc["checks"]:
        counts[c["status"]] = counts.get(c["status"], 0) + 1
    if counts:
        lines.append("checks: " + ", ".join(f"{v} {k}" for k, v in sorted(counts.items())))
    for c in shown:
        extra = " ".join(f"{k}={c[k]}" for k in ("subject", "degree", "detail") if k in c)
        lines.append(f"  [{c['status']}] {c['check']} {extra}".rstrip())
    if doc["command"] == "rigidity" and "forced_steps" not in doc:
        lines.append(f"solutions: {len(doc['solutions'])}")
        for k, s in enumerate(doc["solutions"]):
            moved = {g: v for g, v in s.items() if v != g}
            lines.append(f"  #{k}: " + (", ".join(f"{g} -> {v}" for g, v in moved.items()) or "identity"))
        surj = next((c for c in doc["checks"] if c["check"].startswith("all surjective")), None)
        if surj is not None:
            lines.append(f"all surjective: {'true' if surj['status'] == 'pass' else 'false'}")
    for label, ms in doc["timings_ms"].items():
        lines.append(f"time {label}: {ms} ms")
    lines.append(f"passed: {'true' if doc['passed'] else 'false'}")
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.budget < 1:
            raise UsageError("--budget must be at least 1")
        key = _key(args)
        label = str(key) if key is not None else args.file
        params = {"cap": args.cap}
        if args.command in ("rigidity", "weakgen"):
            params["budget"] = args.budget
        rep = Report(args.command, label, params, not args.no_timings)
        HANDLERS[args.command](args, key, rep)
        doc = rep.finish()
    except (UsageError, KBetaError, OSError, ValueError) as exc:
        msg = f"{type(exc).__name__}: {exc}"
        if args.json:
            print(json.dumps({"command": args.command, "error": msg, "passed": False}), file=out)
        else:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=False), file=out)
    else:
        print(render_text(doc), file=out)
    return 0 if doc["passed"] else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


__all__ = ["run", "main", "build_parser"]
