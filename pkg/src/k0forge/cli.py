"""Command-line entry point: ``k0forge <subcommand> ...``.

Every subcommand prints a JSON document with ``"schema": 1`` and sorted keys
(or CSV/table where offered) and exits 0 exactly when all certificates
verify.  ``K0FORGE_THREADS`` caps worker threads for grid runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import filterprod, modrep, numtheory, presentation, tilting
from .arith import primes_up_to
from .cyclotomic import RealCyclotomicElement

SCHEMA = 1
EXIT_FAILED = 1
EXIT_USAGE = 2


class CertificateFailure(Exception):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name
        self.detail = detail


def threads(arg: int | None = None) -> int:
    if arg:
        return max(1, arg)
    env = os.environ.get("K0FORGE_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise SystemExit(f"K0FORGE_THREADS must be an integer, got {env!r}") from None


def grid_map(fn: Callable, items: Iterable, workers: int) -> list:
    """Map over items with a thread pool; results come back in input order."""
    items = list(items)
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _emit(doc, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps({"schema": SCHEMA, **doc}, sort_keys=True, indent=2) + "\n")
    elif fmt == "table":
        for key in sorted(doc):
            out.write(f"{key}\t{json.dumps(doc[key], sort_keys=True)}\n")
    else:
        raise SystemExit(f"format {fmt!r} is not available for this subcommand")


# ---------------------------------------------------------------------------
# subcommands; each returns the document to print or raises CertificateFailure


def cmd_fusion(args) -> dict:
    ring = tilting.build_semisimple_fusion(args.p, args.ell)
    if args.even:
        ring = tilting.even_subring(ring)
    return {
        "command": "fusion",
        "ring": ring.to_json(),
        "simples": ring.rank,
        "dimension_field": tilting.dimension_field(args.p, args.ell).to_json(),
        "ok": True,
    }


def _k0iso_one(pair: tuple[int, int]) -> dict:
    p, ell = pair
    even = tilting.even_subring(tilting.build_semisimple_fusion(p, ell))
    try:
        cert = tilting.k0_isomorphism_certificate(even)
    except Exception as exc:
        raise CertificateFailure(f"k0iso(p={p}, ell={ell})", str(exc)) from exc
    if not cert.ok:
        raise CertificateFailure(f"k0iso(p={p}, ell={ell})", "certificate checks failed")
    return {"p": p, **cert.to_json()}


def cmd_k0iso(args) -> dict:
    if args.ell_max:
        ells = [e for e in primes_up_to(args.ell_max) if e > 2]
        ps = _ints(args.primes) if args.primes else [args.p]
        pairs = sorted((p, e) for e in ells for p in ps if p != e)
    else:
        pairs = [(args.p, args.ell)]
    certs = grid_map(_k0iso_one, pairs, threads(args.threads))
    return {"command": "k0iso", "certificates": certs, "ok": True}


def cmd_findell(args) -> dict:
    target = numtheory.FieldTarget(args.p, args.q, args.n)
    try:
        cert = numtheory.find_ell(target, args.search_bound)
    except numtheory.Inconclusive as exc:
        raise CertificateFailure(f"findell(p={args.p}, q={args.q}, n={args.n})", f"inconclusive: {exc}") from exc
    witness = numtheory.containment_check(cert, target)
    if not witness.holds or not numtheory.verify_containment(witness):
        raise CertificateFailure(f"containment(ell={cert.ell})", "embedding witness failed")
    return {
        "command": "findell",
        "p": args.p,
        "q": args.q,
        "n": args.n,
        "n_used": cert.n,
        "ell": cert.ell,
        "ord": cert.ord,
        "witness_poly": list(witness.residue_factor),
        "witness_target": list(witness.target_modulus),
        "witness_root": list(witness.root),
        "factorization_complete": cert.factorization_complete,
        "ok": True,
    }


def _gcd_one(triple):
    p, q, n = triple
    try:
        return {"p": p, "q": q, "n": n, "value": numtheory.gcd_lemma_check(p, q, n).value}
    except Exception as exc:
        raise CertificateFailure(f"gcdlemma(p={p}, q={q}, n={n})", str(exc)) from exc


def cmd_gcdlemma(args) -> dict:
    if args.p and args.q and args.n:
        triples = [(args.p, args.q, args.n)]
    else:
        ps = primes_up_to(args.max_prime)
        triples = [(p, q, n) for p in ps for q in ps for n in range(1, args.max_n + 1)]
    rows = grid_map(_gcd_one, triples, threads(args.threads))
    return {"command": "gcdlemma", "checked": len(rows), "rows": rows, "ok": True}


def _target_images(entry: dict) -> tuple[dict, object]:
    """Images for a versal check: {"target": "real_cyclotomic"|"rational", ...}."""
    kind = entry.get("target")
    raw = entry.get("images", {})
    if kind == "real_cyclotomic":
        ell = int(entry["ell"])
        return {g: RealCyclotomicElement(ell, tuple(v)) for g, v in raw.items()}, RealCyclotomicElement.from_int(ell, 1)
    if kind == "rational":
        return {g: Fraction(v) for g, v in raw.items()}, Fraction(1)
    raise CertificateFailure("versal", f"unknown target {kind!r}")


def cmd_present(args) -> dict:
    with open(args.file, encoding="utf-8") as fh:
        data = json.load(fh)
    pres = presentation.RingPresentation.from_json(data)
    doc: dict = {
        "command": "present",
        "presentation": pres.to_json(),
        "confluent": pres.confluent,
        "inverted_primes": sorted(pres.inverted_primes),
        "witnesses": [w.to_json() for w in pres.witnesses],
    }
    for w in pres.witnesses:
        if not w.check():
            raise CertificateFailure(f"heller(relation {w.relation_index})", "derivation does not cancel")
    checks = []
    for i, chk in enumerate(data.get("checks", [])):
        a, b = pres.element(chk["a"]), pres.element(chk["b"])
        verdict = presentation.equal(a, b)
        entry = {"a": chk["a"], "b": chk["b"], **verdict.to_json()}
        checks.append(entry)
        expect = chk.get("expect")
        if expect and verdict.status != expect:
            raise CertificateFailure(f"check {i}", f"expected {expect}, got {verdict.status}")
    doc["checks"] = checks
    if "versal" in data:
        images, one = _target_images(data["versal"])
        try:
            cert = presentation.verify_versal_factorization(pres, images, target_one=one)
        except presentation.VersalFactorizationError as exc:
            raise CertificateFailure(f"versal(relation {exc.index})", exc.detail) from exc
        doc["versal"] = cert.to_json()
    doc["ok"] = True
    return doc


def cmd_density(args) -> dict | str:
    report = filterprod.root_density(_ints(args.poly), args.N, workers=threads(args.threads))
    if args.format == "csv":
        return report.to_csv()
    return {"command": "density", **report.to_json(), "ok": True}


def cmd_modp(args) -> dict:
    even = tilting.even_subring(tilting.build_semisimple_fusion(args.p, args.ell))
    try:
        reduction = modrep.verify_mod_p_reduction(even, args.p)
        cross = tilting.mod_p_cross_check(even, args.p)
    except Exception as exc:
        raise CertificateFailure(f"modp(p={args.p}, ell={args.ell})", str(exc)) from exc
    if tuple(reduction.field_degrees) != tuple(cross.field_degrees_cyclotomic):
        raise CertificateFailure(
            f"modp(p={args.p}, ell={args.ell})",
            f"field degrees differ: {reduction.field_degrees} vs {cross.field_degrees_cyclotomic}",
        )
    return {
        "command": "modp",
        "reduction": reduction.to_json(),
        "description": reduction.description(),
        "cross_check": cross.to_json(),
        "ok": True,
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k0forge", description="Exact K_0-level verification experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, formats=("json", "table")):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--threads", type=int, default=None, help="worker threads (default: K0FORGE_THREADS or 1)")
        return sp

    sp = add("fusion", cmd_fusion, "build and validate the semisimplified tilting fusion ring")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--even", action="store_true", help="restrict to the even subring")

    sp = add("k0iso", cmd_k0iso, "certify K_0 of the even part is Z[zeta + zeta^-1]")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--ell", type=int, default=5)
    sp.add_argument("--ell-max", type=int, default=None, help="run every odd prime l up to this bound")
    sp.add_argument("--primes", default=None, help="comma-separated p values for a grid run")

    sp = add("findell", cmd_findell, "find l with ord_l(p) = q^n and certify the field embedding")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--search-bound", type=int, default=10**6)

    sp = add("gcdlemma", cmd_gcdlemma, "check the gcd identity on one triple or a grid")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--max-prime", type=int, default=13)
    sp.add_argument("--max-n", type=int, default=4)

    sp = add("present", cmd_present, "load a presentation file and verify its checks")
    sp.add_argument("file")

    sp = add("density", cmd_density, "share of primes where a polynomial has a root", ("json", "csv", "table"))
    sp.add_argument("--poly", required=True, help="integer coefficients, constant term first, e.g. 1,0,1")
    sp.add_argument("--N", type=int, default=filterprod.DEFAULT_BOUND, help="prime sample bound")

    sp = add("modp", cmd_modp, "K_0/(p) of the even fusion ring, cross-checked with cyclotomic reduction")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--ell", type=int, required=True)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = args.func(args)
    except CertificateFailure as exc:
        _emit({"command": args.command, "ok": False, "failed": exc.name, "error": exc.detail}, "json", out)
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(doc, str):
        out.write(doc)
    else:
        _emit(doc, args.format, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
