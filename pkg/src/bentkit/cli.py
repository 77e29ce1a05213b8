"""Command-line front end: analyze, verify-paper, construct.

Exit codes: 0 success/verified, 1 verification mismatch, 2 usage error,
3 budget exceeded.  Progress for long enumerations goes to stderr only.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from .boolfun import (
    BooleanFunction,
    degree,
    direct_sum,
    fast_point_space,
    is_bent,
    is_homogeneous,
    to_anf,
)
from .catalog import Catalog, format_anf, load_catalog, verify_entry
from .constructions import (
    ConcatRecipe,
    build_concat,
    certify_outside_mm,
    certify_outside_mm_by_products,
    concat_anf_monomials,
    generate_from_omega,
    image_of_y_map,
    omega_basis,
    quadratic_bent,
    recipe_report,
)
from .catalog import cached_gamma_rank, cached_snf, parse_anf_string, parse_base32
from .errors import BudgetExceededError, UnsourcedEntryError
from .gf2 import gjb
from .subspaces import (
    enumerate_ms,
    enumerate_rms,
    linearity_index,
    mm_representation,
    relaxed_linearity_index,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _progress(label: str):
    def cb(dim, size):
        print(f"  [{label}] dim {dim}: {size} subspaces", file=sys.stderr, flush=True)

    return cb


def resolve_function(spec: str, catalog: Catalog) -> tuple[str, BooleanFunction]:
    """Resolve `name:`, `anf:`, `tt:` prefixed specs plus bare fallbacks."""
    if spec.startswith("name:"):
        return _by_name(spec[5:], catalog)
    if spec.startswith("anf:"):
        body = spec[4:]
        n = 1 + max(
            (max(_symbol_values(body), default=0)), 0
        )
        return f"anf({body})", parse_anf_string(body, max(n, 1))
    if spec.startswith("tt:"):
        body = spec[3:]
        if "@" in body:
            hexstr, _, nn = body.partition("@")
            return f"tt({hexstr})", BooleanFunction.from_hex(hexstr, int(nn))
        return f"tt({body})", BooleanFunction.from_hex(body)
    # bare: catalog name, then hex table, then ANF string
    try:
        return _by_name(spec, catalog)
    except KeyError:
        pass
    try:
        return f"tt({spec})", BooleanFunction.from_hex(spec)
    except ValueError:
        pass
    vals = _symbol_values(spec)
    if vals:
        return f"anf({spec})", parse_anf_string(spec, 1 + max(vals))
    raise ValueError(f"cannot interpret function spec {spec!r}")


def _symbol_values(s: str) -> list[int]:
    from .catalog import ALPHABET

    out = []
    for c in s.replace("⊕", " ").replace("+", " ").split():
        for ch in c:
            v = ALPHABET.find(ch)
            if v < 0:
                return []
            out.append(v)
    return out


def _by_name(name: str, catalog: Catalog) -> tuple[str, BooleanFunction]:
    lname = name.lower()
    if lname.startswith("q") and lname[1:].isdigit():
        return lname, quadratic_bent(int(lname[1:]))
    return name, catalog.function(name)


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "structured":
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for line in _render_text(payload):
            print(line)


def _render_text(payload: dict, indent: str = "") -> list[str]:
    out = []
    for key, val in payload.items():
        if isinstance(val, dict):
            out.append(f"{indent}{key}:")
            out.extend(_render_text(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], (dict, list)):
            out.append(f"{indent}{key}:")
            for item in val:
                if isinstance(item, dict):
                    out.extend(_render_text(item, indent + "  "))
                else:
                    out.append(f"{indent}  {item}")
        else:
            out.append(f"{indent}{key}: {val}")
    return out


def cmd_analyze(args, catalog: Catalog) -> int:
    try:
        name, f = resolve_function(args.function, catalog)
    except (ValueError, KeyError, UnsourcedEntryError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    deg = degree(f)
    report: dict = {
        "function": name,
        "table_sha256": hashlib.sha256(f.table.tobytes()).hexdigest()[:16],
        "n": f.n,
        "degree": deg,
    }
    if args.homogeneous:
        d = args.homogeneous_degree or (deg if deg > 0 else 0)
        report["homogeneous"] = {"degree": d, "value": is_homogeneous(f, d)}
    if args.bent:
        report["bent"] = is_bent(f)
    if args.fp:
        if deg <= 0:
            report["dim_fp"] = {"value": None, "note": "constant function"}
        else:
            report["dim_fp"] = fast_point_space(f).dim
    try:
        if args.index:
            report["ind"] = {
                "value": linearity_index(f, budget=args.budget),
                "provenance": "exact",
            }
        if args.relaxed_index:
            report["rind"] = {
                "value": relaxed_linearity_index(f, budget=args.budget),
                "provenance": "exact",
            }
        if args.ms is not None:
            coll = enumerate_ms(f, args.ms, budget=args.budget, progress=_progress("MS"))
            report[f"ms_{args.ms}"] = [
                " ".join(_b32(b) for b in s.basis) for s in coll
            ]
        if args.rms is not None:
            coll = enumerate_rms(f, args.rms, budget=args.budget, progress=_progress("RMS"))
            report[f"rms_{args.rms}"] = [
                " ".join(_b32(b) for b in s.basis) for s in coll
            ]
    except BudgetExceededError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    if args.snf:
        s = cached_snf(f)
        report["gamma_rank"] = cached_gamma_rank(f)
        report["snf"] = str(s)
    _emit(report, args.format)
    return EXIT_OK


def _b32(v: int) -> str:
    from .catalog import format_base32

    return format_base32(v)


_SCOPE_CHECKS = {
    "tables": ("basic", "table3", "snf", "grank"),
    "appendix": ("ms",),
    "flats": ("flat",),
}


def cmd_verify_paper(args, catalog: Catalog) -> int:
    scopes = ("tables", "appendix", "flats") if args.scope == "all" else (args.scope,)
    include = tuple({c for s in scopes for c in _SCOPE_CHECKS[s]})
    names = args.entries.split(",") if args.entries else catalog.names()
    reports = []
    failed = False
    for name in names:
        entry = catalog.entry(name)
        relevant = (
            entry.unsourced
            or any(k in entry.expected for k in ("ind", "rind", "rind_lower")) and "tables" in scopes
            or ("ms_rows" in entry.expected or "ms_same_as" in entry.expected) and "appendix" in scopes
            or "flat_offset" in entry.expected and "flats" in scopes
        )
        if not relevant:
            continue
        print(f"verifying {name} ...", file=sys.stderr, flush=True)
        rep = verify_entry(catalog, name, include=include)
        reports.append(rep)
        failed |= rep.status == "mismatch"
    payload = {
        "scope": args.scope,
        "entries": [
            {
                "name": r.name,
                "status": r.status,
                "checks": [
                    {
                        "invariant": c.invariant,
                        "expected": c.expected,
                        "actual": c.actual,
                        "passed": c.passed,
                    }
                    for c in r.checks
                ],
            }
            for r in reports
        ],
    }
    if args.format == "structured":
        _emit(payload, args.format)
    else:
        for r in reports:
            status = {"ok": "ok", "mismatch": "MISMATCH", "unsourced": "skipped (unsourced)"}[r.status]
            print(f"{r.name}: {status}")
            for c in r.checks:
                mark = "ok" if c.passed else "FAIL"
                print(f"  [{mark:4}] {c.invariant}: expected={c.expected} actual={c.actual}")
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_construct(args, catalog: Catalog) -> int:
    try:
        if args.concat:
            return _construct_concat(args, catalog)
        if args.omega_scan:
            return _construct_omega(args, catalog)
        if args.product_check:
            return _construct_product(args, catalog)
    except BudgetExceededError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, UnsourcedEntryError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print("usage error: choose one of --concat / --omega-scan / --product-check", file=sys.stderr)
    return EXIT_USAGE


def _construct_concat(args, catalog: Catalog) -> int:
    counts = [int(x) for x in args.concat.split(",")]
    if len(counts) != 4:
        raise ValueError("--concat expects i,j,k,l")
    kwargs = {}
    if args.components:
        comps = tuple(args.components.split(","))
        if len(comps) != 4:
            raise ValueError("--components expects four names")
        kwargs["components"] = comps
    recipe = ConcatRecipe(*counts, **kwargs)
    report = recipe_report(recipe, catalog)
    monomials = concat_anf_monomials(recipe, catalog)
    from .boolfun import from_anf

    if recipe.n <= 16:
        f = build_concat(recipe, catalog)
        report["verified_directly"] = {
            "bent": is_bent(f),
            "homogeneous_cubic": is_homogeneous(f, 3),
        }
    rind_bound = report["rind_upper_bound"]["value"]
    cert = {
        "verdict": "outside_mm" if report["outside_mm"]["value"] else "undecided",
        "rule": report["outside_mm"]["provenance"],
    }
    report["certificate"] = cert
    anf_text = _anf_text_from_masks(monomials, recipe.n)
    report["anf"] = anf_text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(f"[constructed]\nn = {recipe.n}\nanf = {anf_text}\n")
        report["written_to"] = args.out
    _emit(report, args.format)
    return EXIT_OK


def _anf_text_from_masks(masks: list[int], n: int) -> str:
    from .catalog import ALPHABET

    parts = []
    for m in sorted(masks):
        parts.append("".join(ALPHABET[i] for i in range(n) if m >> (n - 1 - i) & 1))
    return " ⊕ ".join(parts)


def _construct_omega(args, catalog: Catalog) -> int:
    import numpy as np

    name = args.omega_scan
    entry = catalog.entry(name)
    f = entry.function()
    rows = catalog.ms_expected(name)
    if not rows:
        raise ValueError(f"{name} has no published M-subspace to scan from")
    u = rows[0]
    comp = None
    if "omega_complement" in entry.expected:
        comp = gjb(
            [parse_base32(t, entry.n, catalog.token_flip()) for t in entry.expected["omega_complement"]],
            entry.n,
        )
    rep = mm_representation(f, u, comp)
    oset = omega_basis(rep, 3)
    report = {
        "base": name,
        "subspace": " ".join(_b32(b) for b in u.basis),
        "y_image_map": [_b32(m) for m in oset.y_image_masks()],
        "basis_monomials": len(oset.basis_monomials),
        "span_size_log2": len(oset.basis_monomials),
    }
    rng = np.random.default_rng(args.seed)
    samples = []
    for _ in range(args.samples):
        omega = oset.random_omega(rng)
        g = generate_from_omega(oset, omega)
        entry_rep = {
            "omega": format_anf(omega) or "0",
            "bent": is_bent(g),
            "homogeneous_cubic": is_homogeneous(g, 3),
            "gamma_rank": cached_gamma_rank(g),
        }
        if args.snf:
            entry_rep["snf_prefix"] = str(cached_snf(g)).split(", 0^")[0]
        samples.append(entry_rep)
    report["samples"] = samples
    _emit(report, args.format)
    return EXIT_OK


def _construct_product(args, catalog: Catalog) -> int:
    names = args.product_check
    _, f = resolve_function(names[0], catalog)
    _, g = resolve_function(names[1], catalog)
    h = direct_sum(f, g)
    cor = certify_outside_mm(f, g)
    if cor.verdict == "outside_mm":
        cert = cor
    else:
        cert = certify_outside_mm_by_products(h, f, g, budget=args.budget)
    payload = {
        "construction": f"{names[0]} (+) {names[1]}",
        "n": h.n,
        "certificate": cert.to_dict(),
    }
    _emit(payload, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="cap numba worker threads")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    p = argparse.ArgumentParser(prog="bentkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="compute invariants of one function", parents=[common])
    pa.add_argument("function", help="name:<catalog> | anf:<string> | tt:<hex>[@n] | bare")
    pa.add_argument("--bent", action="store_true")
    pa.add_argument("--homogeneous", action="store_true")
    pa.add_argument("--homogeneous-degree", type=int, default=None)
    pa.add_argument("--fp", action="store_true")
    pa.add_argument("--index", action="store_true")
    pa.add_argument("--relaxed-index", action="store_true")
    pa.add_argument("--snf", action="store_true")
    pa.add_argument("--ms", type=int, default=None, metavar="R")
    pa.add_argument("--rms", type=int, default=None, metavar="R")
    pa.add_argument("--budget", type=int, default=None)
    pa.set_defaults(func=cmd_analyze)

    pv = sub.add_parser("verify-paper", help="reproduce published values", parents=[common])
    pv.add_argument("scope", choices=("tables", "appendix", "flats", "all"))
    pv.add_argument("--entries", default=None, help="comma-separated entry filter")
    pv.set_defaults(func=cmd_verify_paper)

    pc = sub.add_parser("construct", help="build functions and certificates", parents=[common])
    pc.add_argument("--concat", default=None, metavar="i,j,k,l")
    pc.add_argument("--components", default=None, metavar="a,b,c,d")
    pc.add_argument("--omega-scan", default=None, metavar="BASE")
    pc.add_argument("--product-check", nargs=2, default=None, metavar=("F", "G"))
    pc.add_argument("--samples", type=int, default=2)
    pc.add_argument("--snf", action="store_true", help="SNF fingerprints for omega samples")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--budget", type=int, default=2_000_000)
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_construct)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    if args.threads:
        import numba

        numba.set_num_threads(max(1, args.threads))
    try:
        catalog = load_catalog()
    except OSError as e:
        print(f"usage error: cannot load catalog: {e}", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args, catalog)


if __name__ == "__main__":
    sys.exit(main())
