"""Appendix notations, the built-in function library, and published-value checks.

Notation:

* ANF digit strings: each monomial is a string of variable symbols over the
  alphabet 0-9, a-v (variable 0 -> '0', variable 10 -> 'a', ...); monomials
  are joined with an xor sign.
* base-32 vector tokens: big-endian base-32 integers over the same alphabet,
  read as n-bit masks with variable 0 (x_1) most significant.  Whether the
  printed tokens are variable-0-most-significant is resolved empirically by
  the joint consistency check (flats constant AND MS lists valid).
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from math import ceil

from .boolfun import BooleanFunction, from_anf, is_bent, is_homogeneous, to_anf
from .errors import BudgetExceededError, UnsourcedEntryError
from .gf2 import Subspace, gjb
from .invariants import SnfMultiset, gamma_rank, snf
from .subspaces import (
    enumerate_ms,
    enumerate_rms,
    is_m_subspace,
    linearity_index,
    relaxed_linearity_index,
)

ALPHABET = "0123456789abcdefghijklmnopqrstuv"


def parse_anf_string(s: str, n: int) -> BooleanFunction:
    """Parse xor-of-monomials digit notation ('012 + 0ab' style)."""
    s = s.replace("⊕", "+").strip()
    monomials = []
    for token in s.replace("+", " ").split():
        vars_seen = []
        for c in token:
            v = ALPHABET.find(c)
            if v < 0:
                raise ValueError(f"invalid variable symbol {c!r} in monomial {token!r}")
            if v >= n:
                raise ValueError(f"variable {c!r} out of range for n={n}")
            if v in vars_seen:
                raise ValueError(f"duplicate variable {c!r} in monomial {token!r}")
            vars_seen.append(v)
        monomials.append(tuple(vars_seen))
    return from_anf(monomials, n)


def format_anf(f: BooleanFunction) -> str:
    """Digit notation of the ANF, monomials in mask order."""
    parts = []
    for vars_ in to_anf(f).monomial_vars():
        if not vars_:
            parts.append("1")  # constant term; not part of the printed alphabet
        else:
            parts.append("".join(ALPHABET[v] for v in vars_))
    return " ⊕ ".join(parts)


def parse_base32(token: str, n: int, flip: bool = False) -> int:
    """Base-32 token to an n-bit mask (variable 0 most significant)."""
    token = token.strip().lower()
    if not token or any(c not in ALPHABET for c in token):
        raise ValueError(f"invalid base-32 token {token!r}")
    v = 0
    for c in token:
        v = v * 32 + ALPHABET.index(c)
    if v >= 1 << n:
        raise ValueError(f"token {token!r} = {v} does not fit in {n} bits")
    if flip:
        v = int(format(v, f"0{n}b")[::-1], 2)
    return v


def format_base32(v: int) -> str:
    if v < 0:
        raise ValueError("negative value")
    if v == 0:
        return "0"
    out = []
    while v:
        out.append(ALPHABET[v % 32])
        v //= 32
    return "".join(reversed(out))


@dataclass(frozen=True)
class Flat:
    """Affine flat offset + span."""

    offset: int
    basis: Subspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    def points(self) -> list[int]:
        return sorted(self.offset ^ u for u in self.basis.elements())


def verify_flat_normality(f: BooleanFunction, flat: Flat) -> bool:
    """True iff f is constant on the flat; requires dim = ceil(n/2)."""
    if flat.dim != ceil(f.n / 2):
        raise ValueError(
            f"normality flat must have dimension {ceil(f.n / 2)}, got {flat.dim}"
        )
    vals = {int(f.table[p]) for p in flat.points()}
    return len(vals) == 1


@dataclass
class CatalogEntry:
    """A named function with its published invariants."""

    name: str
    n: int
    anf_source: str | None
    expected: dict = field(default_factory=dict)
    unsourced: bool = False

    def function(self) -> BooleanFunction:
        if self.anf_source is None:
            raise UnsourcedEntryError(
                f"catalog entry {self.name!r} has no sourced ANF; supply one via "
                f"source_entry() or the catalog file"
            )
        return _parse_cached(self.anf_source, self.n)


@lru_cache(maxsize=64)
def _parse_cached(anf: str, n: int) -> BooleanFunction:
    return parse_anf_string(anf, n)


_R3_HOOKS = "n=6, bent, 3-homogeneous degree profile (cubic), dim FP = 0, rind = 3"


class Catalog:
    """Immutable lookup of catalog entries with lazily resolved token order."""

    def __init__(self, entries: dict[str, CatalogEntry]):
        self._entries = entries
        self._token_flip: bool | None = None

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> list[str]:
        return list(self._entries)

    def entry(self, name: str) -> CatalogEntry:
        if name not in self._entries:
            raise KeyError(f"no catalog entry named {name!r}")
        return self._entries[name]

    def function(self, name: str) -> BooleanFunction:
        return self.entry(name).function()

    def source_entry(self, name: str, anf: str) -> None:
        """Activate an unsourced slot after the validation hooks pass."""
        e = self.entry(name)
        if not e.unsourced:
            raise ValueError(f"entry {name!r} is not an unsourced slot")
        f = parse_anf_string(anf, e.n)
        problems = validate_r3_candidate(f) if name == "r3" else []
        if problems:
            raise ValueError(
                f"candidate for {name!r} rejected ({'; '.join(problems)}); "
                f"required: {_R3_HOOKS}"
            )
        e.anf_source = anf
        e.unsourced = False

    # -- token order resolution ---------------------------------------

    def token_flip(self) -> bool:
        """Resolve the base-32 bit order by the joint consistency check."""
        if self._token_flip is None:
            for flip in (False, True):
                if self._consistent(flip):
                    if self._token_flip is not None:
                        raise AssertionError("both token bit orders validate")
                    self._token_flip = flip
            if self._token_flip is None:
                raise AssertionError(
                    "neither token bit order passes the joint consistency check"
                )
        return self._token_flip

    def _consistent(self, flip: bool) -> bool:
        try:
            for name, e in self._entries.items():
                if e.anf_source is None:
                    continue
                exp = e.expected
                if "flat_offset" in exp:
                    f = e.function()
                    flat = self._decode_flat(e, flip)
                    if not verify_flat_normality(f, flat):
                        return False
                rows = exp.get("ms_rows")
                if rows:
                    f = e.function()
                    for row in rows:
                        u = gjb([parse_base32(t, e.n, flip) for t in row], e.n)
                        if u.dim != len(row) or not is_m_subspace(f, u):
                            return False
        except ValueError:
            return False
        return True

    def _decode_flat(self, e: CatalogEntry, flip: bool) -> Flat:
        off = parse_base32(e.expected["flat_offset"], e.n, flip)
        basis = gjb(
            [parse_base32(t, e.n, flip) for t in e.expected["flat_basis"]], e.n
        )
        return Flat(off, basis)

    def flat(self, name: str) -> Flat:
        e = self.entry(name)
        if "flat_offset" not in e.expected:
            raise KeyError(f"entry {name!r} has no published normality flat")
        return self._decode_flat(e, self.token_flip())

    def ms_expected(self, name: str):
        """Published MS_{n/2} rows as Subspace objects (may be empty)."""
        e = self.entry(name)
        alias = e.expected.get("ms_same_as")
        if alias:
            return self.ms_expected(alias)
        rows = e.expected.get("ms_rows")
        if rows is None:
            raise KeyError(f"entry {name!r} has no published MS list")
        flip = self.token_flip()
        return [gjb([parse_base32(t, e.n, flip) for t in row], e.n) for row in rows]


def validate_r3_candidate(f: BooleanFunction) -> list[str]:
    """Hooks any sourced candidate must pass before the slot activates."""
    from .boolfun import fast_point_space

    problems = []
    if f.n != 6:
        problems.append(f"n={f.n}, need 6")
        return problems
    if to_anf(f).degree != 3:
        problems.append("degree != 3")
    if not is_bent(f):
        problems.append("not bent")
    if to_anf(f).degree == 3 and fast_point_space(f).dim != 0:
        problems.append("has affine derivatives")
    if relaxed_linearity_index(f) != 3:
        problems.append("relaxed linearity index != 3")
    return problems


def _parse_ms_block(raw: str) -> tuple[tuple[str, ...], ...]:
    rows = []
    for line in raw.strip().splitlines():
        toks = tuple(line.split())
        if toks:
            rows.append(toks)
    return tuple(rows)


def default_catalog_path() -> str:
    override = os.environ.get("BENTKIT_CATALOG")
    if override:
        return override
    return str(resources.files("bentkit").joinpath("data/catalog.txt"))


def load_catalog(path: str | None = None) -> Catalog:
    cp = configparser.ConfigParser()
    target = path or default_catalog_path()
    with open(target, encoding="utf-8") as fh:
        cp.read_file(fh)
    entries: dict[str, CatalogEntry] = {}
    for name in cp.sections():
        sec = cp[name]
        n = sec.getint("n")
        anf = sec.get("anf", fallback=None)
        unsourced = sec.getboolean("unsourced", fallback=False)
        exp: dict = {}
        for key in ("ind", "rind", "dim_fp", "grank", "degree", "ms_r", "rind_lower"):
            if key in sec:
                exp[key] = sec.getint(key)
        if "grank_choices" in sec:
            exp["grank_choices"] = tuple(int(x) for x in sec["grank_choices"].split())
        if "snf_prefix" in sec:
            exp["snf_prefix"] = tuple(
                SnfMultiset.parse(sec["snf_prefix"]).entries
            )
        if "homogeneous" in sec:
            exp["homogeneous"] = sec.getboolean("homogeneous")
        if "bent" in sec:
            exp["bent"] = sec.getboolean("bent")
        if "ms" in sec:
            exp["ms_rows"] = _parse_ms_block(sec["ms"])
        if "ms_same_as" in sec:
            exp["ms_same_as"] = sec["ms_same_as"]
        if "flat" in sec:
            offset, _, basis = sec["flat"].partition("|")
            exp["flat_offset"] = offset.strip()
            exp["flat_basis"] = tuple(basis.split())
        if "omega_complement" in sec:
            exp["omega_complement"] = tuple(sec["omega_complement"].split())
        entries[name] = CatalogEntry(
            name=name, n=n, anf_source=anf, expected=exp, unsourced=unsourced
        )
    return Catalog(entries)


# -- verification ------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    invariant: str
    expected: object
    actual: object
    passed: bool


@dataclass(frozen=True)
class EntryReport:
    name: str
    status: str  # "ok" | "mismatch" | "unsourced"
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return self.status != "mismatch"

    def lines(self) -> list[str]:
        out = [f"{self.name}: {self.status}"]
        for c in self.checks:
            mark = "ok " if c.passed else "FAIL"
            out.append(f"  [{mark}] {c.invariant}: expected {c.expected}, got {c.actual}")
        return out


@lru_cache(maxsize=64)
def cached_snf(f: BooleanFunction) -> SnfMultiset:
    return snf(f)


@lru_cache(maxsize=64)
def cached_gamma_rank(f: BooleanFunction) -> int:
    return gamma_rank(f)


@lru_cache(maxsize=64)
def cached_ind(f: BooleanFunction) -> int:
    return linearity_index(f)


@lru_cache(maxsize=64)
def cached_rind(f: BooleanFunction) -> int:
    return relaxed_linearity_index(f)


@lru_cache(maxsize=64)
def cached_dim_fp(f: BooleanFunction) -> int:
    from .boolfun import fast_point_space

    return fast_point_space(f).dim


def verify_entry(
    catalog: Catalog,
    name: str,
    include: tuple[str, ...] = ("basic", "table3", "snf", "ms", "flat"),
) -> EntryReport:
    """Recompute the attached published invariants and diff against them."""
    e = catalog.entry(name)
    if e.anf_source is None:
        return EntryReport(name, "unsourced", ())
    f = e.function()
    exp = e.expected
    checks: list[CheckResult] = []

    def add(inv, expected, actual):
        checks.append(CheckResult(inv, expected, actual, expected == actual))

    if "basic" in include:
        if "degree" in exp:
            add("degree", exp["degree"], to_anf(f).degree)
        if "homogeneous" in exp:
            add("homogeneous", exp["homogeneous"], is_homogeneous(f, exp.get("degree", 3)))
        if "bent" in exp:
            add("bent", exp["bent"], is_bent(f))
    if "table3" in include:
        if "dim_fp" in exp:
            add("dim_fp", exp["dim_fp"], cached_dim_fp(f))
        if "ind" in exp:
            add("ind", exp["ind"], cached_ind(f))
        if "rind" in exp:
            add("rind", exp["rind"], cached_rind(f))
        if "rind_lower" in exp:
            lower = exp["rind_lower"]
            witness = len(enumerate_rms(f, lower, early_stop=1)) > 0
            add(f"rind>={lower}", True, witness)
    if "snf" in include and "snf_prefix" in exp:
        prefix = exp["snf_prefix"]
        add("snf_prefix", tuple(prefix), cached_snf(f).prefix(len(prefix)))
    if "grank" in include or "snf" in include:
        if "grank" in exp:
            add("grank", exp["grank"], cached_gamma_rank(f))
        if "grank_choices" in exp:
            g = cached_gamma_rank(f)
            checks.append(
                CheckResult("grank_choices", exp["grank_choices"], g, g in exp["grank_choices"])
            )
    if "ms" in include and ("ms_rows" in exp or "ms_same_as" in exp):
        expected_rows = sorted(s.basis for s in catalog.ms_expected(name))
        r = exp.get("ms_r", f.n // 2)
        actual_rows = sorted(s.basis for s in enumerate_ms(f, r))
        add(f"ms_{r}", expected_rows, actual_rows)
    if "flat" in include and "flat_offset" in exp:
        add("flat_normal", True, verify_flat_normality(f, catalog.flat(name)))

    status = "ok" if all(c.passed for c in checks) else "mismatch"
    return EntryReport(name, status, tuple(checks))
