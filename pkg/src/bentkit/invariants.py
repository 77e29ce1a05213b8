"""Incidence-structure invariants: 2-rank, Gamma-rank, Smith normal form.

The development of the support of f has incidence matrix M_f = (f(x^y));
the development of the graph is the block matrix N_f = [[M_f, M_fbar],
[M_fbar, M_f]].  Everything needed from N_f is recovered from M_f: the
GF(2) rank (equal for non-constant f) and the elementary divisors, which
are those of the bordered matrix [[M_f, j^T], [j, 2]] plus 2^n - 1 zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from ._kernels import packed_rank, snf_pow2
from .boolfun import BooleanFunction, degree, derivative, is_bent, zero_function
from .gf2 import gjb

# full 2^n x 2^n incidence matrices are materialized only up to this n
DEV_LIMIT = 13


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 uint8 array into uint64 words, one row per matrix row."""
    nrows, ncols = bits.shape
    packed = np.packbits(bits, axis=1)
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view(np.uint64)


def support_rows_packed(f: BooleanFunction) -> np.ndarray:
    """All rows of M_f = (f(x^y))_{x,y}, bit-packed."""
    if f.n > DEV_LIMIT:
        raise ValueError(f"n={f.n} incidence matrix exceeds limit {DEV_LIMIT}")
    idx = np.arange(1 << f.n, dtype=np.uint32)
    return _pack_rows(f.table[idx[:, None] ^ idx[None, :]])


def two_rank(f: BooleanFunction) -> int:
    """GF(2) rank of the support development M_f."""
    return int(packed_rank(support_rows_packed(f)))


def two_rank_direct_sum(f: BooleanFunction, g: BooleanFunction) -> int:
    """2rank of the direct sum without materializing the 2^(n+m) matrix.

    Every row of M_h factors as row(a,0) ^ row(0,b) ^ row(0,0), so the row
    space is spanned by the 2^n + 2^m rows with one coordinate fixed to 0.
    """
    fi = np.arange(1 << f.n, dtype=np.uint32)
    gi = np.arange(1 << g.n, dtype=np.uint32)
    rows = []
    g0 = g.table[gi]
    for a in range(1 << f.n):
        rows.append((f.table[fi ^ a][:, None] ^ g0[None, :]).reshape(-1))
    f0 = f.table[fi]
    for b in range(1, 1 << g.n):
        rows.append((f0[:, None] ^ g.table[gi ^ b][None, :]).reshape(-1))
    return int(packed_rank(_pack_rows(np.asarray(rows, dtype=np.uint8))))


def gamma_rank(f: BooleanFunction) -> int:
    """Rank of the graph development: 2 for constants, else two_rank(f)."""
    if degree(f) < 1:
        return 2
    return two_rank(f)


@dataclass(frozen=True)
class SnfMultiset:
    """Elementary divisors with multiplicities, zeros counted separately."""

    entries: tuple[tuple[int, int], ...]  # (divisor, multiplicity), ascending
    zeros: int

    def __post_init__(self):
        divs = [d for d, _ in self.entries]
        if any(m <= 0 or d <= 0 for d, m in self.entries):
            raise ValueError("divisors and multiplicities must be positive")
        if any(divs[i] >= divs[i + 1] or divs[i + 1] % divs[i] for i in range(len(divs) - 1)):
            raise ValueError("divisors must be strictly increasing and divide each other")

    @property
    def order(self) -> int:
        return sum(m for _, m in self.entries) + self.zeros

    def multiplicity(self, d: int) -> int:
        for dd, m in self.entries:
            if dd == d:
                return m
        return 0

    def prefix(self, k: int) -> tuple[tuple[int, int], ...]:
        return self.entries[:k]

    def all_powers_of_two(self) -> bool:
        return all(d & (d - 1) == 0 for d, _ in self.entries)

    def __str__(self) -> str:
        parts = [f"{d}^{m}" for d, m in self.entries]
        if self.zeros:
            parts.append(f"0^{self.zeros}")
        return ", ".join(parts)

    @classmethod
    def parse(cls, text: str, zeros: int = 0) -> "SnfMultiset":
        entries = []
        z = zeros
        for part in text.replace("{", "").replace("}", "").replace("*", "").split(","):
            part = part.strip().rstrip(".")
            if not part or part == "...":
                continue
            d, m = part.split("^")
            d, m = int(d), int(m)
            if d == 0:
                z += m
            else:
                entries.append((d, m))
        return cls(tuple(entries), z)


def _bordered_matrix(f: BooleanFunction, dtype) -> np.ndarray:
    size = 1 << f.n
    r = np.empty((size + 1, size + 1), dtype=dtype)
    idx = np.arange(size, dtype=np.uint32)
    r[:size, :size] = f.table[idx[:, None] ^ idx[None, :]]
    r[size, :size] = 1
    r[:size, size] = 1
    r[size, size] = 2
    return r


def snf(f: BooleanFunction) -> SnfMultiset:
    """Smith normal form of the graph development N_f.

    Bent inputs use the modular power-of-two engine; non-bent inputs fall
    back to exact integer elimination (supported for n <= 8).
    """
    n = f.n
    if is_bent(f):
        for K in (n + 2, 2 * n + 4):
            vals = snf_pow2(_bordered_matrix(f, np.int32), K)
            if np.all(vals >= 0):
                break
        else:
            raise AssertionError("bent input produced a singular bordered matrix")
        uniq, counts = np.unique(vals, return_counts=True)
        entries = tuple((1 << int(v), int(c)) for v, c in zip(uniq, counts))
        return SnfMultiset(entries, (1 << n) - 1)
    if n > 8:
        raise ValueError("exact SNF of non-bent functions is supported for n <= 8")
    divisors = exact_snf_divisors(_bordered_matrix(f, np.int64).tolist())
    nz = sorted(d for d in divisors if d)
    entries = []
    for d in nz:
        if entries and entries[-1][0] == d:
            entries[-1][1] += 1
        else:
            entries.append([d, 1])
    zeros = len(divisors) - len(nz) + (1 << n) - 1
    return SnfMultiset(tuple((d, m) for d, m in entries), zeros)


def exact_snf_divisors(mat: list[list[int]]) -> list[int]:
    """Elementary divisors of an integer matrix, exact arbitrary precision.

    Diagonalize with minimal-|pivot| selection, then normalize the diagonal
    into a divisibility chain with pairwise gcd/lcm exchanges.
    """
    a = [[int(x) for x in row] for row in mat]
    m = len(a)
    ncols = len(a[0]) if m else 0
    diag = []
    k = 0
    while k < min(m, ncols):
        # smallest nonzero entry of the trailing block as pivot
        best = None
        for i in range(k, m):
            row = a[i]
            for j in range(k, ncols):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        a[k], a[bi] = a[bi], a[k]
        if bj != k:
            for row in a:
                row[k], row[bj] = row[bj], row[k]
        while True:
            p = a[k][k]
            dirty = False
            for i in range(k + 1, m):
                q = a[i][k]
                if q:
                    c = q // p
                    if c:
                        a[i] = [x - c * y for x, y in zip(a[i], a[k])]
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        dirty = True
                        break
            if dirty:
                continue
            p = a[k][k]
            for j in range(k + 1, ncols):
                q = a[k][j]
                if q:
                    c = q // p
                    if c:
                        for row in a[k:]:
                            row[j] -= c * row[k]
                    if a[k][j]:
                        # swap columns to bring the smaller remainder in
                        for row in a:
                            row[k], row[j] = row[j], row[k]
                        dirty = True
                        break
            if not dirty:
                break
        diag.append(abs(a[k][k]))
        k += 1
    diag += [0] * (min(m, ncols) - len(diag))
    # normalize into a divisibility chain
    nz = [d for d in diag if d]
    changed = True
    while changed:
        changed = False
        for i in range(len(nz)):
            for j in range(i + 1, len(nz)):
                if nz[j] % nz[i]:
                    g = gcd(nz[i], nz[j])
                    nz[i], nz[j] = g, nz[i] * nz[j] // g
                    changed = True
        nz.sort()
    return nz + [0] * (len(diag) - len(nz))


@dataclass(frozen=True)
class SnfSymmetryReport:
    """Per-clause outcome of the conjectured SNF symmetry (reported, not asserted)."""

    divisors_consecutive_powers: bool
    top_multiplicity_one: bool
    second_top_is_m1_minus_2: bool
    palindrome: bool
    checked_palindrome_pairs: int

    @property
    def all_pass(self) -> bool:
        return (
            self.divisors_consecutive_powers
            and self.top_multiplicity_one
            and self.second_top_is_m1_minus_2
            and self.palindrome
        )


def check_snf_symmetry(s: SnfMultiset, n: int) -> SnfSymmetryReport:
    """Evaluate the conjectured shape: divisors 2^0..2^(n-1), m_n = 1,
    m_(n-1) = m_1 - 2, and m_(n/2-i) = m_(n/2+i)."""
    expected = [1 << i for i in range(n)]
    consecutive = [d for d, _ in s.entries] == expected
    mult = {d: m for d, m in s.entries}
    m = [mult.get(1 << i, 0) for i in range(n)]  # m[i] = multiplicity of 2^i
    top_one = bool(m) and m[n - 1] == 1
    second = n >= 2 and m[n - 2] == m[0] - 2
    pairs = 0
    palin = True
    if n % 2 == 0:
        half = n // 2
        for i in range(1, half - 1):
            pairs += 1
            # m_(half-i) and m_(half+i) in 1-based divisor numbering
            if m[half - i - 1] != m[half + i - 1]:
                palin = False
    return SnfSymmetryReport(consecutive, top_one, second, palin, pairs)


def all_one_decomposition(f: BooleanFunction) -> list[int]:
    """Slow-point span whose translates of the support row xor to all-ones.

    Returns the 2^d translate indices (the span), deterministic first hit in
    index order.  deg(f) >= 1 required.
    """
    d = degree(f)
    if d < 1:
        raise ValueError("decomposition requires deg(f) >= 1")
    n = f.n
    slow = [a for a in range(1, 1 << n) if degree(derivative(f, a)) == d - 1]
    tab = f.table

    def xor_over(vs: list[int]) -> int:
        total = 0
        sp = [0]
        for b in vs:
            sp += [x ^ b for x in sp]
        for x in sp:
            total ^= int(tab[x])
        return total

    def search(chosen: list[int], start: int) -> list[int] | None:
        if len(chosen) == d:
            if xor_over(chosen) == 1:
                return chosen[:]
            return None
        base = gjb(chosen, n) if chosen else None
        for idx in range(start, len(slow)):
            v = slow[idx]
            if base is not None and base.contains(v):
                continue
            got = search(chosen + [v], idx + 1)
            if got is not None:
                return got
        return None

    dirs = search([], 0)
    if dirs is None:
        raise AssertionError("no all-one decomposition found; this contradicts theory")
    sp = [0]
    for b in dirs:
        sp += [x ^ b for x in sp]
    sp.sort()
    idx = np.arange(1 << n)
    acc = np.zeros(1 << n, dtype=np.uint8)
    for a in sp:
        acc ^= tab[idx ^ a]
    if not np.all(acc == 1):
        raise AssertionError("decomposition verification failed")
    return sp
