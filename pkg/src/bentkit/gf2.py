"""Bit-packed GF(2) linear algebra: canonical bases, complements, transforms.

Matrices are row-major tuples of integer masks.  Bit ``n-1-i`` of a row is
column/variable ``i`` (variable 0 most significant), matching boolfun.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .boolfun import BooleanFunction


@dataclass(frozen=True)
class Gf2Matrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if not 0 <= r < (1 << self.ncols):
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> int:
        return self.rows[i]

    def apply(self, x: int) -> int:
        """Row-vector product x -> x * M (x indexed by variables)."""
        acc = 0
        n = self.nrows
        for i in range(n):
            if x >> (n - 1 - i) & 1:
                acc ^= self.rows[i]
            if not x:
                break
        return acc

    def mul(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions differ")
        return Gf2Matrix(tuple(other.apply(r) for r in self.rows), other.ncols)
        # note: apply treats its argument as a row over other's nrows columns

    def transpose(self) -> "Gf2Matrix":
        m = self.nrows
        out = []
        for j in range(self.ncols):
            bit = 1 << (self.ncols - 1 - j)
            v = 0
            for i, r in enumerate(self.rows):
                if r & bit:
                    v |= 1 << (m - 1 - i)
            out.append(v)
        return Gf2Matrix(tuple(out), m)

    def __str__(self) -> str:
        return "\n".join(format(r, f"0{self.ncols}b") for r in self.rows)


def identity(n: int) -> Gf2Matrix:
    return Gf2Matrix(tuple(1 << (n - 1 - i) for i in range(n)), n)


def _rref(rows: Iterable[int]) -> list[int]:
    """Reduced row echelon form; rows returned in decreasing numeric order."""
    basis: list[int] = []  # kept sorted by leading bit, descending
    for v in rows:
        cur = int(v)
        for b in basis:
            if cur ^ b < cur:
                cur ^= b
        if not cur:
            continue
        lead = 1 << (cur.bit_length() - 1)
        basis = [b ^ cur if b & lead else b for b in basis]
        basis.append(cur)
        basis.sort(reverse=True)
    return basis


@dataclass(frozen=True)
class Subspace:
    """GF(2) subspace in canonical Gauss-Jordan form."""

    n: int
    basis: tuple[int, ...]

    def __post_init__(self):
        rows = _rref(self.basis)
        if list(self.basis) != rows:
            raise ValueError("basis is not in canonical Gauss-Jordan form; use gjb()")
        for r in rows:
            if not 0 < r < (1 << self.n):
                raise ValueError(f"basis row {r} out of range for n={self.n}")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: int) -> bool:
        cur = int(v)
        for b in self.basis:
            if cur ^ b < cur:
                cur ^= b
        return cur == 0

    def elements(self) -> list[int]:
        out = [0]
        for b in self.basis:
            out += [x ^ b for x in out]
        return sorted(out)

    def matrix(self) -> Gf2Matrix:
        return Gf2Matrix(self.basis, self.n)

    def __le__(self, other: "Subspace") -> bool:
        return self.n == other.n and all(other.contains(b) for b in self.basis)


def gjb(vectors: Iterable[int], n: int) -> Subspace:
    """Canonical Gauss-Jordan basis of the span of the given vectors."""
    return Subspace(n, tuple(_rref(vectors)))


def span_subspace(vectors: Iterable[int], n: int) -> Subspace:
    return gjb(vectors, n)


def rank(m: Gf2Matrix | Sequence[int]) -> int:
    rows = m.rows if isinstance(m, Gf2Matrix) else m
    return len(_rref(rows))


def nullspace(rows: Iterable[int], n: int) -> list[int]:
    """Basis of {x : <row, x> = 0 for every row}, as masks."""
    basis = _rref(rows)
    pivots = [b.bit_length() - 1 for b in basis]
    pivot_set = set(pivots)
    out = []
    for q in range(n - 1, -1, -1):
        if q in pivot_set:
            continue
        v = 1 << q
        for p, b in zip(pivots, basis):
            if b >> q & 1:
                v |= 1 << p
        out.append(v)
    return out


def complement(u: Subspace) -> Subspace:
    """Deterministic complement: greedy extension by standard basis vectors."""
    n = u.n
    acc = list(u.basis)
    chosen = []
    for i in range(n):
        cand = 1 << (n - 1 - i)
        cur = cand
        for b in _rref(acc):
            if cur ^ b < cur:
                cur ^= b
        if cur:
            acc.append(cand)
            chosen.append(cand)
        if len(acc) == n:
            break
    return gjb(chosen, n)


def is_complement(u: Subspace, w: Subspace) -> bool:
    return (
        u.n == w.n
        and u.dim + w.dim == u.n
        and rank(list(u.basis) + list(w.basis)) == u.n
    )


def change_of_basis(u: Subspace, comp: Subspace | None = None) -> Gf2Matrix:
    """Invertible A with rows [gjb(U); gjb(complement)].

    Applying f(z*A) aligns U with the leading coordinate block, so the values
    of the transformed function on the coset {x fixed-free, y fixed} run over
    the coset U + u-bar of the original.
    """
    r = u.dim
    if r == 0 or r == u.n:
        raise ValueError("change of basis needs 0 < dim(U) < n")
    if comp is None:
        comp = complement(u)
    if not is_complement(u, comp):
        raise ValueError("provided subspace is not a complement of U")
    return Gf2Matrix(tuple(u.basis) + tuple(comp.basis), u.n)


def invert(m: Gf2Matrix) -> Gf2Matrix:
    n = m.nrows
    if n != m.ncols:
        raise ValueError("only square matrices can be inverted")
    rows = list(m.rows)
    inv = [1 << (n - 1 - i) for i in range(n)]
    perm = list(range(n))
    done = 0
    for j in range(n):
        bit = 1 << (n - 1 - j)
        piv = next((i for i in range(done, n) if rows[i] & bit), None)
        if piv is None:
            raise ValueError("matrix is singular")
        rows[done], rows[piv] = rows[piv], rows[done]
        inv[done], inv[piv] = inv[piv], inv[done]
        for i in range(n):
            if i != done and rows[i] & bit:
                rows[i] ^= rows[done]
                inv[i] ^= inv[done]
        done += 1
    # rows is now the identity, so inv holds M^[-1] in natural row order
    return Gf2Matrix(tuple(inv), n)


def transform_permutation(m: Gf2Matrix) -> np.ndarray:
    """Index permutation x -> x*M for all x, via prefix xors."""
    n = m.nrows
    out = np.zeros(1 << n, dtype=np.int64)
    for x in range(1, 1 << n):
        low = x & -x
        # bit position p of the lowest set bit is variable n-1-p
        out[x] = out[x ^ low] ^ m.rows[n - low.bit_length()]
    return out


def apply_transform(f: BooleanFunction, m: Gf2Matrix) -> BooleanFunction:
    """Composition x -> f(x * M); M must be square invertible of size n."""
    if m.nrows != f.n or m.ncols != f.n:
        raise ValueError("transform size must match the function")
    invert(m)  # raises if singular
    return BooleanFunction(f.n, f.table[transform_permutation(m)])


def apply_affine(f: BooleanFunction, m: Gf2Matrix, lin_mask: int = 0, const: int = 0) -> BooleanFunction:
    """f(x*M) ^ <lin_mask, x> ^ const, the general equivalence transform."""
    g = apply_transform(f, m)
    if lin_mask == 0 and const == 0:
        return g
    x = np.arange(1 << f.n)
    l = _parity_of(x & lin_mask) ^ const
    return BooleanFunction(f.n, g.table ^ l.astype(np.uint8))


def _parity_of(arr: np.ndarray) -> np.ndarray:
    v = arr.copy()
    for s in (16, 8, 4, 2, 1):
        v ^= v >> s
    return (v & 1).astype(np.uint8)


def gaussian_binomial(n: int, k: int) -> int:
    """Number of k-dimensional subspaces of F_2^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= (1 << (n - i)) - 1
        den *= (1 << (k - i)) - 1
    return num // den


def all_subspaces(n: int, r: int):
    """Yield every r-dimensional subspace of F_2^n once, in canonical form.

    Enumerates reduced row echelon forms directly: choose pivot bit
    positions, then fill the free entries.
    """
    from itertools import combinations

    if r == 0:
        yield Subspace(n, ())
        return
    for pivots in combinations(range(n - 1, -1, -1), r):
        # pivots descending; free slots for row i: non-pivot bits below pivots[i]
        free = []
        for i, p in enumerate(pivots):
            free.append([q for q in range(p - 1, -1, -1) if q not in pivots])
        counts = [len(fr) for fr in free]
        total = sum(counts)
        for assign in range(1 << total):
            rows = []
            pos = 0
            for i, p in enumerate(pivots):
                row = 1 << p
                for q in free[i]:
                    if assign >> pos & 1:
                        row |= 1 << q
                    pos += 1
                rows.append(row)
            yield Subspace(n, tuple(rows))


def subspaces_of(space: Subspace, r: int):
    """Yield every r-dimensional subspace of the given subspace."""
    d = space.dim
    basis = space.basis
    for inner in all_subspaces(d, r):
        rows = []
        for coeff in inner.basis:
            v = 0
            for i in range(d):
                if coeff >> (d - 1 - i) & 1:
                    v ^= basis[i]
            rows.append(v)
        yield gjb(rows, space.n)


def random_invertible(n: int, rng: np.random.Generator) -> Gf2Matrix:
    while True:
        rows = tuple(int(x) for x in rng.integers(0, 1 << n, size=n, dtype=np.int64))
        if rank(rows) == n:
            return Gf2Matrix(rows, n)


def random_equivalent(f: BooleanFunction, rng: np.random.Generator) -> BooleanFunction:
    """A random function equivalent to f: f(xA) ^ <a,x> ^ b."""
    a = random_invertible(f.n, rng)
    lin = int(rng.integers(0, 1 << f.n))
    const = int(rng.integers(0, 2))
    return apply_affine(f, a, lin, const)
