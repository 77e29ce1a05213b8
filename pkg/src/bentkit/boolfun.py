"""Boolean functions on F_2^n: truth tables, ANF, derivatives, bentness.

Conventions used across the package:

* A point of F_2^n is an n-bit integer mask.  Variable 0 is the most
  significant bit, i.e. variable ``i`` corresponds to bit ``n-1-i``.
* A truth table is a read-only numpy uint8 array of length 2**n indexed
  by point masks.
* An ANF coefficient table has the same layout, indexed by monomial masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_N = 32
# Largest n for which dense truth tables are materialized.  Above this,
# work compositionally (see constructions).
TABLE_LIMIT = 24

DEG_NONE = -1  # degree sentinel of the zero function ("no monomial")


def var_mask(i: int, n: int) -> int:
    """Mask of variable i (0-based, variable 0 most significant)."""
    if not 0 <= i < n:
        raise ValueError(f"variable index {i} out of range for n={n}")
    return 1 << (n - 1 - i)


class BooleanFunction:
    """Immutable n-variable Boolean function backed by its truth table."""

    __slots__ = ("n", "table", "_hash")

    def __init__(self, n: int, table):
        if not 0 <= n <= MAX_N:
            raise ValueError(f"n must be in 0..{MAX_N}, got {n}")
        if n > TABLE_LIMIT:
            raise ValueError(f"n={n} exceeds dense table limit {TABLE_LIMIT}")
        tab = np.ascontiguousarray(table, dtype=np.uint8)
        if tab.shape != (1 << n,):
            raise ValueError(f"table must have length 2^{n}, got {tab.shape}")
        if tab.max(initial=0) > 1:
            raise ValueError("table entries must be 0/1")
        tab.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("BooleanFunction is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BooleanFunction)
            and self.n == other.n
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.n, self.table.tobytes()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        if self.n <= 4:
            bits = "".join(str(b) for b in self.table)
            return f"BooleanFunction(n={self.n}, table={bits})"
        return f"BooleanFunction(n={self.n}, weight={int(self.table.sum())})"

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __xor__(self, other: "BooleanFunction") -> "BooleanFunction":
        if self.n != other.n:
            raise ValueError("XOR requires equal variable counts")
        return BooleanFunction(self.n, self.table ^ other.table)

    # -- serialization ---------------------------------------------------

    def to_hex(self) -> str:
        """Lowercase hex of the table bits, bit for x=0...0 first.

        Tables shorter than one hex digit (n < 2) are zero-padded on the
        right to a nibble boundary.
        """
        bits = list(self.table)
        while len(bits) % 4:
            bits.append(0)
        return "".join(
            format(bits[i] << 3 | bits[i + 1] << 2 | bits[i + 2] << 1 | bits[i + 3], "x")
            for i in range(0, len(bits), 4)
        )

    @classmethod
    def from_hex(cls, s: str, n: int | None = None) -> "BooleanFunction":
        s = s.strip().lower()
        if not s or any(c not in "0123456789abcdef" for c in s):
            raise ValueError(f"not a hex truth table: {s!r}")
        bits = np.zeros(4 * len(s), dtype=np.uint8)
        for i, c in enumerate(s):
            v = int(c, 16)
            bits[4 * i : 4 * i + 4] = [(v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1]
        if n is None:
            size = bits.size
            n = size.bit_length() - 1
            if 1 << n != size:
                raise ValueError(f"cannot infer n from {len(s)} hex digits")
        if bits.size < (1 << n) or np.any(bits[1 << n :]):
            raise ValueError(f"hex string does not encode a 2^{n}-bit table")
        return cls(n, bits[: 1 << n])


@dataclass(frozen=True, eq=False)
class Anf:
    """Monomial-coefficient view of a Boolean function."""

    n: int
    coeffs: np.ndarray  # uint8 of length 2^n, index = monomial mask
    degree: int  # DEG_NONE for the zero function

    def monomials(self) -> list[int]:
        """Set monomial masks, ascending."""
        return [int(m) for m in np.flatnonzero(self.coeffs)]

    def monomial_vars(self) -> list[tuple[int, ...]]:
        """Monomials as tuples of 0-based variable indices."""
        n = self.n
        return [
            tuple(i for i in range(n) if m >> (n - 1 - i) & 1) for m in self.monomials()
        ]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Anf)
            and self.n == other.n
            and np.array_equal(self.coeffs, other.coeffs)
        )


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    n: int
    values: np.ndarray  # int64 of length 2^n

    def is_flat(self) -> bool:
        if self.n % 2:
            return False
        return bool(np.all(np.abs(self.values) == 1 << (self.n // 2)))

    def parseval_holds(self) -> bool:
        return int(np.dot(self.values, self.values)) == 1 << (2 * self.n)


def _mobius(values: np.ndarray) -> np.ndarray:
    """Self-inverse Moebius/zeta transform over the subset lattice."""
    a = values.copy()
    full = a.size
    h = 1
    while h < full:
        a = a.reshape(-1, 2, h)
        a[:, 1, :] ^= a[:, 0, :]
        a = a.reshape(-1)
        h <<= 1
    return a


def from_anf(monomials: Iterable[Sequence[int] | int], n: int) -> BooleanFunction:
    """Build a function from monomials given as variable-index sets or masks.

    Duplicate monomials cancel (XOR semantics).
    """
    coeffs = np.zeros(1 << n, dtype=np.uint8)
    for mono in monomials:
        if isinstance(mono, (int, np.integer)):
            mask = int(mono)
            if not 0 <= mask < (1 << n):
                raise ValueError(f"monomial mask {mask} out of range for n={n}")
        else:
            mask = 0
            for i in mono:
                bit = var_mask(int(i), n)
                if mask & bit:
                    raise ValueError(f"duplicate variable {i} in monomial {tuple(mono)}")
                mask |= bit
        coeffs[mask] ^= 1
    return BooleanFunction(n, _mobius(coeffs))


def to_anf(f: BooleanFunction) -> Anf:
    coeffs = _mobius(f.table)
    set_masks = np.flatnonzero(coeffs)
    if set_masks.size == 0:
        deg = DEG_NONE
    else:
        deg = max(int(m).bit_count() for m in set_masks)
    coeffs.flags.writeable = False
    return Anf(f.n, coeffs, deg)


def degree(f: BooleanFunction) -> int:
    """Algebraic degree; DEG_NONE for the zero function."""
    return to_anf(f).degree


def is_constant(f: BooleanFunction) -> bool:
    return degree(f) <= 0


def is_homogeneous(f: BooleanFunction, d: int) -> bool:
    """True iff the ANF is nonempty and every monomial has degree exactly d."""
    masks = to_anf(f).monomials()
    if not masks:
        return False
    return all(m.bit_count() == d for m in masks)


def derivative(f: BooleanFunction, a: int) -> BooleanFunction:
    """First-order derivative x -> f(x^a) ^ f(x)."""
    if not 0 <= a < (1 << f.n):
        raise ValueError(f"direction {a} out of range for n={f.n}")
    idx = np.arange(1 << f.n) ^ a
    return BooleanFunction(f.n, f.table[idx] ^ f.table)


def second_derivative(f: BooleanFunction, a: int, b: int) -> BooleanFunction:
    return derivative(derivative(f, a), b)


def derivative_constant_term(f: BooleanFunction, a: int, b: int) -> int:
    """Constant term of the second derivative: D_{a,b}f evaluated at 0."""
    t = f.table
    return int(t[a ^ b] ^ t[a] ^ t[b] ^ t[0])


def relaxed_second_derivative(f: BooleanFunction, a: int, b: int) -> BooleanFunction:
    """Second derivative with its constant term stripped (always maps 0 to 0)."""
    d = second_derivative(f, a, b)
    if derivative_constant_term(f, a, b):
        return BooleanFunction(f.n, d.table ^ 1)
    return d


def span(vectors: Iterable[int]) -> list[int]:
    """All elements of the GF(2) span, ascending."""
    basis: list[int] = []
    for v in vectors:
        w = int(v)
        for b in basis:
            w = min(w, w ^ b)
        if w:
            basis.append(w)
            basis.sort(reverse=True)
    out = [0]
    for b in basis:
        out += [x ^ b for x in out]
    return sorted(out)


def higher_derivative(f: BooleanFunction, dirs: Sequence[int]) -> BooleanFunction:
    """k-th order derivative; zero function when dirs are linearly dependent."""
    sp = span(dirs)
    if len(sp) != 1 << len(dirs):
        return zero_function(f.n)
    acc = np.zeros(1 << f.n, dtype=np.uint8)
    idx = np.arange(1 << f.n)
    for a in sp:
        acc ^= f.table[idx ^ a]
    return BooleanFunction(f.n, acc)


def walsh_spectrum(f: BooleanFunction) -> WalshSpectrum:
    v = (1 - 2 * f.table.astype(np.int64)).copy()
    h = 1
    while h < v.size:
        w = v.reshape(-1, 2, h)
        top = w[:, 0, :].copy()
        w[:, 0, :] = top + w[:, 1, :]
        w[:, 1, :] = top - w[:, 1, :]
        h <<= 1
    v.flags.writeable = False
    return WalshSpectrum(f.n, v)


def is_bent(f: BooleanFunction) -> bool:
    """Walsh-flatness test; odd or zero n is never bent."""
    if f.n % 2 or f.n == 0:
        return False
    return walsh_spectrum(f).is_flat()


def fast_point_space(f: BooleanFunction):
    """Subspace of directions a with deg(D_a f) < deg(f) - 1.

    Rejects constant input (the dimension bound needs a degree).
    """
    from .gf2 import gjb, nullspace

    d = degree(f)
    if d <= 0:
        raise ValueError("fast points are undefined for constant functions")
    n = f.n
    if d == 3:
        # For a cubic, the quadratic part of D_a f is linear in a: the x_i x_j
        # coefficient is the xor of a_k over cubic monomials {i,j,k}.  Fast
        # points are the nullspace of those constraints.
        constraints: dict[int, int] = {}
        for m in to_anf(f).monomials():
            if m.bit_count() == 3:
                b = [1 << k for k in range(n) if m >> k & 1]
                for pair, single in (
                    (b[0] | b[1], b[2]),
                    (b[0] | b[2], b[1]),
                    (b[1] | b[2], b[0]),
                ):
                    constraints[pair] = constraints.get(pair, 0) ^ single
        return gjb(nullspace([c for c in constraints.values() if c], n), n)
    fast = [a for a in range(1, 1 << n) if degree(derivative(f, a)) < d - 1]
    return gjb(fast, n)


def direct_sum(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    """h(x,y) = f(x) ^ g(y) with f's variables in the high-order block."""
    n = f.n + g.n
    if n > TABLE_LIMIT:
        raise ValueError(f"direct sum on {n} variables exceeds table limit {TABLE_LIMIT}")
    table = (f.table[:, None] ^ g.table[None, :]).reshape(-1)
    return BooleanFunction(n, table)


def k_fold(f: BooleanFunction, k: int) -> BooleanFunction:
    if k < 1:
        raise ValueError("k must be >= 1")
    out = f
    for _ in range(k - 1):
        out = direct_sum(out, f)
    return out


def zero_function(n: int) -> BooleanFunction:
    return BooleanFunction(n, np.zeros(1 << n, dtype=np.uint8))
