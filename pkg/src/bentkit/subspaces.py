"""M-subspace and relaxed M-subspace machinery.

An M-subspace of f is a subspace U on which every second-order derivative
D_{a,b}f is the constant zero function; the relaxed variant allows the
constant one as well.  For functions of degree <= 3 the second derivative
is affine, so membership splits into a bilinear condition on (a, b) (the
linear part) plus truth-table lookups (the constant term).  All enumeration
here exploits that split: candidate extension vectors of a partial subspace
form the joint GF(2) kernel of the bilinear forms attached to its basis,
and the level-by-level growth runs on packed basis-row arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from ._kernels import dfs_collect, grow_chunk, parity16_table, seed_pairs
from .boolfun import BooleanFunction, degree, second_derivative, to_anf
from .errors import BudgetExceededError
from .gf2 import Gf2Matrix, Subspace, apply_transform, change_of_basis, gjb, nullspace

_PAR16 = parity16_table()

# ktab-based seeding and growth need masks indexable by the parity table
_KTAB_LIMIT = 16


@dataclass(frozen=True)
class SubspaceCollection:
    """All r-dimensional (relaxed) M-subspaces of one function."""

    r: int
    members: tuple[Subspace, ...]

    def __post_init__(self):
        ordered = tuple(sorted(set(self.members), key=lambda s: s.basis))
        object.__setattr__(self, "members", ordered)
        for s in ordered:
            if s.dim != self.r:
                raise ValueError("collection members must all have dimension r")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s: Subspace) -> bool:
        return s in set(self.members)

    def basis_rows(self) -> list[tuple[int, ...]]:
        return [s.basis for s in self.members]

    def __str__(self) -> str:
        """Appendix format: one subspace per line, base-32 tokens per row."""
        from .catalog import format_base32

        return "\n".join(
            " ".join(format_base32(b) for b in s.basis) for s in self.members
        )


@lru_cache(maxsize=128)
def _deriv_tables(f: BooleanFunction):
    """ktab for degree <= 3 functions, None otherwise.

    ktab[a][p] is the mask with bit q set iff the cubic part of f contains
    the monomial on bit positions {p, q, l} for some l in a; the linear part
    of D_{a,b}f vanishes iff <ktab[a][p], b> = 0 for every p.
    """
    if degree(f) > 3 or f.n > _KTAB_LIMIT:
        return None
    n = f.n
    tmat = np.zeros((n, n), dtype=np.int64)
    for m in to_anf(f).monomials():
        if m.bit_count() == 3:
            p, q, r = [k for k in range(n) if m >> k & 1]
            tmat[p, q] |= 1 << r
            tmat[q, p] |= 1 << r
            tmat[p, r] |= 1 << q
            tmat[r, p] |= 1 << q
            tmat[q, r] |= 1 << p
            tmat[r, q] |= 1 << p
    ktab = np.zeros((1 << n, n), dtype=np.int64)
    for x in range(1, 1 << n):
        low = x & -x
        ktab[x] = ktab[x ^ low] ^ tmat[:, low.bit_length() - 1]
    return ktab


def _linear_part_vanishes(ktab: np.ndarray, a: int, b: int) -> bool:
    row = ktab[a]
    for p in range(row.shape[0]):
        if _PAR16[row[p] & b]:
            return False
    return True


def _canonical_pairs(u: Subspace) -> Iterable[tuple[int, int]]:
    """One representative pair per 2-dimensional subspace of U."""
    elems = [e for e in u.elements() if e]
    for i, a in enumerate(elems):
        for b in elems[i + 1 :]:
            if a ^ b > b:
                yield a, b


def _check_subspace(f: BooleanFunction, u: Subspace, relaxed: bool) -> bool:
    if u.n != f.n:
        raise ValueError("subspace lives in a different dimension")
    if u.dim <= 1:
        return True
    ktab = _deriv_tables(f)
    tab = f.table
    if ktab is not None:
        basis = u.basis
        for i, a in enumerate(basis):
            for b in basis[i + 1 :]:
                if not _linear_part_vanishes(ktab, a, b):
                    return False
        if relaxed:
            return True
        # constant terms vanish iff x -> f(x)^f(0) is additive on U
        g0 = int(tab[0])
        elems = u.elements()
        gval = {e: int(tab[e]) ^ g0 for e in elems}
        for b in u.basis:
            for e in elems:
                if gval[e ^ b] != gval[e] ^ gval[b]:
                    return False
        return True
    # generic fallback for degree > 3
    for a, b in _canonical_pairs(u):
        d = second_derivative(f, a, b)
        vals = np.unique(d.table)
        if relaxed:
            if vals.size != 1:
                return False
        elif vals.size != 1 or vals[0] != 0:
            return False
    return True


def is_m_subspace(f: BooleanFunction, u: Subspace) -> bool:
    """True iff every second derivative along U is constant zero."""
    return _check_subspace(f, u, relaxed=False)


def is_relaxed_m_subspace(f: BooleanFunction, u: Subspace) -> bool:
    """True iff every second derivative along U is constant (zero or one)."""
    return _check_subspace(f, u, relaxed=True)


def _seeds(f: BooleanFunction, relaxed: bool) -> np.ndarray:
    """Canonical 2-dim bases as an (N, 2) array of rows (descending)."""
    n = f.n
    ktab = _deriv_tables(f)
    if ktab is not None:
        a_arr, b_arr = seed_pairs(ktab, f.table, strict=not relaxed)
        return np.stack([b_arr, a_arr], axis=1) if a_arr.size else np.empty((0, 2), np.int64)
    # degree > 3: test second derivatives directly (small n only)
    rows = []
    idx = np.arange(1 << n)
    tab = f.table
    for a in range(1, 1 << n):
        ta = tab[idx ^ a]
        for b in range(a + 1, 1 << n):
            if a ^ b < b:
                continue
            d = tab[idx ^ a ^ b] ^ ta ^ tab[idx ^ b] ^ tab
            ok = not np.any(d != d[0]) if relaxed else not d.any()
            if ok:
                rows.append((b, a))
    return np.asarray(rows, dtype=np.int64) if rows else np.empty((0, 2), np.int64)


def _grow_python(f, frontier, relaxed, counter, budget, flags):
    """Object-path fallback for degree-> 3 inputs (kept small by callers)."""
    n = f.n
    out = set()
    for ui in range(frontier.shape[0]):
        u = Subspace(n, tuple(int(x) for x in frontier[ui]))
        for v in range(1, 1 << n):
            if u.contains(v):
                continue
            counter[0] += 1
            if budget is not None and counter[0] > budget:
                raise BudgetExceededError(
                    f"subspace extension budget {budget} exceeded", lower_bound=u.dim
                )
            w = gjb(list(u.basis) + [v], n)
            if _check_subspace(f, w, relaxed):
                if flags is not None:
                    flags[ui] = 1
                out.add(w.basis)
    if not out:
        return np.empty((0, frontier.shape[1] + 1), np.int64)
    return np.asarray(sorted(out), dtype=np.int64)


def _grow_array(
    f: BooleanFunction,
    frontier: np.ndarray,
    relaxed: bool,
    counter: list[int],
    budget: int | None,
    flags: np.ndarray | None = None,
) -> np.ndarray:
    """One Algorithm-1 round: all (r+1)-dim valid extensions, deduplicated."""
    n = f.n
    r = frontier.shape[1]
    ktab = _deriv_tables(f)
    if ktab is None:
        return _grow_python(f, frontier, relaxed, counter, budget, flags)
    if flags is None:
        flags = np.zeros(frontier.shape[0], dtype=np.uint8)
    cap = 2_000_000 + (1 << (n - r))
    cnt = np.zeros(1, dtype=np.int64)
    cnt[0] = counter[0]
    budget_val = -1 if budget is None else int(budget)
    chunks = []
    start = 0
    while start < frontier.shape[0]:
        out = np.empty((cap, r + 1), dtype=np.int64)
        written, nxt, hit = grow_chunk(
            frontier,
            start,
            ktab,
            f.table,
            np.uint8(0 if relaxed else 1),
            _PAR16,
            out,
            flags,
            cnt,
            budget_val,
        )
        counter[0] = int(cnt[0])
        if written:
            chunks.append(np.unique(out[:written], axis=0))
        if hit:
            raise BudgetExceededError(
                f"subspace extension budget {budget} exceeded", lower_bound=r
            )
        if nxt == start:
            raise AssertionError("extension buffer too small for one frontier entry")
        start = nxt
    if not chunks:
        return np.empty((0, r + 1), np.int64)
    return np.unique(np.vstack(chunks), axis=0)


def _materialize(rows: np.ndarray, n: int, r: int) -> SubspaceCollection:
    members = tuple(Subspace(n, tuple(int(x) for x in row)) for row in rows)
    return SubspaceCollection(r, members)


def _dfs_level(
    f: BooleanFunction,
    relaxed: bool,
    target: int,
    early_stop: int | None,
    budget: int | None,
) -> np.ndarray:
    """All dimension-`target` members as basis rows, via the canonical DFS."""
    seeds = _seeds(f, relaxed)
    if target == 2 or seeds.shape[0] == 0:
        rows = seeds[: early_stop if early_stop else None]
        return rows if target == 2 else np.empty((0, target), np.int64)
    ktab = _deriv_tables(f)
    if ktab is None:
        # object-path fallback for degree > 3 (small n only)
        counter = [0]
        level = seeds
        dim = 2
        while dim < target and level.shape[0]:
            level = _grow_array(f, level, relaxed, counter, budget)
            dim += 1
        return level if dim == target else np.empty((0, target), np.int64)
    cap = early_stop if early_stop else 1 << 18
    budget_val = -1 if budget is None else int(budget)
    while True:
        out = np.empty((cap, target), dtype=np.int64)
        found, tested, hit = dfs_collect(
            seeds,
            ktab,
            f.table,
            np.uint8(0 if relaxed else 1),
            target,
            int(early_stop or 0),
            budget_val,
            out,
        )
        if hit:
            raise BudgetExceededError(
                f"subspace search budget {budget} exceeded at dimension {target}"
            )
        if found <= cap:
            return out[:found]
        cap = found  # exhaustive run overflowed the buffer; rerun sized


def _enumerate(
    f: BooleanFunction,
    r: int,
    relaxed: bool,
    budget: int | None = None,
    early_stop: int | None = None,
    progress=None,
) -> SubspaceCollection:
    n = f.n
    if not 2 <= r <= n:
        raise ValueError(f"r must be in 2..{n}, got {r}")
    rows = _dfs_level(f, relaxed, r, early_stop, budget)
    if progress:
        progress(r, rows.shape[0])
    if rows.shape[0] == 0:
        return SubspaceCollection(r, ())
    rows = np.unique(rows, axis=0)
    return _materialize(rows, n, r)


def enumerate_ms(
    f: BooleanFunction,
    r: int,
    budget: int | None = None,
    early_stop: int | None = None,
    progress=None,
) -> SubspaceCollection:
    """The collection MS_r(f), grown one dimension at a time from MS_2(f)."""
    return _enumerate(f, r, relaxed=False, budget=budget, early_stop=early_stop, progress=progress)


def enumerate_rms(
    f: BooleanFunction,
    r: int,
    budget: int | None = None,
    early_stop: int | None = None,
    progress=None,
) -> SubspaceCollection:
    """The collection RMS_r(f): relaxed second-derivative predicate."""
    return _enumerate(f, r, relaxed=True, budget=budget, early_stop=early_stop, progress=progress)


def _index(f: BooleanFunction, relaxed: bool, budget: int | None) -> int:
    n = f.n
    if n == 0:
        raise ValueError("index undefined for 0-variable functions")
    d = degree(f)
    if d <= 1:
        return n  # all second derivatives vanish identically
    if relaxed and d == 2:
        return n  # second derivatives of quadratics are constants
    if _seeds(f, relaxed).shape[0] == 0:
        return 1
    dim = 2
    while dim < n:
        try:
            witness = _dfs_level(f, relaxed, dim + 1, early_stop=1, budget=budget)
        except BudgetExceededError as e:
            e.lower_bound = dim
            raise
        if witness.shape[0] == 0:
            return dim
        dim += 1
    return dim


def linearity_index(f: BooleanFunction, budget: int | None = None) -> int:
    """Largest r with MS_r(f) nonempty (bottom-up, early abort on empty)."""
    return _index(f, relaxed=False, budget=budget)


def relaxed_linearity_index(f: BooleanFunction, budget: int | None = None) -> int:
    """Largest r with RMS_r(f) nonempty."""
    return _index(f, relaxed=True, budget=budget)


def maximal_members(f: BooleanFunction, relaxed: bool, budget: int | None = None) -> list[Subspace]:
    """Inclusion-maximal (relaxed) M-subspaces, any dimension >= 1."""
    counter = [0]
    level = _seeds(f, relaxed)
    n = f.n
    out: list[Subspace] = []
    # 1-dim subspaces are always valid; maximal ones lie in no valid pair
    if level.shape[0]:
        covered = set(np.unique(np.concatenate([level[:, 0], level[:, 1], level[:, 0] ^ level[:, 1]])))
    else:
        covered = set()
    out.extend(gjb([v], n) for v in range(1, 1 << n) if v not in covered)
    while level.shape[0]:
        flags = np.zeros(level.shape[0], dtype=np.uint8)
        nxt = _grow_array(f, level, relaxed, counter, budget, flags)
        out.extend(
            Subspace(n, tuple(int(x) for x in level[i]))
            for i in range(level.shape[0])
            if not flags[i]
        )
        level = nxt
    return sorted(out, key=lambda s: (-s.dim, s.basis))


def in_completed_mm(f: BooleanFunction, budget: int | None = None) -> bool:
    """Membership in the completed Maiorana-McFarland class (n even)."""
    if f.n % 2:
        raise ValueError("completed MM membership is defined for even n")
    if degree(f) <= 1:
        return True
    return len(enumerate_ms(f, f.n // 2, budget=budget, early_stop=1)) > 0


@dataclass(frozen=True)
class MmRepresentation:
    """f(z A) = <x, pi(y)>_r ^ phi(y) with x the leading r coordinates."""

    r: int
    s: int
    pi: np.ndarray  # int64 of length 2^s, values are r-bit masks
    phi: BooleanFunction
    transform: Gf2Matrix

    def reconstruct(self) -> BooleanFunction:
        """The transformed function <x, pi(y)> ^ phi(y) as a table."""
        xs = np.arange(1 << self.r, dtype=np.int64)
        inner = _PAR16[np.bitwise_and.outer(xs, self.pi)]
        return BooleanFunction(self.r + self.s, (inner ^ self.phi.table[None, :]).reshape(-1))

    def pi_is_permutation(self) -> bool:
        return self.r == self.s and np.unique(self.pi).size == 1 << self.s


def mm_representation(
    f: BooleanFunction, u: Subspace, comp: Subspace | None = None
) -> MmRepresentation:
    """Extract pi, phi and the change of basis aligning U with the x-block.

    Raises with a violating 2-dimensional subspace named when U is not an
    M-subspace of f.
    """
    r = u.dim
    n = f.n
    if not 0 < r < n:
        raise ValueError("need 0 < dim(U) < n for an MM representation")
    if not is_m_subspace(f, u):
        for a, b in _canonical_pairs(u):
            d = second_derivative(f, a, b).table
            if d.any():
                raise ValueError(
                    f"U is not an M-subspace: D_({a:#x},{b:#x})f is not constant zero"
                )
        raise AssertionError("unreachable")
    a_u = change_of_basis(u, comp)
    g = apply_transform(f, a_u)
    s = n - r
    phi_tab = g.table[: 1 << s].copy()  # x = 0 block
    pi = np.zeros(1 << s, dtype=np.int64)
    for i in range(r):
        x = 1 << (r - 1 - i)
        block = g.table[x << s : (x << s) + (1 << s)]
        pi |= (block ^ phi_tab).astype(np.int64) << (r - 1 - i)
    rep = MmRepresentation(r, s, pi, BooleanFunction(s, phi_tab), a_u)
    if rep.reconstruct() != g:
        raise AssertionError("MM reconstruction identity failed")  # pragma: no cover
    return rep
