"""Numba kernels for the hot paths: pair seeding, packed GF(2) rank,
and the power-of-two Smith-normal-form elimination.
"""

from __future__ import annotations

import numpy as np
from numba import config, njit, prange

# the default TBB probe warns on older system TBB; workqueue is always available
config.THREADING_LAYER = "workqueue"

# parity-of-popcount lookup for masks below 2^16
_PAR16 = np.zeros(1 << 16, dtype=np.uint8)
_tmp = np.arange(1 << 16, dtype=np.uint32)
for _s in (8, 4, 2, 1):
    _tmp ^= _tmp >> _s
_PAR16[:] = _tmp & 1
del _tmp


def parity16_table() -> np.ndarray:
    return _PAR16


@njit(cache=True)
def _count_pairs(ktab, table, strict, par):
    n_pts = ktab.shape[0]
    nvars = ktab.shape[1]
    count = 0
    for a in range(1, n_pts):
        for b in range(a + 1, n_pts):
            c = a ^ b
            if c < b:
                continue  # each 2-dim subspace via its two smallest nonzero points
            ok = True
            for p in range(nvars):
                if par[ktab[a, p] & b]:
                    ok = False
                    break
            if not ok:
                continue
            if strict and (table[c] ^ table[a] ^ table[b] ^ table[0]):
                continue
            count += 1
    return count


@njit(cache=True)
def _fill_pairs(ktab, table, strict, par, out_a, out_b):
    n_pts = ktab.shape[0]
    nvars = ktab.shape[1]
    k = 0
    for a in range(1, n_pts):
        for b in range(a + 1, n_pts):
            c = a ^ b
            if c < b:
                continue
            ok = True
            for p in range(nvars):
                if par[ktab[a, p] & b]:
                    ok = False
                    break
            if not ok:
                continue
            if strict and (table[c] ^ table[a] ^ table[b] ^ table[0]):
                continue
            out_a[k] = a
            out_b[k] = b
            k += 1
    return k


def seed_pairs(ktab: np.ndarray, table: np.ndarray, strict: bool):
    """Canonical pairs (a < b < a^b) whose second derivative is constant
    (relaxed) or constant zero (strict), for functions of degree <= 3."""
    strict_flag = np.uint8(1 if strict else 0)
    cnt = _count_pairs(ktab, table, strict_flag, _PAR16)
    out_a = np.empty(cnt, dtype=np.int64)
    out_b = np.empty(cnt, dtype=np.int64)
    _fill_pairs(ktab, table, strict_flag, _PAR16, out_a, out_b)
    return out_a, out_b


@njit(cache=True)
def _lead_bit_pos(v, n):
    for p in range(n - 1, -1, -1):
        if v >> p & 1:
            return p
    return -1


@njit(cache=True)
def grow_chunk(frontier, start, ktab, table, strict, par, out, flags, counter, budget):
    """Resumable Algorithm-1 extension round over a frontier of basis rows.

    frontier: (N, r) canonical GJB rows.  Writes canonical (r+1)-row bases of
    valid extensions into `out` until it runs out of headroom; returns
    (written, next_start, budget_hit).  flags[u] is set when u has any valid
    extension.  counter[0] accumulates candidate tests.
    """
    n_front, r = frontier.shape
    n = ktab.shape[1]
    cap = out.shape[0]
    written = 0
    u = start
    headroom = 1 << (n - r)
    elems = np.empty(1 << r, np.int64)
    gval = np.empty(1 << r, np.uint8)
    rref = np.empty(n, np.int64)
    piv = np.empty(n, np.int64)
    ext = np.empty(n, np.int64)
    comb = np.empty(1 << (n - r), np.int64)
    wrows = np.empty(r + 1, np.int64)
    g0 = np.int64(table[0])
    while u < n_front:
        if written + headroom > cap:
            break
        # reduced row-space basis of the bilinear constraints of U's basis
        nb = 0
        for j in range(r):
            b = frontier[u, j]
            for p in range(n):
                v = ktab[b, p]
                for t in range(nb):
                    if v ^ rref[t] < v:
                        v ^= rref[t]
                if v:
                    lead = _lead_bit_pos(v, n)
                    for t in range(nb):
                        if rref[t] >> lead & 1:
                            rref[t] ^= v
                    pos = nb
                    while pos > 0 and rref[pos - 1] < v:
                        rref[pos] = rref[pos - 1]
                        piv[pos] = piv[pos - 1]
                        pos -= 1
                    rref[pos] = v
                    piv[pos] = lead
                    nb += 1
        # kernel basis of the constraints
        ne = 0
        for q in range(n - 1, -1, -1):
            is_piv = False
            for t in range(nb):
                if piv[t] == q:
                    is_piv = True
                    break
            if is_piv:
                continue
            v = np.int64(1) << q
            for t in range(nb):
                if rref[t] >> q & 1:
                    v |= np.int64(1) << piv[t]
            # reduce modulo U rows, then modulo already collected extensions
            for j in range(r):
                if v ^ frontier[u, j] < v:
                    v ^= frontier[u, j]
            for t in range(ne):
                if v ^ ext[t] < v:
                    v ^= ext[t]
            if v:
                ext[ne] = v
                ne += 1
        if ne == 0:
            u += 1
            continue
        ncand = (1 << ne) - 1
        counter[0] += ncand
        if budget > 0 and counter[0] > budget:
            return written, u, 1
        if strict:
            elems[0] = 0
            gval[0] = 0
            size = 1
            for j in range(r):
                b = frontier[u, j]
                gb = np.uint8(table[b] ^ g0)
                for t in range(size):
                    elems[size + t] = elems[t] ^ b
                    gval[size + t] = gval[t] ^ gb
                size += size
        comb[0] = 0
        for mask in range(1, ncand + 1):
            low = mask & -mask
            lowpos = _lead_bit_pos(low, n)
            v = comb[mask ^ low] ^ ext[lowpos]
            comb[mask] = v
            if strict:
                gv = np.uint8(table[v] ^ g0)
                ok = True
                for t in range(1 << r):
                    if np.uint8(table[v ^ elems[t]] ^ g0) != np.uint8(gv ^ gval[t]):
                        ok = False
                        break
                if not ok:
                    continue
            flags[u] = 1
            # canonical insertion of v into the (already canonical) U rows
            w = v
            for j in range(r):
                if w ^ frontier[u, j] < w:
                    w ^= frontier[u, j]
            lead = _lead_bit_pos(w, n)
            k = 0
            pos = -1
            for j in range(r):
                row = frontier[u, j]
                if row >> lead & 1:
                    row ^= w
                wrows[k] = row
                k += 1
            # insert keeping descending order
            wrows[r] = w
            pos = r
            while pos > 0 and wrows[pos - 1] < wrows[pos]:
                tmp = wrows[pos - 1]
                wrows[pos - 1] = wrows[pos]
                wrows[pos] = tmp
                pos -= 1
            for j in range(r + 1):
                out[written, j] = wrows[j]
            written += 1
        u += 1
    return written, u, 0


@njit(cache=True)
def _kernel_basis(basis, k, ktab, n, rref, piv, ker):
    """Joint GF(2) kernel of the bilinear constraints of k basis rows.

    Returns the kernel dimension; kernel basis vectors land in ker.
    """
    nb = 0
    for j in range(k):
        b = basis[j]
        for p in range(n):
            v = ktab[b, p]
            for t in range(nb):
                if v ^ rref[t] < v:
                    v ^= rref[t]
            if v:
                lead = _lead_bit_pos(v, n)
                for t in range(nb):
                    if rref[t] >> lead & 1:
                        rref[t] ^= v
                pos = nb
                while pos > 0 and rref[pos - 1] < v:
                    rref[pos] = rref[pos - 1]
                    piv[pos] = piv[pos - 1]
                    pos -= 1
                rref[pos] = v
                piv[pos] = lead
                nb += 1
    ne = 0
    for q in range(n - 1, -1, -1):
        is_piv = False
        for t in range(nb):
            if piv[t] == q:
                is_piv = True
                break
        if is_piv:
            continue
        v = np.int64(1) << q
        for t in range(nb):
            if rref[t] >> q & 1:
                v |= np.int64(1) << piv[t]
        ker[ne] = v
        ne += 1
    return ne


@njit(cache=True)
def dfs_collect(seeds, ktab, table, strict, target, early_stop, budget, out):
    """Depth-first enumeration of dimension-`target` (relaxed) M-subspaces.

    Each subspace is visited exactly once along its value-prefix chain: a
    node U extends only by v greater than U's largest element and minimal in
    its coset.  Branches whose constraint kernel is smaller than `target`
    cannot reach it and are pruned.

    Returns (found, tested, budget_hit); found rows are written to `out`
    (capped at its size; early_stop <= out.shape[0] stops the search early,
    early_stop = 0 means exhaust).
    """
    n = ktab.shape[1]
    cap = out.shape[0]
    basis = np.zeros((target + 1, target), np.int64)
    maxel = np.zeros(target + 1, np.int64)
    elems = np.zeros((target + 1, 1 << target), np.int64)
    cands = np.zeros((target + 1, 1 << n), np.int64)
    cand_cnt = np.zeros(target + 1, np.int64)
    cand_idx = np.zeros(target + 1, np.int64)
    comb = np.empty(1 << n, np.int64)
    rref = np.empty(n, np.int64)
    piv = np.empty(n, np.int64)
    ker = np.empty(n, np.int64)
    wrows = np.empty(target, np.int64)
    found = 0
    tested = 0
    g0 = np.int64(table[0])
    for si in range(seeds.shape[0]):
        a = seeds[si, 1]
        b = seeds[si, 0]
        basis[2, 0] = b
        basis[2, 1] = a
        elems[2, 0] = 0
        elems[2, 1] = a
        elems[2, 2] = b
        elems[2, 3] = a ^ b
        maxel[2] = a ^ b
        if target == 2:
            if found < cap:
                out[found, 0] = b
                out[found, 1] = a
            found += 1
            if early_stop and found >= early_stop:
                return found, tested, 0
            continue
        depth = 2
        # compute candidate lists on entry to a depth
        descend = True
        while depth >= 2:
            if descend:
                descend = False
                k = depth
                ne = _kernel_basis(basis[k], k, ktab, n, rref, piv, ker)
                cnt = 0
                if ne >= target:
                    comb[0] = 0
                    top = (1 << ne) - 1
                    for mask in range(1, top + 1):
                        low = mask & -mask
                        v = comb[mask ^ low] ^ ker[_lead_bit_pos(low, n)]
                        comb[mask] = v
                        if v <= maxel[k]:
                            continue
                        # minimal in its coset modulo U
                        red = v
                        for j in range(k):
                            if red ^ basis[k, j] < red:
                                red ^= basis[k, j]
                        if red != v:
                            continue
                        tested += 1
                        if strict:
                            gv = np.uint8(table[v] ^ g0)
                            ok = True
                            for t in range(1 << k):
                                e = elems[k, t]
                                if np.uint8(table[v ^ e] ^ g0) != np.uint8(gv ^ np.uint8(table[e] ^ g0)):
                                    ok = False
                                    break
                            if not ok:
                                continue
                        cands[k, cnt] = v
                        cnt += 1
                cand_cnt[k] = cnt
                cand_idx[k] = 0
                if budget > 0 and tested > budget:
                    return found, tested, 1
            if cand_idx[depth] >= cand_cnt[depth]:
                depth -= 1
                continue
            v = cands[depth, cand_idx[depth]]
            cand_idx[depth] += 1
            k = depth
            # canonical insertion of v into basis
            lead = _lead_bit_pos(v, n)
            for j in range(k):
                row = basis[k, j]
                if row >> lead & 1:
                    row ^= v
                wrows[j] = row
            wrows[k] = v
            pos = k
            while pos > 0 and wrows[pos - 1] < wrows[pos]:
                tmp = wrows[pos - 1]
                wrows[pos - 1] = wrows[pos]
                wrows[pos] = tmp
                pos -= 1
            if k + 1 == target:
                if found < cap:
                    for j in range(target):
                        out[found, j] = wrows[j]
                found += 1
                if early_stop and found >= early_stop:
                    return found, tested, 0
                continue
            # push child
            for j in range(k + 1):
                basis[k + 1, j] = wrows[j]
            half = 1 << k
            me = maxel[k]
            for t in range(half):
                e = elems[k, t]
                elems[k + 1, t] = e
                ev = e ^ v
                elems[k + 1, half + t] = ev
                if ev > me:
                    me = ev
            maxel[k + 1] = me
            depth = k + 1
            descend = True
    return found, tested, 0


@njit(cache=True)
def packed_rank(mat):
    """GF(2) rank of a uint64 bit-packed row matrix (destroys mat)."""
    nrows, nwords = mat.shape
    rank = 0
    for w in range(nwords):
        bit = np.uint64(1) << np.uint64(63)
        for _ in range(64):
            piv = -1
            for r in range(rank, nrows):
                if mat[r, w] & bit:
                    piv = r
                    break
            if piv >= 0:
                if piv != rank:
                    for t in range(w, nwords):
                        tmp = mat[rank, t]
                        mat[rank, t] = mat[piv, t]
                        mat[piv, t] = tmp
                for r in range(rank + 1, nrows):
                    if mat[r, w] & bit:
                        for t in range(w, nwords):
                            mat[r, t] ^= mat[rank, t]
                rank += 1
                if rank == nrows:
                    return rank
            bit >>= np.uint64(1)
    return rank


@njit(cache=True, parallel=True)
def _eliminate(R, k, m, vmin, mask):
    pr = R[k]
    for i in prange(k + 1, m):
        q = R[i, k]
        if q:
            t64 = np.int64(q) >> vmin
            for t in range(k, m):
                R[i, t] = np.int32((np.int64(R[i, t]) - t64 * np.int64(pr[t])) & mask)


@njit(cache=True)
def _find_pivot(R, k, m, vmin):
    for i in range(k, m):
        for j in range(k, m):
            if (R[i, j] >> vmin) & 1:
                return i, j
    return -1, -1


def snf_pow2(R: np.ndarray, K: int) -> np.ndarray:
    """Elementary-divisor valuations of an integer matrix whose divisors are
    powers of two, eliminating over Z/2^K with minimal-valuation pivoting.

    R is int32, square, entries already reduced mod 2^K; destroyed in place.
    Returns per-pivot valuations; -1 marks entries that vanished mod 2^K
    (true divisor is 0 or >= 2^K, the caller decides which).
    """
    m = R.shape[0]
    mask = np.int64((1 << K) - 1)
    vals = np.full(m, -1, dtype=np.int64)
    vmin = 0
    for k in range(m):
        while vmin < K:
            pi, pj = _find_pivot(R, k, m, vmin)
            if pi >= 0:
                break
            vmin += 1
        if vmin >= K:
            break
        if pi != k:
            R[[k, pi], k:] = R[[pi, k], k:]
        if pj != k:
            R[k:, [k, pj]] = R[k:, [pj, k]]
        # scale the pivot row so the pivot becomes exactly 2^vmin
        u = np.int64(R[k, k]) >> vmin
        x = u
        for _ in range(6):
            x = (x * (2 - u * x)) & mask
        R[k, k:] = (R[k, k:].astype(np.int64) * x) & mask
        _eliminate(R, k, m, vmin, mask)
        vals[k] = vmin
    return vals
