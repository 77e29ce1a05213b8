"""Builders and certificates: MM bent functions, direct-sum concatenations,
the omega-set generation pipeline, and outside-M# certification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import parity16_table
from .boolfun import (
    TABLE_LIMIT,
    BooleanFunction,
    direct_sum,
    is_bent,
    is_homogeneous,
    to_anf,
    zero_function,
)
from .catalog import Catalog, format_anf
from .errors import BudgetExceededError, UnsourcedEntryError, VerificationFailedError
from .gf2 import (
    Gf2Matrix,
    Subspace,
    apply_transform,
    gaussian_binomial,
    gjb,
    invert,
    subspaces_of,
)
from .invariants import gamma_rank
from .subspaces import (
    MmRepresentation,
    is_m_subspace,
    maximal_members,
    mm_representation,
    relaxed_linearity_index,
)

_PAR16 = parity16_table()


def mm_function(pi: Sequence[int], phi: BooleanFunction, r: int) -> BooleanFunction:
    """General Maiorana-McFarland form <x, pi(y)>_r ^ phi(y) on r + s variables."""
    s = phi.n
    pi_arr = np.asarray(pi, dtype=np.int64)
    if pi_arr.shape != (1 << s,):
        raise ValueError(f"pi must map all 2^{s} points")
    if pi_arr.min() < 0 or pi_arr.max() >= 1 << r:
        raise ValueError(f"pi values must fit in {r} bits")
    xs = np.arange(1 << r, dtype=np.int64)
    inner = _PAR16[np.bitwise_and.outer(xs, pi_arr)]
    return BooleanFunction(r + s, (inner ^ phi.table[None, :]).reshape(-1))


def mm_bent(pi: Sequence[int], phi: BooleanFunction) -> BooleanFunction:
    """Square MM construction; bent exactly when pi is a bijection."""
    m = phi.n
    pi_arr = np.asarray(pi, dtype=np.int64)
    if np.unique(pi_arr).size != 1 << m:
        raise ValueError("pi must be a bijection for the bent MM construction")
    return mm_function(pi_arr, phi, m)


def quadratic_bent(k: int) -> BooleanFunction:
    """Q_k: the standard-inner-product quadratic bent function on k variables."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    m = k // 2
    return mm_bent(np.arange(1 << m), zero_function(m))


# -- concatenations ----------------------------------------------------

# Eq.-style recipe slots: counts (i, j, k, l) over (6, 8, 10, 12)-variable parts
_DEFAULT_SLOTS = ("r3", "h8_1", "h10_4", "h12_5")
_SLOT_VARS = (6, 8, 10, 12)


@dataclass(frozen=True)
class ConcatRecipe:
    """i copies of a 6-var part, j of 8, k of 10, l of 12, xor-concatenated."""

    i: int = 0
    j: int = 0
    k: int = 0
    l: int = 0
    components: tuple[str, str, str, str] = _DEFAULT_SLOTS

    def __post_init__(self):
        if min(self.i, self.j, self.k, self.l) < 0:
            raise ValueError("counts must be non-negative")
        if self.i + self.j + self.k + self.l == 0:
            raise ValueError("recipe must use at least one component")

    @property
    def n(self) -> int:
        return 6 * self.i + 8 * self.j + 10 * self.k + 12 * self.l

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.i, self.j, self.k, self.l)

    def parts(self) -> list[str]:
        out = []
        for count, name in zip(self.counts, self.components):
            out.extend([name] * count)
        return out


def _component_functions(recipe: ConcatRecipe, catalog: Catalog) -> list[BooleanFunction]:
    funcs = []
    for count, name, nvars in zip(recipe.counts, recipe.components, _SLOT_VARS):
        if count == 0:
            continue
        entry = catalog.entry(name)
        if entry.anf_source is None:
            raise UnsourcedEntryError(
                f"missing external function: recipe needs {name!r} but the catalog "
                f"slot is unsourced"
            )
        if entry.n != nvars:
            raise ValueError(f"slot for {nvars} variables got {name!r} with n={entry.n}")
        funcs.extend([entry.function()] * count)
    return funcs


def build_concat(recipe: ConcatRecipe, catalog: Catalog) -> BooleanFunction:
    """Materialize the direct sum of the recipe (table limit applies)."""
    if recipe.n > TABLE_LIMIT:
        raise ValueError(
            f"recipe spans {recipe.n} variables; tables stop at {TABLE_LIMIT}. "
            f"Use recipe_report() for compositional invariants."
        )
    funcs = _component_functions(recipe, catalog)
    out = funcs[0]
    for f in funcs[1:]:
        out = direct_sum(out, f)
    return out


def concat_anf_monomials(recipe: ConcatRecipe, catalog: Catalog) -> list[int]:
    """Monomial masks of the concatenation, valid for any n (no tables)."""
    funcs = _component_functions(recipe, catalog)
    n = recipe.n
    out = []
    offset = 0
    for f in funcs:
        shift = n - offset - f.n  # this block sits below `offset` leading vars
        for m in to_anf(f).monomials():
            out.append(m << shift)
        offset += f.n
    return out


# -- certificates ------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Machine-readable verdict with the rule that produced it."""

    verdict: str  # "outside_mm" | "not_outside_mm" | "inconclusive"
    rule: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "rule": self.rule, "details": dict(self.details)}


def certify_outside_mm(
    f: BooleanFunction,
    g: BooleanFunction,
    rind_f: int | None = None,
    rind_g: int | None = None,
) -> Certificate:
    """Sufficient direct-sum condition: rind(f) < n/2 and rind(g) <= m/2
    puts f ^ k*g outside the completed MM class for every k >= 1."""
    n, m = f.n, g.n
    if rind_f is None:
        rind_f = relaxed_linearity_index(f)
    if rind_g is None:
        rind_g = relaxed_linearity_index(g)
    details = {"n": n, "m": m, "rind_f": rind_f, "rind_g": rind_g}
    if 2 * rind_f < n and 2 * rind_g <= m:
        details["applies_to"] = "f (+) k*g for every k >= 1"
        return Certificate("outside_mm", "direct-sum rind condition", details)
    return Certificate(
        "inconclusive",
        "direct-sum rind condition",
        {**details, "note": "hypothesis rind(f)<n/2 and rind(g)<=m/2 not met"},
    )


def certify_outside_mm_by_products(
    h: BooleanFunction,
    f: BooleanFunction,
    g: BooleanFunction,
    budget: int | None = 2_000_000,
) -> Certificate:
    """Exhaustive check over products of maximal relaxed M-subspaces.

    Every M-subspace of h = f ^ g lies inside some V x W with V, W relaxed
    M-subspaces of the parts, so testing all half-dimension subspaces of the
    maximal products decides membership soundly.
    """
    if h != direct_sum(f, g):
        raise ValueError("h must be the direct sum of f and g")
    if h.n % 2:
        raise ValueError("outside-M# certification needs even n")
    r = h.n // 2
    max_v = maximal_members(f, relaxed=True)
    max_w = maximal_members(g, relaxed=True)
    pairs = [
        (v, w) for v in max_v for w in max_w if v.dim + w.dim >= r
    ]
    total = sum(gaussian_binomial(v.dim + w.dim, r) for v, w in pairs)
    details = {
        "n": h.n,
        "maximal_v": len(max_v),
        "maximal_w": len(max_w),
        "product_pairs": len(pairs),
        "subspaces_to_test": total,
    }
    if budget is not None and total > budget:
        raise BudgetExceededError(
            f"product certification needs {total} subspace tests, budget {budget}"
        )
    tested = 0
    for v, w in pairs:
        prod = gjb([b << g.n for b in v.basis] + list(w.basis), h.n)
        for u in subspaces_of(prod, r):
            tested += 1
            if is_m_subspace(h, u):
                return Certificate(
                    "not_outside_mm",
                    "product-subspace exhaustion",
                    {**details, "tested": tested, "witness": [int(b) for b in u.basis]},
                )
    return Certificate(
        "outside_mm", "product-subspace exhaustion", {**details, "tested": tested}
    )


def recipe_report(recipe: ConcatRecipe, catalog: Catalog) -> dict:
    """Compositional invariants of a concatenation, exact or labeled bounds.

    Works for any n: bentness and homogeneity compose exactly, the graph
    rank adds up exactly, the relaxed index composes only as an upper bound.
    """
    from .catalog import cached_dim_fp, cached_gamma_rank, cached_rind

    funcs = _component_functions(recipe, catalog)
    n = recipe.n
    rind_bound = sum(cached_rind(f) for f in funcs)
    grank = sum(cached_gamma_rank(f) for f in funcs) - 2 * (len(funcs) - 1)
    dim_fp = sum(cached_dim_fp(f) for f in funcs)
    homogeneous = all(is_homogeneous(f, 3) for f in funcs)
    report = {
        "recipe": recipe.counts,
        "components": recipe.parts(),
        "n": n,
        "bent": {"value": True, "provenance": "composed (direct sums of bent parts)"},
        "homogeneous_cubic": {
            "value": homogeneous,
            "provenance": "composed (homogeneity of parts)",
        },
        "dim_fp": {"value": dim_fp, "provenance": "composed (fast points add)"},
        "gamma_rank": {
            "value": grank,
            "provenance": "composed (graph-rank additivity, exact)",
        },
        "rind_upper_bound": {
            "value": rind_bound,
            "provenance": "bound (relaxed index is subadditive)",
        },
    }
    if 2 * rind_bound < n:
        report["outside_mm"] = {
            "value": True,
            "provenance": f"bound (rind <= {rind_bound} < {n}/2)",
        }
    else:
        report["outside_mm"] = {"value": None, "provenance": "undecided by bounds"}
    return report


# -- new homogeneous functions from a single one (omega sets) ----------


@dataclass(frozen=True)
class OmegaSet:
    """Degree-d monomials on the y-block that keep the generated functions
    d-homogeneous under the inverse change of basis."""

    base: MmRepresentation
    transform_inverse: Gf2Matrix
    basis_monomials: tuple[int, ...]  # monomial masks on s variables
    d: int

    @property
    def size(self) -> int:
        return 1 << len(self.basis_monomials)

    def y_image_masks(self) -> tuple[int, ...]:
        """Linear forms (z T)_y as masks over the original z variables."""
        cols = self.transform_inverse.transpose().rows
        return tuple(cols[self.base.r :])

    def random_omega(self, rng: np.random.Generator) -> BooleanFunction:
        from .boolfun import from_anf

        picks = [m for m in self.basis_monomials if rng.integers(0, 2)]
        return from_anf(picks, self.base.s)


def image_of_y_map(rep: MmRepresentation) -> tuple[int, ...]:
    """Masks of the linear forms y' = (z * A_U^{-1})_y, one per y coordinate."""
    t = invert(rep.transform)
    return tuple(t.transpose().rows[rep.r :])


def _compose_on_y(masks: Sequence[int], omega: BooleanFunction, n: int) -> BooleanFunction:
    """omega(y'(z)) as a function of z, for linear forms y' given as masks."""
    z = np.arange(1 << n, dtype=np.int64)
    s = omega.n
    y = np.zeros(1 << n, dtype=np.int64)
    for i, mask in enumerate(masks):
        y |= _PAR16[z & mask].astype(np.int64) << (s - 1 - i)
    return BooleanFunction(n, omega.table[y])


def omega_basis(base: MmRepresentation, d: int) -> OmegaSet:
    """Qualifying degree-d monomials: omega(y') must stay d-homogeneous-or-zero.

    Bentness of the generated functions never depends on omega, so only the
    homogeneity of the composition is tested, monomial by monomial.
    """
    from itertools import combinations

    from .boolfun import from_anf

    t = invert(base.transform)
    n = base.r + base.s
    f = apply_transform(base.reconstruct(), t)  # the original function
    if not is_homogeneous(f, d):
        raise ValueError("base must come from a d-homogeneous function")
    masks = tuple(t.transpose().rows[base.r :])
    qualifying = []
    s = base.s
    for vars_ in combinations(range(s), d):
        mono = from_anf([vars_], s)
        composed = _compose_on_y(masks, mono, n)
        if not composed.table.any() or is_homogeneous(f ^ composed, d):
            qualifying.append(sum(1 << (s - 1 - v) for v in vars_))
    return OmegaSet(base, t, tuple(sorted(qualifying)), d)


def generate_from_omega(oset: OmegaSet, omega: BooleanFunction) -> BooleanFunction:
    """g(z) = h_{pi, phi^omega}((z)T); equals base ^ omega(y') on z.

    Postcondition (verified): d-homogeneous and bent.
    """
    if omega.n != oset.base.s:
        raise ValueError("omega must live on the y-block")
    allowed = set(oset.basis_monomials)
    if any(m not in allowed for m in to_anf(omega).monomials()):
        raise ValueError("omega is not in the span of the qualifying monomials")
    n = oset.base.r + oset.base.s
    f = apply_transform(oset.base.reconstruct(), oset.transform_inverse)
    g = f ^ _compose_on_y(oset.y_image_masks(), omega, n)
    if not is_homogeneous(g, oset.d) or not is_bent(g):
        raise VerificationFailedError(
            "generated function failed the homogeneous-bent postcondition"
        )
    return g


def match_in_omega_span(oset: OmegaSet, target: BooleanFunction) -> BooleanFunction | None:
    """The omega reproducing `target` exactly, if one exists in the span.

    target ^ base must be constant on the fibers of the y-image map and its
    ANF must use only qualifying monomials.
    """
    n = oset.base.r + oset.base.s
    if target.n != n:
        return None
    f = apply_transform(oset.base.reconstruct(), oset.transform_inverse)
    delta = (f ^ target).table
    masks = oset.y_image_masks()
    s = oset.base.s
    z = np.arange(1 << n, dtype=np.int64)
    y = np.zeros(1 << n, dtype=np.int64)
    for i, mask in enumerate(masks):
        y |= _PAR16[z & mask].astype(np.int64) << (s - 1 - i)
    omega_tab = np.zeros(1 << s, dtype=np.uint8)
    for yy in range(1 << s):
        sel = delta[y == yy]
        if sel.size == 0 or np.any(sel != sel[0]):
            return None
        omega_tab[yy] = sel[0]
    omega = BooleanFunction(s, omega_tab)
    allowed = set(oset.basis_monomials)
    if any(m not in allowed for m in to_anf(omega).monomials()):
        return None
    return omega


def search_omega_by_fingerprint(
    oset: OmegaSet,
    target_prefix: tuple[tuple[int, int], ...],
    budget: int,
    rng: np.random.Generator,
    grank_filter: int | None = None,
) -> tuple[BooleanFunction, BooleanFunction] | None:
    """Randomized span search for a generated function with a given SNF prefix.

    Cheap invariants (graph rank) gate the expensive SNF fingerprint; the
    budget counts fingerprint evaluations.
    """
    from .invariants import snf as snf_of

    if grank_filter is None and target_prefix and target_prefix[0][0] == 1:
        grank_filter = target_prefix[0][1]
    spent = 0
    while spent < budget:
        omega = oset.random_omega(rng)
        g = generate_from_omega(oset, omega)
        if grank_filter is not None and gamma_rank(g) != grank_filter:
            continue
        spent += 1
        s = snf_of(g)
        if s.prefix(len(target_prefix)) == tuple(target_prefix):
            return omega, g
    raise BudgetExceededError(f"fingerprint search exhausted budget {budget}")
