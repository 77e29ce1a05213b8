import numpy as np
import pytest

from bentkit.boolfun import BooleanFunction, direct_sum, from_anf, zero_function
from bentkit.constructions import mm_bent, quadratic_bent
from bentkit.errors import BudgetExceededError
from bentkit.gf2 import apply_transform, gjb, random_invertible
from bentkit.subspaces import (
    enumerate_ms,
    enumerate_rms,
    in_completed_mm,
    is_m_subspace,
    is_relaxed_m_subspace,
    linearity_index,
    maximal_members,
    mm_representation,
    relaxed_linearity_index,
)
from oracles import brute_is_m_subspace, brute_ms_collection, second_derivative_table

# the two worked subspace-to-constant tables for the 6-variable MM example,
# (pair, value of the constant second derivative)
EX_STRICT_PAIRS = [
    ((0b000010, 0b000001), 0),
    ((0b000100, 0b000001), 0),
    ((0b000110, 0b000001), 0),
    ((0b000100, 0b000010), 0),
    ((0b000101, 0b000010), 0),
    ((0b000100, 0b000011), 0),
    ((0b000101, 0b000011), 0),
]
EX_RELAXED_PAIRS = [
    ((0b000100, 0b000011), 0),
    ((0b010001, 0b000011), 1),
    ((0b010101, 0b000011), 1),
    ((0b010001, 0b000100), 0),
    ((0b010010, 0b000100), 0),
    ((0b010001, 0b000111), 1),
    ((0b010010, 0b000111), 1),
]


@pytest.fixture(scope="module")
def ex(catalog):
    return catalog.function("mm_example")


def test_worked_strict_subspace(ex):
    u = gjb([4, 2, 1], 6)
    assert is_m_subspace(ex, u)
    for (a, b), val in EX_STRICT_PAIRS:
        d = second_derivative_table(ex, a, b)
        assert np.all(d == val)


def test_worked_relaxed_subspace(ex):
    u = gjb([0b010001, 0b000100, 0b000011], 6)
    assert is_relaxed_m_subspace(ex, u)
    assert not is_m_subspace(ex, u)
    for (a, b), val in EX_RELAXED_PAIRS:
        d = second_derivative_table(ex, a, b)
        assert np.all(d == val)


def test_one_dimensional_always_qualifies(ex):
    for v in (1, 7, 33):
        u = gjb([v], 6)
        assert is_m_subspace(ex, u) and is_relaxed_m_subspace(ex, u)


def test_checker_matches_brute_force_on_random_subspaces():
    rng = np.random.default_rng(20)
    f = BooleanFunction(6, rng.integers(0, 2, size=64, dtype=np.uint8))
    for _ in range(40):
        vecs = [int(x) for x in rng.integers(1, 64, size=3)]
        u = gjb(vecs, 6)
        assert is_m_subspace(f, u) == brute_is_m_subspace(f, u, relaxed=False)
        assert is_relaxed_m_subspace(f, u) == brute_is_m_subspace(f, u, relaxed=True)


def test_enumeration_matches_brute_force_small():
    rng = np.random.default_rng(21)
    from itertools import combinations

    monos = list(combinations(range(5), 3)) + list(combinations(range(5), 2))
    for trial in range(6):
        picks = [m for m in monos if rng.integers(0, 2)]
        f = from_anf(picks, 5) if picks else zero_function(5)
        for r in (2, 3):
            got = sorted(s.basis for s in enumerate_ms(f, r))
            assert got == brute_ms_collection(f, r, relaxed=False)
            got = sorted(s.basis for s in enumerate_rms(f, r))
            assert got == brute_ms_collection(f, r, relaxed=True)


def test_enumeration_matches_brute_force_degree4():
    # exercises the generic (non-cubic) path
    f = from_anf([(0, 1, 2, 3), (1, 4), (0, 2)], 5)
    for r in (2, 3):
        assert sorted(s.basis for s in enumerate_ms(f, r)) == brute_ms_collection(f, r)


def test_monotonicity(catalog):
    f = catalog.function("h8_2")
    sizes = {r: len(enumerate_ms(f, r)) for r in range(2, 6)}
    for r in range(3, 6):
        if sizes[r]:
            assert sizes[r - 1]


def test_rms_contains_ms(catalog):
    for name in ("h6_1", "h8_1", "h8_2"):
        f = catalog.function(name)
        for r in (2, 3, 4):
            ms = set(enumerate_ms(f, r).members)
            rms = set(enumerate_rms(f, r).members)
            assert ms <= rms


def test_collection_sizes_invariant_under_equivalence(catalog):
    rng = np.random.default_rng(22)
    f = catalog.function("h8_1")
    base_ms = len(enumerate_ms(f, 3))
    base_rms = len(enumerate_rms(f, 3))
    for _ in range(3):
        g = apply_transform(f, random_invertible(8, rng))
        assert len(enumerate_ms(g, 3)) == base_ms
        assert len(enumerate_rms(g, 3)) == base_rms


def test_index_values_small(catalog):
    f = catalog.function("h6_1")
    assert linearity_index(f) == 3
    assert relaxed_linearity_index(f) == 4
    assert linearity_index(zero_function(4)) == 4  # constants: everything vanishes
    assert relaxed_linearity_index(quadratic_bent(6)) == 6


def test_index_budget_carries_lower_bound(catalog):
    f = catalog.function("h8_1")
    with pytest.raises(BudgetExceededError) as ei:
        linearity_index(f, budget=10)
    assert ei.value.lower_bound >= 2


def test_product_rule_and_subadditivity(catalog):
    # every catalog pair with at most 14 combined variables
    pairs = [("h6_1", "h6_1"), ("h6_1", "h8_1"), ("h6_1", "h8_2")]
    for fname, gname in pairs:
        f, g = catalog.function(fname), catalog.function(gname)
        h = direct_sum(f, g)
        v = enumerate_rms(f, 3).members[0]
        w = enumerate_rms(g, 3).members[0]
        prod = gjb([b << g.n for b in v.basis] + list(w.basis), h.n)
        assert is_relaxed_m_subspace(h, prod)
        bound = relaxed_linearity_index(f) + relaxed_linearity_index(g)
        assert relaxed_linearity_index(h) <= bound, (fname, gname)


def test_rms_spec_examples(catalog):
    h10_4 = catalog.function("h10_4")
    assert len(enumerate_rms(h10_4, 4, early_stop=1)) > 0
    assert len(enumerate_rms(h10_4, 5)) == 0
    # the worked relaxed 3-dim subspace appears in the full level-3 collection
    ex = catalog.function("mm_example")
    u = gjb([0b010001, 0b000100, 0b000011], 6)
    assert u in enumerate_rms(ex, 3)


def test_index_invariance_at_ten_variables(catalog):
    rng = np.random.default_rng(25)
    f = catalog.function("h10_4")
    g = apply_transform(f, random_invertible(10, rng))
    assert linearity_index(g) == 2 and relaxed_linearity_index(g) == 4


def test_collection_prints_appendix_format(catalog):
    coll = enumerate_ms(catalog.function("h10_1"), 5)
    assert str(coll) == "o2 4l 2m 1j f"


def test_in_completed_mm_constructed():
    rng = np.random.default_rng(23)
    for m in (2, 3):
        pi = rng.permutation(1 << m)
        phi = BooleanFunction(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
        f = mm_bent(pi, phi)
        assert in_completed_mm(f)
    with pytest.raises(ValueError):
        in_completed_mm(zero_function(3))


def test_maximal_members_small():
    q = quadratic_bent(4)
    out = maximal_members(q, relaxed=True)
    assert len(out) == 1 and out[0].dim == 4  # the whole space
    f = from_anf([(0, 1, 2)], 4)
    for u in maximal_members(f, relaxed=False):
        assert is_m_subspace(f, u)
        # maximality: no single vector extends it
        ext = [
            v
            for v in range(1, 16)
            if not u.contains(v)
            and is_m_subspace(f, gjb(list(u.basis) + [v], 4))
        ]
        assert not ext


def test_mm_representation_roundtrip():
    rng = np.random.default_rng(24)
    pi = rng.permutation(8)
    phi = BooleanFunction(3, rng.integers(0, 2, size=8, dtype=np.uint8))
    f = mm_bent(pi, phi)
    u = gjb([1 << (5 - i) for i in range(3)], 6)  # the x-block
    rep = mm_representation(f, u)
    assert rep.pi_is_permutation()
    assert apply_transform(f, rep.transform) == rep.reconstruct()


def test_mm_representation_rejects_non_m_subspace(catalog):
    f = catalog.function("h10_4")
    bad = gjb([1, 2, 4, 8, 16], 10)
    with pytest.raises(ValueError, match="not an M-subspace"):
        mm_representation(f, bad)


def test_mm_representation_of_worked_subspace(catalog):
    from bentkit.boolfun import to_anf
    from bentkit.catalog import parse_base32

    f = catalog.function("h12_3")
    u = gjb([parse_base32(t, 12) for t in "300 gg 88 44 22 11".split()], 12)
    rep = mm_representation(f, u)
    assert rep.pi_is_permutation()
    assert to_anf(rep.phi).degree == 3
    # affine on every coset of U after the change of basis (worked statement)
    g = apply_transform(f, rep.transform)
    for y in range(0, 1 << 6, 13):
        section = g.table[np.arange(1 << 6) * (1 << 6) + y]
        assert to_anf(BooleanFunction(6, section)).degree <= 1
