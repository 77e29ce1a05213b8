import numpy as np
import pytest

from bentkit.boolfun import (
    BooleanFunction,
    direct_sum,
    from_anf,
    is_bent,
    is_homogeneous,
    to_anf,
    zero_function,
)
from bentkit.catalog import parse_anf_string, parse_base32
from bentkit.constructions import (
    ConcatRecipe,
    OmegaSet,
    build_concat,
    certify_outside_mm,
    certify_outside_mm_by_products,
    concat_anf_monomials,
    generate_from_omega,
    image_of_y_map,
    match_in_omega_span,
    mm_bent,
    mm_function,
    omega_basis,
    quadratic_bent,
    recipe_report,
)
from bentkit.errors import BudgetExceededError, UnsourcedEntryError, VerificationFailedError
from bentkit.gf2 import gjb
from bentkit.invariants import gamma_rank
from bentkit.subspaces import is_m_subspace, mm_representation, relaxed_linearity_index


def test_mm_bent_inner_product():
    q4 = mm_bent(np.arange(4), zero_function(2))
    assert q4 == from_anf([(0, 2), (1, 3)], 4)  # x1x3 + x2x4
    assert is_bent(q4)


def test_mm_bent_identity_with_cubic_phi():
    f = mm_bent(np.arange(8), from_anf([(0, 1, 2)], 3))
    assert f == parse_anf_string("03 + 14 + 25 + 345", 6)
    assert is_bent(f)


def test_mm_bent_rejects_non_bijection():
    with pytest.raises(ValueError, match="bijection"):
        mm_bent(np.zeros(4, dtype=int), zero_function(2))


def test_quadratic_bent_family():
    assert quadratic_bent(2) == from_anf([(0, 1)], 2)
    assert relaxed_linearity_index(quadratic_bent(4)) == 4
    for k in (2, 4, 6):
        q = quadratic_bent(k)
        assert is_bent(q) and gamma_rank(q) == k + 2
    with pytest.raises(ValueError):
        quadratic_bent(3)


def test_build_concat_single_component(catalog):
    r = ConcatRecipe(0, 0, 1, 0)
    assert build_concat(r, catalog) == catalog.function("h10_4")


def test_build_concat_requires_sourced_r3(catalog):
    with pytest.raises(UnsourcedEntryError, match="missing external function"):
        build_concat(ConcatRecipe(1, 0, 1, 0), catalog)


def test_build_concat_with_sourced_r3(sourced_catalog):
    h = build_concat(ConcatRecipe(1, 0, 1, 0), sourced_catalog)
    assert h.n == 16 and is_bent(h)
    assert not is_homogeneous(h, 3)  # the 6-variable part is not homogeneous
    rep = recipe_report(ConcatRecipe(1, 0, 1, 0), sourced_catalog)
    assert rep["outside_mm"]["value"] is True  # rind <= 3+4 = 7 < 8


def test_concat_18_variables(catalog):
    r = ConcatRecipe(0, 1, 1, 0)
    h = build_concat(r, catalog)
    assert h.n == 18 and is_bent(h) and is_homogeneous(h, 3)
    rep = recipe_report(r, catalog)
    assert rep["gamma_rank"]["value"] == 16 + 22 - 2 == 36
    assert rep["gamma_rank"]["value"] > 18 + 2


def test_concat_anf_monomials_match_table(catalog):
    r = ConcatRecipe(0, 1, 1, 0)
    masks = concat_anf_monomials(r, catalog)
    assert from_anf(masks, 18) == build_concat(r, catalog)


def test_recipe_report_22_variables(catalog):
    rep = recipe_report(ConcatRecipe(0, 0, 1, 1), catalog)
    assert rep["n"] == 22
    assert rep["rind_upper_bound"]["value"] == 10
    assert rep["outside_mm"]["value"] is True
    assert "bound" in rep["rind_upper_bound"]["provenance"]


def test_certify_outside_mm_rind_condition(catalog):
    f, g = catalog.function("h10_4"), catalog.function("h12_5")
    cert = certify_outside_mm(f, g)
    assert cert.verdict == "outside_mm"
    assert cert.details["rind_f"] == 4 and cert.details["rind_g"] == 6
    # rind(h8_1) = 4 = n/2 fails the strict inequality
    assert certify_outside_mm(catalog.function("h8_1"), g).verdict == "inconclusive"
    assert certify_outside_mm(f, quadratic_bent(2)).verdict == "inconclusive"


def test_certify_by_products(catalog):
    f = catalog.function("h10_4")
    for k in (2, 4):
        g = quadratic_bent(k)
        h = direct_sum(f, g)
        cert = certify_outside_mm_by_products(h, f, g)
        assert cert.verdict == "outside_mm"
    h = direct_sum(quadratic_bent(4), quadratic_bent(2))
    cert = certify_outside_mm_by_products(h, quadratic_bent(4), quadratic_bent(2))
    assert cert.verdict == "not_outside_mm"
    u = gjb(cert.details["witness"], 6)
    assert is_m_subspace(h, u)


def test_certify_by_products_budget(catalog):
    f = catalog.function("h10_4")
    g = quadratic_bent(4)
    with pytest.raises(BudgetExceededError):
        certify_outside_mm_by_products(direct_sum(f, g), f, g, budget=10)


def test_certify_by_products_validates_input(catalog):
    f = catalog.function("h10_4")
    g = quadratic_bent(2)
    with pytest.raises(ValueError):
        certify_outside_mm_by_products(direct_sum(g, f), f, g)


@pytest.fixture(scope="module")
def h12_3_omega(catalog):
    f = catalog.function("h12_3")
    u = gjb([parse_base32(t, 12) for t in "300 gg 88 44 22 11".split()], 12)
    comp = gjb([parse_base32(t, 12) for t in "100 g 8 4 2 1".split()], 12)
    rep = mm_representation(f, u, comp)
    return f, omega_basis(rep, 3)


def test_omega_basis_all_cubic_monomials_qualify(h12_3_omega):
    _, oset = h12_3_omega
    assert len(oset.basis_monomials) == 20
    assert oset.size == 1 << 20


def test_omega_y_image_matches_published_map(h12_3_omega):
    _, oset = h12_3_omega
    want = (0b110000000000, 0b001000010000, 0b000100001000,
            0b000010000100, 0b000001000010, 0b000000100001)
    assert oset.y_image_masks() == want
    assert image_of_y_map(oset.base) == want


def test_omega_zero_returns_base(h12_3_omega):
    f, oset = h12_3_omega
    assert generate_from_omega(oset, zero_function(6)) == f


def test_omega_closure_under_xor(h12_3_omega):
    _, oset = h12_3_omega
    rng = np.random.default_rng(50)
    for _ in range(10):
        o1 = oset.random_omega(rng)
        o2 = oset.random_omega(rng)
        g = generate_from_omega(oset, o1 ^ o2)
        assert is_bent(g) and is_homogeneous(g, 3)


def test_omega_rejects_outside_span(h12_3_omega):
    _, oset = h12_3_omega
    with pytest.raises(ValueError, match="span"):
        generate_from_omega(oset, from_anf([(0, 1)], 6))


def test_omega_reproduces_catalog_functions(h12_3_omega, catalog):
    _, oset = h12_3_omega
    for name in ("h12_4", "h12_6", "h12_7"):
        target = catalog.function(name)
        omega = match_in_omega_span(oset, target)
        assert omega is not None, name
        assert generate_from_omega(oset, omega) == target
    assert match_in_omega_span(oset, catalog.function("h12_5")) is None


def test_generated_keep_the_worked_m_subspace(h12_3_omega):
    _, oset = h12_3_omega
    u = gjb([parse_base32(t, 12) for t in "300 gg 88 44 22 11".split()], 12)
    rng = np.random.default_rng(51)
    for _ in range(5):
        g = generate_from_omega(oset, oset.random_omega(rng))
        assert is_m_subspace(g, u)
