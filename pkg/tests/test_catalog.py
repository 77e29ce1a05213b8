import numpy as np
import pytest

from bentkit.boolfun import degree, is_bent, is_homogeneous, to_anf
from bentkit.catalog import (
    Flat,
    format_anf,
    format_base32,
    load_catalog,
    parse_anf_string,
    parse_base32,
    validate_r3_candidate,
    verify_entry,
    verify_flat_normality,
)
from bentkit.errors import UnsourcedEntryError
from bentkit.gf2 import gjb

H_NAMES = [
    "h6_1", "h8_1", "h8_2",
    "h10_1", "h10_2", "h10_3", "h10_4",
    "h12_1", "h12_2", "h12_3", "h12_4", "h12_5", "h12_6", "h12_7",
]


def test_parse_anf_basics():
    f = parse_anf_string("012", 6)
    assert to_anf(f).monomial_vars() == [(0, 1, 2)]
    g = parse_anf_string("02a ⊕ 02b", 12)
    assert set(to_anf(g).monomial_vars()) == {(0, 2, 10), (0, 2, 11)}
    assert not parse_anf_string("", 4).table.any()


def test_parse_anf_rejects_bad_symbols():
    with pytest.raises(ValueError, match="out of range"):
        parse_anf_string("017", 6)
    with pytest.raises(ValueError, match="duplicate"):
        parse_anf_string("011", 6)
    with pytest.raises(ValueError, match="invalid"):
        parse_anf_string("0:1", 6)


def test_format_anf_roundtrip(catalog):
    f = catalog.function("h10_3")
    assert parse_anf_string(format_anf(f), 10) == f


def test_parse_base32_values():
    assert parse_base32("f", 10) == 15
    assert parse_base32("g3", 10) == 16 * 32 + 3 == 515
    assert parse_base32("300", 12) == 3072
    assert parse_base32("o2", 10) == 770


def test_parse_base32_rejects():
    with pytest.raises(ValueError):
        parse_base32("w1", 10)  # symbol out of alphabet
    with pytest.raises(ValueError):
        parse_base32("300", 10)  # overflow
    with pytest.raises(ValueError):
        parse_base32("", 10)


def test_format_base32_roundtrip():
    rng = np.random.default_rng(40)
    for v in [0, 1, 31, 32, 515, 3072] + [int(x) for x in rng.integers(0, 4096, 20)]:
        assert parse_base32(format_base32(v), 12) == v


def test_all_named_functions_are_homogeneous_cubic_bent(catalog):
    for name in H_NAMES:
        f = catalog.function(name)
        assert f.n == catalog.entry(name).n
        assert is_homogeneous(f, 3), name
        assert is_bent(f), name


def test_token_order_resolved_by_joint_consistency(catalog):
    assert catalog.token_flip() is False
    assert not catalog._consistent(True)  # reversed bit order must fail


def test_flat_normality(catalog):
    f3 = catalog.function("h10_3")
    f4 = catalog.function("h10_4")
    assert verify_flat_normality(f3, catalog.flat("h10_3"))
    assert verify_flat_normality(f4, catalog.flat("h10_4"))
    with pytest.raises(ValueError, match="dimension"):
        verify_flat_normality(f3, Flat(0, gjb([1, 2], 10)))


def test_random_flats_rarely_normal(catalog):
    rng = np.random.default_rng(41)
    f = catalog.function("h10_3")
    hits = 0
    for _ in range(100):
        vecs = [int(x) for x in rng.integers(1, 1 << 10, size=5)]
        u = gjb(vecs, 10)
        if u.dim != 5:
            continue
        flat = Flat(int(rng.integers(0, 1 << 10)), u)
        hits += verify_flat_normality(f, flat)
    assert hits <= 2


def test_verify_entry_ok(catalog):
    rep = verify_entry(catalog, "h6_1", include=("basic", "table3", "snf", "grank"))
    assert rep.status == "ok"
    names = {c.invariant for c in rep.checks}
    assert {"degree", "bent", "dim_fp", "ind", "rind", "grank"} <= names


def test_verify_entry_unsourced(catalog):
    rep = verify_entry(catalog, "r3")
    assert rep.status == "unsourced" and not rep.checks


def test_unsourced_function_raises(catalog):
    with pytest.raises(UnsourcedEntryError):
        catalog.function("r3")


def test_r3_validation_hooks_reject(catalog):
    # has affine derivatives (dim FP = 3)
    problems = validate_r3_candidate(catalog.function("h6_1"))
    assert any("affine" in p for p in problems)
    # wrong variable count
    problems = validate_r3_candidate(catalog.function("h8_1"))
    assert problems == ["n=8, need 6"]
    # not bent
    problems = validate_r3_candidate(parse_anf_string("012", 6))
    assert any("not bent" in p for p in problems)


def test_r3_slot_accepts_valid_candidate(sourced_catalog):
    f = sourced_catalog.function("r3")
    assert f.n == 6 and degree(f) == 3 and is_bent(f)
    from bentkit.boolfun import fast_point_space
    from bentkit.subspaces import relaxed_linearity_index

    assert fast_point_space(f).dim == 0
    assert relaxed_linearity_index(f) == 3


def test_source_entry_rejects_bad_candidate():
    cat = load_catalog()
    with pytest.raises(ValueError, match="rejected"):
        cat.source_entry("r3", "012")
    with pytest.raises(ValueError, match="not an unsourced slot"):
        cat.source_entry("h6_1", "012")


def test_catalog_env_override(tmp_path, monkeypatch):
    p = tmp_path / "mini.txt"
    p.write_text("[tiny]\nn = 2\nanf = 01\nbent = true\n", encoding="utf-8")
    monkeypatch.setenv("BENTKIT_CATALOG", str(p))
    cat = load_catalog()
    assert cat.names() == ["tiny"]
    assert is_bent(cat.function("tiny"))
