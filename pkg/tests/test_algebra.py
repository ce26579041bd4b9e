from fractions import Fraction

import numpy as np
import pytest

from gorhom.algebra import (
    Algebra,
    AlgebraValidationReport,
    DisconnectedAlgebraWarning,
    InhomogeneousRelation,
    NotAdmissible,
    QuiverPresentation,
    ValidationFailed,
    enveloping,
    from_quiver,
    from_table,
    opposite,
    radical_basis,
    table_equal,
    tensor,
    validate,
)
from gorhom.exactlinalg import GF, RATIONAL, FieldMismatch

GF2 = GF(2)
GF3 = GF(3)


def dual_numbers(field=GF2):
    pres = QuiverPresentation(("1",), (("a", "1", "1"),),
                              (((1, ("a", "a")),),), 2)
    return from_quiver(pres, field, name="dual-numbers")


def a2_path(field=GF2):
    pres = QuiverPresentation(("1", "2"), (("a", "1", "2"),), (), 2)
    return from_quiver(pres, field, name="A2-path")


def local_two_loops(field=GF2):
    pres = QuiverPresentation(
        ("1",), (("x", "1", "1"), ("y", "1", "1")),
        (((1, ("x", "x")),), ((1, ("y", "y")),),
         ((1, ("x", "y")),), ((1, ("y", "x")),)), 2)
    return from_quiver(pres, field, name="monomial-local")


def enumerate_monomial_basis(arrows, relations, maxlen):
    """Independent oracle: words over the loop alphabet avoiding the
    relation monomials as factors (one-vertex monomial algebras only)."""
    words = [()]
    out = [()]
    for _ in range(maxlen):
        nxt = []
        for w in words:
            for a in arrows:
                u = w + (a,)
                if any(u[i:i + len(r)] == r for r in relations
                       for i in range(len(u) - len(r) + 1)):
                    continue
                nxt.append(u)
        out.extend(nxt)
        words = nxt
        if not words:
            break
    return out


def test_dual_numbers_quiver():
    a = dual_numbers()
    assert a.dim == 2
    assert set(a.basis_labels) == {"e_1", "a"}
    assert a.radical_dim == 1
    assert a.n_idempotents == 1
    assert validate(a).all_ok


def test_a2_path_algebra():
    a = a2_path()
    assert a.dim == 3
    assert a.n_idempotents == 2
    assert a.radical_dim == 1
    assert validate(a).all_ok


def test_monomial_local_closure_matches_word_oracle():
    a = local_two_loops()
    words = enumerate_monomial_basis(
        ("x", "y"), (("x", "x"), ("y", "y"), ("x", "y"), ("y", "x")), 2)
    assert a.dim == len(words) == 3
    assert a.radical_dim == 2
    assert validate(a).all_ok


def test_relation_free_acyclic_quiver_dim_is_path_count():
    # commutative-square-free quiver on 4 vertices: count paths directly
    pres = QuiverPresentation(
        ("1", "2", "3", "4"),
        (("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4")),
        (), 5)
    a = from_quiver(pres, GF2)
    # paths: 4 vertices, a, b, c, ab, bc, abc
    assert a.dim == 10
    assert validate(a).all_ok


def test_not_admissible_without_relations_on_loop():
    pres = QuiverPresentation(("1",), (("a", "1", "1"),), (), 3)
    with pytest.raises(NotAdmissible):
        from_quiver(pres, GF2)


def test_inhomogeneous_relation_rejected():
    pres = QuiverPresentation(
        ("1", "2"), (("a", "1", "2"), ("b", "2", "2")),
        (((1, ("a", "b")), (1, ("b",))),), 3)
    with pytest.raises(InhomogeneousRelation):
        from_quiver(pres, GF2)


def test_binomial_relation_gf3():
    # x^2, y^2, xy + yx: four-dimensional, yx = -xy survives
    pres = QuiverPresentation(
        ("1",), (("x", "1", "1"), ("y", "1", "1")),
        (((1, ("x", "x")),), ((1, ("y", "y")),),
         ((1, ("x", "y")), (1, ("y", "x")))), 3)
    a = from_quiver(pres, GF3)
    assert a.dim == 4
    assert a.radical_dim == 3
    assert validate(a).all_ok


def table_for_truncated_poly(field, n):
    basis = [f"t{k}" for k in range(n)]
    products = [[[field.normalize(1) if i + j == k else field.normalize(0)
                  for k in range(n)] for j in range(n)] for i in range(n)]
    unit = [1] + [0] * (n - 1)
    return basis, unit, products, [unit]


def test_from_table_truncated_poly_gf3():
    basis, unit, products, idem = table_for_truncated_poly(GF3, 3)
    a = from_table(basis, unit, products, idem, GF3, name="k[T]/(T^3)")
    assert a.dim == 3
    assert a.radical_dim == 2
    assert validate(a).all_ok


def test_from_table_nonassociative_fails_with_witness():
    # c chosen so (b0 b0) b1 != b0 (b0 b1)
    products = [[[0, 1], [1, 0]], [[1, 0], [0, 0]]]
    with pytest.raises(ValidationFailed) as exc:
        from_table(["u", "v"], [1, 0], products, [[1, 0]], GF2)
    assert not exc.value.report.associativity_ok


def test_one_dimensional_field_as_algebra():
    a = from_table(["1"], [1], [[[1]]], [[1]], GF2, name="field")
    assert a.dim == 1
    assert a.radical_dim == 0


def test_semisimple_product_has_empty_radical_and_warns_disconnected():
    products = [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    with pytest.warns(DisconnectedAlgebraWarning):
        a = from_table(["e1", "e2"], [1, 1], products, [[1, 0], [0, 1]], GF2)
    assert a.radical_dim == 0


def test_radical_two_construction_agreement():
    a = local_two_loops()
    recomputed = radical_basis(a)
    assert recomputed.rows == 2
    sp = a.radical_space
    for i in range(recomputed.rows):
        assert sp.contains(recomputed.arr[i])


def test_radical_small_characteristic_table():
    # GF(2) table of the 3-dim monomial local algebra (dim > p exercises
    # the p-power refinement); cross-checked against the quiver build
    a = local_two_loops()
    basis = list(a.basis_labels)
    products = a.structure_constants
    idem = [list(r) for r in (a.idem_rows,)][0]
    b = from_table(basis, list(a.unit_row), products, [list(a.idem_rows[0])],
                   GF2, name="table-copy")
    assert b.radical_dim == a.radical_dim == 2


def test_opposite_is_involution_and_commutative_fixed():
    a = local_two_loops()
    op = opposite(a)
    assert opposite(op) is a
    d = dual_numbers()
    assert table_equal(opposite(d), d)  # commutative


def test_tensor_dims_and_idempotents():
    a = a2_path()
    b = dual_numbers()
    t = tensor(a, b)
    assert t.dim == a.dim * b.dim
    assert t.n_idempotents == a.n_idempotents * b.n_idempotents
    assert validate(t).all_ok


def test_tensor_of_dual_numbers_defining_products():
    d = dual_numbers()
    t = tensor(d, d)
    assert t.dim == 4
    # x = a(x)1, y = 1(x)a: x^2 = y^2 = 0 and xy = yx
    lab = list(t.basis_labels)
    xi = lab.index("a(x)e_1")
    yi = lab.index("e_1(x)a")
    x = t.basis_row(xi)
    y = t.basis_row(yi)
    assert not np.any(t.mul(x, x))
    assert not np.any(t.mul(y, y))
    assert np.array_equal(t.mul(x, y), t.mul(y, x))
    assert t.radical_dim == 3


def test_tensor_field_mismatch():
    with pytest.raises(FieldMismatch):
        tensor(dual_numbers(GF2), dual_numbers(GF3))


def test_enveloping_dims_and_field_case():
    a = a2_path()
    e = enveloping(a)
    assert e.dim == a.dim ** 2
    f = from_table(["1"], [1], [[[1]]], [[1]], GF2)
    assert enveloping(f).dim == 1


def test_enveloping_commutative_matches_tensor():
    d = dual_numbers()
    assert table_equal(enveloping(d), tensor(d, d))


def test_enveloping_cached():
    a = a2_path()
    assert enveloping(a) is enveloping(a)


def test_validate_corrupted_unit():
    a = dual_numbers()
    nilpotent = a.radical_rows[0]
    bad = Algebra(a.field, a._c, nilpotent, a.idem_rows,
                  a.radical_rows, a.basis_labels)
    rep = validate(bad)
    assert not rep.unit_ok
    assert "unit" in rep.witnesses


def test_validate_non_orthogonal_idempotents():
    a = a2_path()
    bad_idem = np.stack([a.unit_row, a.unit_row])
    bad = Algebra(a.field, a._c, a.unit_row, bad_idem,
                  a.radical_rows, a.basis_labels)
    rep = validate(bad)
    assert not rep.idempotents_ok


def test_validate_rational_quiver_algebra():
    a = dual_numbers(RATIONAL)
    assert a.dim == 2
    assert validate(a).all_ok
    t = tensor(a, a)
    assert t.dim == 4
    assert validate(t).all_ok


def test_opposite_and_tensor_preserve_validity():
    a = local_two_loops()
    assert validate(opposite(a)).all_ok
    t = tensor(a2_path(), dual_numbers())
    assert validate(t).all_ok
    e = enveloping(a2_path())
    assert validate(e).all_ok


def test_validate_env_of_three_dim_local():
    e = enveloping(local_two_loops())
    assert e.dim == 9
    assert e.radical_dim == 8
    assert validate(e).all_ok
