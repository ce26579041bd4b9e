import numpy as np
import pytest

from gorhom.algebra import (
    QuiverPresentation,
    enveloping,
    from_quiver,
    opposite,
    tensor,
)
from gorhom.exactlinalg import GF, Matrix, rank
from gorhom.modrep import (
    ModuleMap,
    bimodule_as_env_module,
    coregular,
    dsum,
    dual_module,
    eval_to_double_dual,
    hom_basis,
    indecomposable_projectives,
    is_isomorphic,
    is_projective,
    projective_cover,
    radical_subspace,
    regular_right,
    simples,
    star_dual,
    syzygy,
    top,
    zero_module,
)

GF2 = GF(2)
GF3 = GF(3)


@pytest.fixture(scope="module")
def duals():
    pres = QuiverPresentation(("1",), (("a", "1", "1"),),
                              (((1, ("a", "a")),),), 2)
    return from_quiver(pres, GF2, name="dual-numbers")


@pytest.fixture(scope="module")
def a2():
    pres = QuiverPresentation(("1", "2"), (("a", "1", "2"),), (), 2)
    return from_quiver(pres, GF2, name="A2-path")


@pytest.fixture(scope="module")
def komm():
    pres = QuiverPresentation(
        ("1",), (("x", "1", "1"), ("y", "1", "1")),
        (((1, ("x", "x")),), ((1, ("y", "y")),),
         ((1, ("x", "y")),), ((1, ("y", "x")),)), 2)
    return from_quiver(pres, GF2, name="kommutativ-33")


def test_regular_right_basics(duals):
    reg = regular_right(duals)
    assert reg.dim == duals.dim
    assert reg.verify()
    # rho(x) is the rank-1 nilpotent sending e to x, x to 0
    xi = list(duals.basis_labels).index("a")
    rx = reg._act[xi]
    assert rank(Matrix(GF2, rx)) == 1
    assert not np.any((rx.astype(np.int64) @ rx) % 2)


def test_coregular_dimension_and_contravariance(duals, a2):
    assert coregular(duals).dim == duals.dim
    assert coregular(a2).dim == a2.dim
    d = coregular(duals)
    assert d.verify()


def test_selfinjective_coregular_isomorphic_to_regular(duals):
    v = is_isomorphic(coregular(duals), regular_right(duals))
    assert v.is_yes
    assert v.witness.is_isomorphism()


def test_a2_coregular_not_isomorphic_to_regular(a2):
    # socle dims differ: compare kernels of the radical action
    reg = regular_right(a2)
    cor = coregular(a2)
    v = is_isomorphic(cor, reg)
    assert v.kind == "no"


def test_projectives_and_simples_dims(duals, a2):
    assert [p.dim for p in indecomposable_projectives(duals)] == [2]
    assert [s.dim for s in simples(duals)] == [1]
    ps = indecomposable_projectives(a2)
    assert sorted(p.dim for p in ps) == [1, 2]
    assert sum(p.dim for p in ps) == a2.dim
    assert [s.dim for s in simples(a2)] == [1, 1]


def test_bimodule_as_env_module(duals):
    bim = bimodule_as_env_module(duals)
    env = enveloping(duals)
    assert bim.dim == duals.dim
    assert bim.algebra is env
    assert bim.verify()
    # rho(x (x) 1) = rho(1 (x) x) for a commutative algebra
    lab = list(env.basis_labels)
    xi = lab.index("a(x)e_1")
    yi = lab.index("e_1(x)a")
    assert np.array_equal(bim._act[xi], bim._act[yi])


def test_hom_dims_on_a2_match_path_counts(a2):
    # dim Hom(P_i, P_j) = dim e_j A e_i under the chosen conventions
    ps = indecomposable_projectives(a2)
    h01 = hom_basis(ps[0], ps[1])
    h10 = hom_basis(ps[1], ps[0])
    dims = sorted([len(h01), len(h10)])
    assert dims == [0, 1]
    assert len(hom_basis(ps[0], ps[0])) == 1
    assert len(hom_basis(ps[1], ps[1])) == 1


def test_hom_socle_embedding(duals):
    s = simples(duals)[0]
    h = hom_basis(s, regular_right(duals))
    assert len(h) == 1


def test_hom_identity_present(komm):
    reg = regular_right(komm)
    assert len(hom_basis(reg, reg)) >= 1


def test_projective_cover_of_projective_is_iso(a2):
    for p in indecomposable_projectives(a2):
        cd = projective_cover(p)
        assert cd.kernel.dim == 0
        assert cd.epi.is_isomorphism()


def test_projective_cover_of_simple_dual_numbers(duals):
    s = simples(duals)[0]
    cd = projective_cover(s)
    assert cd.cover.dim == 2
    assert cd.kernel.dim == 1
    assert is_isomorphic(cd.kernel, s).is_yes


def test_projective_cover_minimality_witness(a2):
    cor = coregular(a2)
    cd = projective_cover(cor)
    assert cd.cover.dim - cor.dim == cd.kernel.dim
    # kernel inside cover radical
    radsp = radical_subspace(cd.cover)
    for i in range(cd.inclusion.matrix.rows):
        assert radsp.contains(cd.inclusion.matrix.arr[i])
    # epi is surjective with the right rank
    assert cd.epi.rank == cor.dim


def test_syzygy_of_projective_vanishes(a2):
    p = indecomposable_projectives(a2)[0]
    assert syzygy(p, 1).dim == 0
    assert is_projective(p)


def test_syzygy_periodicity_dual_numbers(duals):
    s = simples(duals)[0]
    for r in range(1, 6):
        om = syzygy(s, r)
        assert om.dim == 1
        assert is_isomorphic(om, s).is_yes


def test_syzygy_of_simple_komm(komm):
    s = simples(komm)[0]
    om = syzygy(s, 1)
    assert om.dim == 2


def test_top_plus_radical_dims(duals, a2, komm):
    for alg in (duals, a2, komm):
        for m in [regular_right(alg), coregular(alg)] + simples(alg):
            assert top(m).dim + radical_subspace(m).dim == m.dim


def test_star_dual_of_projectives(a2):
    ps = indecomposable_projectives(a2)
    op = opposite(a2)
    ops = indecomposable_projectives(op)
    for i, p in enumerate(ps):
        st = star_dual(p)
        assert st.algebra is op
        assert st.dim == ops[i].dim


def test_star_dual_zero_and_hom_dim(duals):
    z = zero_module(duals)
    assert star_dual(z).dim == 0
    s = simples(duals)[0]
    assert star_dual(s).dim == len(hom_basis(s, regular_right(duals)))


def test_eval_double_dual_projective_is_iso(a2, komm):
    for alg in (a2, komm):
        for p in indecomposable_projectives(alg):
            assert eval_to_double_dual(p).is_isomorphism()


def test_eval_double_dual_simple_dual_numbers(duals):
    s = simples(duals)[0]
    assert eval_to_double_dual(s).is_isomorphism()


def test_simple_over_komm_fails_certificate_leg(komm):
    # not reflexive or some Ext leg fails; here the eval map test
    s = simples(komm)[0]
    ev = eval_to_double_dual(s)
    st = star_dual(s)
    # dim Hom(S, A) = dim socle = 2, so star is 2-dim while S is 1-dim
    assert st.dim == 2
    assert not ev.is_isomorphism()


def test_is_isomorphic_basics(duals, a2):
    reg = regular_right(duals)
    assert is_isomorphic(reg, reg).is_yes
    s = simples(duals)[0]
    assert is_isomorphic(s, reg).kind == "no"
    s1, s2 = simples(a2)
    assert is_isomorphic(s1, s2).kind == "no"


def test_is_isomorphic_witness_intertwines(duals):
    s = simples(duals)[0]
    om = syzygy(s, 2)
    v = is_isomorphic(om, s)
    assert v.is_yes
    ModuleMap(om, s, v.witness.matrix, check=True)


def test_hom_dim_invariant_under_iso(duals):
    s = simples(duals)[0]
    om = syzygy(s, 2)
    reg = regular_right(duals)
    assert len(hom_basis(s, reg)) == len(hom_basis(om, reg))
    assert len(hom_basis(reg, s)) == len(hom_basis(reg, om))


def test_dsum_and_zero_module(duals):
    s = simples(duals)[0]
    reg = regular_right(duals)
    d = dsum(s, reg)
    assert d.dim == 3
    assert d.verify()
    z = zero_module(duals)
    assert dsum(z, s).dim == 1
    assert syzygy(z, 1).dim == 0


def test_duality_hom_dims_on_corpus_pairs(a2):
    # dim Hom(m, n) equals dim Hom(Dn, Dm) over the opposite algebra
    mods = [regular_right(a2), coregular(a2)] + simples(a2)
    for m in mods:
        for n in mods:
            if m.dim > 6 or n.dim > 6:
                continue
            dm, dn = dual_module(m), dual_module(n)
            assert len(hom_basis(m, n)) == len(hom_basis(dn, dm))


def test_module_map_intertwining_enforced(duals):
    s = simples(duals)[0]
    reg = regular_right(duals)
    # sending the simple onto the unit is not a module map (e*a = a != 0)
    ei = list(duals.basis_labels).index("e_1")
    bad = Matrix(GF2, [[1 if i == ei else 0 for i in range(2)]])
    with pytest.raises(Exception):
        ModuleMap(s, reg, bad, check=True)
    # the socle embedding is one
    ai = list(duals.basis_labels).index("a")
    good = Matrix(GF2, [[1 if i == ai else 0 for i in range(2)]])
    ModuleMap(s, reg, good, check=True)


def test_tensor_module_structures(a2, duals):
    t = tensor(a2, duals)
    reg = regular_right(t)
    assert reg.dim == 6
    ps = indecomposable_projectives(t)
    assert sum(p.dim for p in ps) == 6
