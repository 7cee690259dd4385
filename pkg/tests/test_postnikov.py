import numpy as np
import pytest

from sylowtower.cohomology import Cochain, cohomology_group
from sylowtower.cohomology.cochains import coboundary
from sylowtower.corpus import inverted_z3_tower
from sylowtower.errors import UserInputError
from sylowtower.groups import cyclic, direct_product, find_isomorphism, symmetric, trivial_group
from sylowtower.modules import GModule
from sylowtower.postnikov import (PostnikovTower, Stage, TowerMap, compose, identity_map, is_equivalence, is_p_tower,
                                  make_BG, make_KAG, point, product, truncate, validate_map)


def k_tower(G, factors, coords, level=2):
    M = GModule.trivial(G, factors)
    H = cohomology_group(G, M, level + 1)
    return PostnikovTower(G, [Stage(level, M, H.element(coords))], name="k")


def test_constructors():
    assert point().base.order == 1 and not point().stages
    assert make_BG(cyclic(2)).homotopy_orders() == {1: 2}
    assert make_BG(symmetric(3)).levels == ()
    M = GModule.trivial(trivial_group(), [3])
    K = make_KAG(trivial_group(), M, 2)
    assert K.homotopy_orders() == {1: 1, 2: 3}
    X = inverted_z3_tower()
    assert X.homotopy_orders() == {1: 2, 2: 3} and X.all_k_zero()
    Y = make_KAG(cyclic(2), GModule.trivial(cyclic(2), [2]), 3)
    assert Y.levels == (3,) and Y.k_at(3).degree == 4


def test_stage_level_must_be_at_least_two():
    with pytest.raises(UserInputError):
        make_KAG(cyclic(2), GModule.trivial(cyclic(2), [2]), 1)


def test_non_cocycle_k_rejected():
    G = cyclic(3)
    M = GModule.trivial(G, [3])
    vals = np.zeros((3, 3, 3, 1), dtype=np.int64)
    vals[1, 1, 1] = 1
    with pytest.raises(UserInputError) as e:
        PostnikovTower(G, [Stage(2, M, Cochain(M, 3, vals))], name="bad")
    assert "stages/0/k" in e.value.location
    assert "(" in e.value.message


def test_truncate():
    T = k_tower(cyclic(2), [2], [1])
    assert truncate(make_BG(cyclic(2)), 5).levels == ()
    assert truncate(T, 1).levels == ()
    assert truncate(T, 2).levels == (2,)


def test_products():
    T = k_tower(cyclic(2), [2], [1])
    P = product(T, point())
    assert P.homotopy_orders() == T.homotopy_orders()
    B = product(make_BG(cyclic(2)), make_BG(cyclic(3)))
    assert find_isomorphism(B.base, cyclic(6)) is not None
    E = trivial_group()
    K = product(make_KAG(E, GModule.trivial(E, [2]), 2), make_KAG(E, GModule.trivial(E, [3]), 2))
    assert K.module_at(2).abelian.invariant_factors == (6,)


def test_p_towers():
    assert is_p_tower(make_BG(direct_product(cyclic(2), cyclic(4))), 2)
    assert not is_p_tower(inverted_z3_tower(), 2)
    assert is_p_tower(point(), 7)


def test_identity_and_equivariant_maps_are_valid():
    T = k_tower(symmetric(3), [4], [1])
    assert validate_map(identity_map(T))
    G = cyclic(2)
    A = make_KAG(G, GModule.trivial(G, [4]), 2)
    B = make_KAG(G, GModule.trivial(G, [2]), 2)
    m = TowerMap(A, B, np.arange(2), {2: [[1]]})
    v = validate_map(m)
    assert v and all(w.is_zero() for w in v.witnesses.values())


def test_non_equivariant_map_reports_pair():
    X = inverted_z3_tower()
    G = X.base
    Y = make_KAG(G, GModule.trivial(G, [3]), 2)
    v = validate_map(TowerMap(Y, X, np.arange(2), {2: [[1]]}))
    assert not v
    bad = next(d for d in v.diagnostics if not d.ok)
    assert bad.level == 2 and bad.failure is not None


def test_witness_condition():
    G = cyclic(2)
    T = k_tower(G, [2], [1])
    B = make_KAG(G, GModule.trivial(G, [2]), 2)
    # k cannot be killed: map from the split tower with identity on pi_2 fails
    assert not validate_map(TowerMap(B, T, np.arange(2), {2: [[1]]}))
    # zero on pi_2 pulls back k, which is nonzero
    assert not validate_map(TowerMap(B, T, np.arange(2), {2: [[0]]}))
    # T -> B(Z/2) forgetting pi_2 is fine
    assert validate_map(TowerMap(T, make_BG(G), np.arange(2)))


def test_explicit_witness_checked():
    G = symmetric(3)
    M = GModule.trivial(G, [4])
    rng = np.random.default_rng(0)
    H = cohomology_group(G, M, 3)
    k = H.element([1])
    b = Cochain.random(M, 2, rng)
    S = PostnikovTower(G, [Stage(2, M, k + coboundary(b))], name="S")
    T = PostnikovTower(G, [Stage(2, M, k)], name="T")
    good = TowerMap(S, T, np.arange(6), {2: [[1]]}, {2: b})
    assert validate_map(good, fill_witnesses=False)
    assert not coboundary(b).is_zero()
    wrong = TowerMap(S, T, np.arange(6), {2: [[1]]}, {2: b.scale(2)})
    assert not validate_map(wrong, fill_witnesses=False)


def test_equivalences():
    T = k_tower(symmetric(3), [4], [1])
    assert is_equivalence(identity_map(T))
    inc = TowerMap(make_BG(cyclic(2)), make_BG(cyclic(4)), np.array([0, 2]))
    assert validate_map(inc) and not is_equivalence(inc)


def test_compose_pastes_witnesses():
    G = cyclic(2)
    T = k_tower(G, [4], [1])
    idm = identity_map(T)
    c = compose(idm, idm)
    assert validate_map(c, fill_witnesses=False) and is_equivalence(c)
    with pytest.raises(UserInputError):
        compose(identity_map(make_BG(cyclic(3))), idm)
