import numpy as np
import pytest

from sylowtower.corpus import inverted_z3_tower
from sylowtower.errors import PreconditionError
from sylowtower.groups import cyclic, dihedral, symmetric
from sylowtower.modules import GModule
from sylowtower.postnikov import (TowerMap, compose, identity_map, is_equivalence, make_BG, make_KAG, point,
                                  validate_map)
from sylowtower.sylow import (are_conjugate_sylow_maps, enumerate_sylow_maps, exact_at_every_level,
                              factor_through_sylow, is_sylow_map, normality_obstruction, sylow_tower)


def z6_tower():
    G = cyclic(6)
    return make_KAG(G, GModule.trivial(G, [6]), 2, name="Z6")


def test_sylow_of_coprime_prime_is_point():
    s = sylow_tower(z6_tower(), 5)
    assert s.source.base.order == 1 and s.source.levels == ()
    assert validate_map(s)


def test_sylow_of_inverted_example():
    s = sylow_tower(inverted_z3_tower(), 2)
    assert s.source.homotopy_orders() == {1: 2}
    assert validate_map(s) and is_sylow_map(s, 2)


def test_sylow_of_z6_tower():
    s = sylow_tower(z6_tower(), 3)
    assert s.source.homotopy_orders() == {1: 3, 2: 3}
    assert s.source.all_k_zero()
    assert validate_map(s)


def test_counts():
    assert enumerate_sylow_maps(z6_tower(), 2).count == 1
    G = symmetric(3)
    T = make_KAG(G, GModule.trivial(G, [4]), 2)
    assert enumerate_sylow_maps(T, 2).count == 3
    assert enumerate_sylow_maps(inverted_z3_tower(), 2).count == 1


def test_factor_from_point():
    T = make_KAG(symmetric(3), GModule.trivial(symmetric(3), [2]), 2)
    f = TowerMap(point(), T, np.array([T.base.identity]))
    fa = factor_through_sylow(f, 2)
    assert fa.s.image_subgroup() == sylow_tower(T, 2).image_subgroup()


def test_factor_transposition():
    G = symmetric(3)
    T = make_BG(G)
    t = next(g for g in range(G.order) if G.element_orders[g] == 2)
    f = TowerMap(make_BG(cyclic(2)), T, np.array([G.identity, t]))
    fa = factor_through_sylow(f, 2)
    assert t in fa.s.image_subgroup()
    sg = compose(fa.s, fa.g)
    assert np.array_equal(sg.phi1, f.phi1)


def test_factor_identity_on_p_tower():
    G = dihedral(8)
    T = make_KAG(G, GModule.trivial(G, [4]), 2)
    fa = factor_through_sylow(identity_map(T), 2)
    assert is_equivalence(fa.g) and is_equivalence(fa.s)


def test_factor_requires_p_source():
    T = z6_tower()
    with pytest.raises(PreconditionError):
        factor_through_sylow(identity_map(T), 2)


def test_conjugation():
    G = symmetric(3)
    T = make_KAG(G, GModule.trivial(G, [4]), 2)
    maps = enumerate_sylow_maps(T, 2).maps
    assert are_conjugate_sylow_maps(maps[0], maps[0], 2).element == G.identity
    for i in range(3):
        for j in range(3):
            c = are_conjugate_sylow_maps(maps[i], maps[j], 2)
            assert maps[i].image_subgroup().conjugate(c.element) == maps[j].image_subgroup()
            assert is_equivalence(c.equivalence)
    ab = enumerate_sylow_maps(z6_tower(), 3).maps[0]
    assert are_conjugate_sylow_maps(ab, ab, 3).element == ab.target.base.identity


def test_normality_of_inverted_example():
    X = inverted_z3_tower()
    rep = normality_obstruction(sylow_tower(X, 2), 2)
    assert rep.obstructed and rep.pi1_normal
    assert rep.obstruction_levels() == [2]
    g, vec = rep.failures[2][0]
    assert g != X.base.identity and vec == [1]


def test_normality_of_p_tower_identity():
    G = dihedral(8)
    T = make_BG(G)
    rep = normality_obstruction(sylow_tower(T, 2), 2)
    assert rep.status == "normal" and rep.quotient.base.order == 1


def test_normality_of_bs3():
    T = make_BG(symmetric(3))
    s = sylow_tower(T, 3)
    rep = normality_obstruction(s, 3)
    assert rep.status == "normal"
    assert rep.quotient.base.order == 2 and rep.quotient.levels == ()
    assert exact_at_every_level(s, rep.quotient_map)


def test_normality_pi1_failure():
    rep = normality_obstruction(sylow_tower(make_BG(symmetric(3)), 2), 2)
    assert rep.obstructed and not rep.pi1_normal and rep.pi1_witness is not None


def test_normality_needs_sylow_map():
    T = z6_tower()
    with pytest.raises(PreconditionError) as e:
        normality_obstruction(identity_map(T), 2)
    assert e.value.location and e.value.hint
