import numpy as np
import pytest

from sylowtower.errors import UserInputError
from sylowtower.groups import (FiniteGroup, are_conjugate, cyclic, dihedral, direct_product, enumerate_subgroups,
                               find_isomorphism, is_homomorphism, is_nilpotent_group, quaternion, quotient,
                               sylow_subgroups, symmetric, trivial_group)

from oracles import brute_sylow_count


def test_trivial_group_has_one_subgroup():
    subs = enumerate_subgroups(trivial_group())
    assert [H.order for H in subs] == [1]


def test_cyclic4_subgroups():
    assert sorted(H.order for H in enumerate_subgroups(cyclic(4))) == [1, 2, 4]


def test_s3_subgroups():
    subs = enumerate_subgroups(symmetric(3))
    assert len(subs) == 6
    assert sorted(H.order for H in subs) == [1, 2, 2, 2, 3, 6]


def test_s3_sylows():
    G = symmetric(3)
    two = sylow_subgroups(G, 2)
    assert len(two) == 3 and all(H.order == 2 for H in two)
    three = sylow_subgroups(G, 3)
    assert len(three) == 1 and three[0].order == 3 and three[0].is_normal()


def test_sylow_for_coprime_prime_is_trivial():
    subs = sylow_subgroups(symmetric(3), 5)
    assert len(subs) == 1 and subs[0].order == 1


@pytest.mark.parametrize("G", [cyclic(12), symmetric(4), dihedral(12), quaternion(8)])
def test_sylow_count_matches_brute_force(G):
    for p in (2, 3):
        assert len(sylow_subgroups(G, p)) == brute_sylow_count(G.mul.tolist(), p)


def test_nilpotency():
    c = is_nilpotent_group(cyclic(6))
    assert c and len(c.series) == 2
    s = is_nilpotent_group(symmetric(3))
    assert not s and s.series[-1].order == 3
    assert is_nilpotent_group(dihedral(8))


def test_conjugacy_in_s3():
    G = symmetric(3)
    a, b, _ = sylow_subgroups(G, 2)
    assert are_conjugate(G, a, a) == G.identity
    g = are_conjugate(G, a, b)
    assert g is not None and a.conjugate(g) == b
    assert any(a.conjugate(t) == b for t in range(G.order) if G.element_orders[t] == 2)
    A3 = sylow_subgroups(G, 3)[0]
    assert are_conjugate(G, A3, a) is None


def test_isomorphisms():
    G = cyclic(6)
    ident = find_isomorphism(G, G)
    assert ident is not None and is_homomorphism(G, G, ident)
    iso = find_isomorphism(cyclic(6), direct_product(cyclic(2), cyclic(3)))
    assert iso is not None and len(set(iso.tolist())) == 6
    assert find_isomorphism(cyclic(4), direct_product(cyclic(2), cyclic(2))) is None


def test_quotient_s3_by_a3():
    G = symmetric(3)
    Q, proj = quotient(G, sylow_subgroups(G, 3)[0])
    assert Q.order == 2
    assert is_homomorphism(G, Q, proj)


def test_table_validation():
    with pytest.raises(UserInputError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(UserInputError):
        FiniteGroup(np.zeros((0, 0)))
    # a Latin square with identity that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(UserInputError):
        FiniteGroup(bad)
