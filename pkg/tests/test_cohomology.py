import numpy as np
import pytest

from sylowtower.cohomology import Cochain, cohomology_group
from sylowtower.cohomology.cochains import coboundary, is_cocycle
from sylowtower.cohomology.groups import cohomologous_witness, restriction, solve_coboundary, transfer
from sylowtower.corpus import sign_module, index2_subgroups
from sylowtower.errors import CapacityError, UserInputError
from sylowtower.groups import (alternating, cyclic, dihedral, direct_product, enumerate_subgroups, quaternion, symmetric,
                               trivial_group)
from sylowtower.modules import FiniteAbelianGroup, GModule, restrict_module

from oracles import cyclic_cohomology, fp_cohomology_dim


def inversion(m, k):
    G = cyclic(m)
    return GModule.from_generators(G, [k], {G.generators[0]: [[-1]]})


def sigma(G):
    return next(g for g in range(G.order) if g != G.identity)


def test_degree0_coboundary_by_hand():
    M = inversion(2, 3)
    c = Cochain.constant(M, [1])
    d = coboundary(c)
    assert int(d.values[sigma(M.group), 0]) == 1


def test_degree1_coboundary_by_hand():
    G = cyclic(2)
    M = GModule.trivial(G, [5])
    vals = np.zeros((2, 1), dtype=np.int64)
    s = sigma(G)
    vals[s] = 3
    d = coboundary(Cochain(M, 1, vals))
    assert int(d.values[s, s, 0]) == 6 % 5


def test_coboundary_squares_to_zero():
    rng = np.random.default_rng(1)
    for M in (inversion(2, 3), GModule.trivial(symmetric(3), [4]), sign_module(dihedral(8),
                                                                            index2_subgroups(dihedral(8))[0], [6])):
        for n in range(3):
            c = Cochain.random(M, n, rng)
            assert coboundary(coboundary(c)).is_zero()


def test_trivial_group_cohomology_vanishes():
    M = GModule.trivial(trivial_group(), [6])
    assert cohomology_group(M.group, M, 0).invariant_factors == (6,)
    for n in (1, 2, 3):
        assert cohomology_group(M.group, M, n).order == 1


def test_known_groups():
    G = cyclic(2)
    assert cohomology_group(G, GModule.trivial(G, [2]), 3).invariant_factors == (2,)
    M = inversion(2, 3)
    for n in (1, 2, 3, 4):
        assert cohomology_group(G, M, n).order == 1
    S3 = symmetric(3)
    assert cohomology_group(S3, GModule.trivial(S3, [2]), 3).invariant_factors == (2,)


@pytest.mark.parametrize("m,k", [(2, 4), (4, 2), (3, 9), (6, 4), (4, 6)])
def test_cyclic_trivial_coefficients(m, k):
    G = cyclic(m)
    M = GModule.trivial(G, [k])
    for n in range(4):
        assert list(cohomology_group(G, M, n).invariant_factors) == cyclic_cohomology(m, k, 1, n)


@pytest.mark.parametrize("G,p,top", [
    (quaternion(8), 2, 2), (dihedral(8), 2, 2), (symmetric(3), 2, 3), (symmetric(3), 3, 3),
    (direct_product(cyclic(2), cyclic(2)), 2, 2), (cyclic(6), 3, 3),
])
def test_mod_p_dimensions_against_bar_oracle(G, p, top):
    table = G.mul.tolist()
    action = [[[1]]] * G.order
    M = GModule.trivial(G, [p])
    for n in range(top + 1):
        H = cohomology_group(G, M, n)
        assert len(H.invariant_factors) == fp_cohomology_dim(table, action, p, n)


def test_sign_module_against_bar_oracle():
    G = dihedral(8)
    H = index2_subgroups(G)[0]
    M = sign_module(G, H, [3])
    action = [M.action[g].tolist() for g in range(G.order)]
    for n in range(3):
        assert len(cohomology_group(G, M, n).invariant_factors) == fp_cohomology_dim(G.mul.tolist(), action, 3, n)


def test_morse_agrees_with_bar():
    for G, M in ((symmetric(3), GModule.trivial(symmetric(3), [4])), (cyclic(4), GModule.trivial(cyclic(4), [2])),
                 (cyclic(2), inversion(2, 4))):
        for n in range(4):
            a = cohomology_group(G, M, n).invariant_factors
            b = cohomology_group(G, M, n, method="bar").invariant_factors
            assert a == b


def test_nonsolvable_group():
    A5 = alternating(5)
    M = GModule.trivial(A5, [2])
    assert cohomology_group(A5, M, 1).order == 1
    assert cohomology_group(A5, M, 2).invariant_factors == (2,)


def test_generators_are_cocycles_with_unit_coordinates():
    G = dihedral(8)
    M = GModule.trivial(G, [2])
    H = cohomology_group(G, M, 2)
    for j, z in enumerate(H.generators):
        assert is_cocycle(z) and z.is_normalized
        e = np.zeros(H.abelian.rank, dtype=np.int64)
        e[j] = 1
        assert np.array_equal(H.coordinates(z), e)


def test_restriction_examples():
    G = cyclic(4)
    M = GModule.trivial(G, [2])
    sub = next(S for S in enumerate_subgroups(G) if S.order == 2)
    H1 = cohomology_group(G, M, 1)
    one = H1.class_of(H1.generators[0])
    assert restriction(one, sub).is_zero()
    H2 = cohomology_group(G, M, 2)
    gen = H2.class_of(H2.generators[0])
    assert restriction(gen, G.whole).coords.tolist() == gen.coords.tolist()
    assert restriction(gen, G.trivial_subgroup).is_zero()
    # the nonzero class is the extension Z/8 -> Z/4, whose preimage of Z/2 is the nonsplit Z/4
    assert not restriction(gen, sub).is_zero()


def test_transfer_after_restriction_is_index():
    G = cyclic(2)
    M = GModule.trivial(G, [2])
    H2 = cohomology_group(G, M, 2)
    c = H2.class_of(H2.generators[0])
    back = transfer(restriction(c, G.trivial_subgroup), G.trivial_subgroup, M)
    assert back.is_zero()
    same = transfer(restriction(c, G.whole), G.whole, M)
    assert same == c
    S3 = symmetric(3)
    M3 = GModule.trivial(S3, [3])
    H = cohomology_group(S3, M3, 2)
    rng = np.random.default_rng(0)
    for S in enumerate_subgroups(S3):
        z = H.random_cocycle(rng)
        t = transfer(restriction(H.class_of(z), S), S, M3)
        assert np.array_equal(t.coords, np.mod(S.index * H.class_of(z).coords, H.abelian.moduli))


def test_witnesses():
    rng = np.random.default_rng(3)
    G = symmetric(3)
    M = GModule.trivial(G, [6])
    H = cohomology_group(G, M, 2)
    z = H.random_cocycle(rng)
    assert cohomologous_witness(z, z).is_zero()
    b = Cochain.random(M, 1, rng)
    w = cohomologous_witness(z + coboundary(b), z)
    assert coboundary(w) == coboundary(b)
    C2 = cyclic(2)
    T = GModule.trivial(C2, [2])
    H1 = cohomology_group(C2, T, 1)
    assert cohomologous_witness(H1.generators[0], Cochain.zero(T, 1)) is None
    assert solve_coboundary(H1.generators[0]) is None
    with pytest.raises(UserInputError):
        cohomologous_witness(Cochain.constant(T, [1]), Cochain.zero(T, 0))


def test_witness_rejects_non_cocycle():
    G = cyclic(3)
    M = GModule.trivial(G, [3])
    c = Cochain.zero(M, 1)
    vals = c.values.copy()
    vals[1] = 1
    with pytest.raises(UserInputError):
        cohomologous_witness(Cochain(M, 1, vals), Cochain.zero(M, 1))


def test_capacity_error(monkeypatch):
    monkeypatch.setenv("SYLOWTOWER_MAX_CELLS", "100")
    G = symmetric(4)
    M = GModule.trivial(G, [2])
    with pytest.raises(CapacityError) as e:
        Cochain.zero(M, 3)
    assert e.value.exit_code == 2


def test_module_over_wrong_group():
    M = GModule.trivial(cyclic(3), [2])
    with pytest.raises(UserInputError):
        cohomology_group(cyclic(2), M, 1)


def test_restrict_then_cohomology_of_subgroup_module():
    G = dihedral(8)
    H = index2_subgroups(G)[0]
    M = sign_module(G, H, [4])
    R = restrict_module(M, H)
    assert R.is_trivial_action()
    assert FiniteAbelianGroup((4,)) == R.abelian
