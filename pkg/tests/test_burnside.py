import numpy as np
import pytest

from sylowtower.burnside import analyze_fibration, finite_gset_fixed_points, homotopy_fixed_point_section
from sylowtower.errors import PreconditionError, UserInputError
from sylowtower.groups import cyclic, symmetric, trivial_group
from sylowtower.modules import GModule
from sylowtower.postnikov import TowerMap, identity_map, is_equivalence, make_BG, make_KAG, product

from oracles import orbit_fixed_points


def z6_over_z2():
    G = cyclic(6)
    total = make_KAG(G, GModule.trivial(G, [3]), 2, name="total")
    gamma = TowerMap(total, make_BG(cyclic(2)), np.arange(6) % 2, name="gamma")
    return gamma


def test_identity_fibration():
    G = cyclic(4)
    fib = analyze_fibration(identity_map(make_KAG(G, GModule.trivial(G, [2]), 2)))
    assert all(d.kernel_order == 1 and d.cokernel_order == 1 for d in fib.levels)


def test_z6_over_z2_kernels():
    fib = analyze_fibration(z6_over_z2())
    by = {d.level: d for d in fib.levels}
    assert by[1].kernel_order == 3 and by[2].kernel_order == 3
    assert all(d.cokernel_order == 1 for d in fib.levels)
    assert fib.fiber_orders()[1] == 3 and fib.fiber_orders()[2] == 3


def test_inclusion_cokernel():
    gamma = TowerMap(make_BG(cyclic(2)), make_BG(cyclic(4)), np.array([0, 2]), name="inc")
    fib = analyze_fibration(gamma)
    assert fib.levels[0].cokernel_order == 2


def test_section_for_z6_over_z2():
    sec = homotopy_fixed_point_section(z6_over_z2(), 2)
    assert is_equivalence(sec.composite)
    assert sec.section.source.base.order == 2
    assert sec.sylow.source.homotopy_orders() == {1: 2}


def test_section_of_split_fibration():
    E = trivial_group()
    X = make_KAG(E, GModule.trivial(E, [5]), 2, name="X")
    total = product(make_BG(cyclic(4)), X, name="total")
    gamma = TowerMap(total, make_BG(cyclic(4)), np.arange(total.base.order) // X.base.order, name="proj")
    sec = homotopy_fixed_point_section(gamma, 2)
    assert is_equivalence(sec.composite)


def test_kernel_divisible_by_p_is_located():
    gamma = TowerMap(make_BG(cyclic(4)), make_BG(cyclic(2)), np.arange(4) % 2, name="q")
    with pytest.raises(PreconditionError) as e:
        homotopy_fixed_point_section(gamma, 2)
    assert e.value.location == "q/level 1"
    assert "kernel" in e.value.message and e.value.hint


def test_base_not_p_tower():
    gamma = identity_map(make_BG(cyclic(6)))
    with pytest.raises(PreconditionError) as e:
        homotopy_fixed_point_section(gamma, 2)
    assert "base" in e.value.location


def test_invalid_projection():
    G = cyclic(2)
    gamma = TowerMap(make_BG(G), make_BG(cyclic(3)), np.array([0, 1]), name="bad")
    with pytest.raises(UserInputError):
        analyze_fibration(gamma)


def test_gset_examples():
    C2 = cyclic(2)
    s = next(g for g in range(2) if g != C2.identity)
    act = np.tile(np.arange(3), (2, 1))
    act[s] = [1, 0, 2]
    fp = finite_gset_fixed_points(C2, act, 2)
    assert fp.points == [2] and fp.congruent
    C3 = cyclic(3)
    g = C3.generators[0]
    act = np.zeros((3, 5), dtype=np.int64)
    for k in range(3):
        x = C3.identity
        for _ in range(k):
            x = C3.op(x, g)
        act[x] = [(i + k) % 3 for i in range(3)] + [3, 4]
    fp = finite_gset_fixed_points(C3, act, 3)
    assert len(fp.points) == 2 and fp.congruent
    assert len(fp.points) == orbit_fixed_points(act)
    triv = np.tile(np.arange(4), (3, 1))
    assert finite_gset_fixed_points(C3, triv, 3).points == [0, 1, 2, 3]


def test_gset_preconditions():
    with pytest.raises(PreconditionError):
        finite_gset_fixed_points(symmetric(3), np.tile(np.arange(2), (6, 1)), 2)
    with pytest.raises(PreconditionError) as e:
        finite_gset_fixed_points(cyclic(2), np.tile(np.arange(4), (2, 1)), 2)
    assert e.value.location == "set"
    assert finite_gset_fixed_points(cyclic(2), np.tile(np.arange(4), (2, 1)), 2, require_coprime=False).congruent
    with pytest.raises(UserInputError):
        finite_gset_fixed_points(cyclic(2), np.array([[0, 1], [0, 0]]), 2)
