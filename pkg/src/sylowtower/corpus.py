"""A deterministic corpus of small groups, modules and towers for self-tests."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cohomology import Cochain, coboundary, cohomology_group
from .groups import (FiniteGroup, alternating, cyclic, dicyclic, dihedral, direct_product, enumerate_subgroups,
                     extend_to_homomorphism, quaternion, semidirect_cyclic, symmetric, trivial_group)
from .modules import FiniteAbelianGroup, GModule
from .postnikov import PostnikovTower, Stage, TowerMap, make_BG, make_KAG


def automorphism(N: FiniteGroup, images: dict[int, int]) -> list[int]:
    t = extend_to_homomorphism(N, N, images)
    if t is None or len(set(t.tolist())) != N.order:
        raise ValueError("images do not define an automorphism")
    return t.tolist()


def matrix_group(gens, q: int, name: str) -> FiniteGroup:
    """The group generated by 2x2 matrices over Z/q."""
    key = lambda m: tuple(int(x) for x in np.mod(m, q).ravel())  # noqa: E731
    start = key(np.eye(2, dtype=np.int64))
    elems = {start: 0}
    order = [np.eye(2, dtype=np.int64)]
    frontier = [order[0]]
    gens = [np.array(g, dtype=np.int64) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = np.mod(x @ g, q)
                k = key(y)
                if k not in elems:
                    elems[k] = len(order)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    table = [[elems[key(a @ b)] for b in order] for a in order]
    return FiniteGroup(table, name=name)


def small_groups() -> list[FiniteGroup]:
    """Cyclic groups up to 24, every group of order 8 and 16, and assorted nonabelian groups up to 24."""
    out: list[FiniteGroup] = [trivial_group()]
    out += [cyclic(n) for n in range(2, 25)]
    Z2, Z3, Z4, Z8 = cyclic(2), cyclic(3), cyclic(4), cyclic(8)
    V4 = direct_product(Z2, Z2)
    out += [V4, direct_product(Z2, Z4), direct_product(Z2, Z2, Z2), dihedral(8), quaternion(8)]
    # order 16
    Z4Z2 = direct_product(Z4, Z2)  # (a, b) at a*2 + b
    out += [
        direct_product(Z4, Z4), direct_product(Z2, Z8), direct_product(Z2, Z2, Z4), direct_product(Z2, Z2, Z2, Z2),
        dihedral(16), quaternion(16),
        semidirect_cyclic(Z8, 2, automorphism(Z8, {1: 3}), name="semidihedral:16"),
        semidirect_cyclic(Z8, 2, automorphism(Z8, {1: 5}), name="modular:16"),
        semidirect_cyclic(Z4, 4, automorphism(Z4, {1: 3}), name="Z4:Z4"),
        semidirect_cyclic(Z4Z2, 2, automorphism(Z4Z2, {2: 3, 1: 1}), name="(Z4xZ2):Z2"),
        semidirect_cyclic(Z4Z2, 2, automorphism(Z4Z2, {2: 2, 1: 5}), name="Z4oD8"),
        direct_product(dihedral(8), Z2), direct_product(quaternion(8), Z2),
    ]
    # assorted nonabelian groups of order at most 24
    S3 = symmetric(3)
    Z3Z3 = direct_product(Z3, Z3)
    out += [
        S3, dihedral(10), dihedral(12), dihedral(14), dihedral(18), dihedral(20), dihedral(22), dihedral(24),
        alternating(4), dicyclic(12), dicyclic(20), dicyclic(24),
        direct_product(Z3, S3), direct_product(Z2, alternating(4)), direct_product(Z4, S3),
        direct_product(Z3, dihedral(8)), direct_product(Z3, quaternion(8)), direct_product(V4, S3),
        semidirect_cyclic(Z3Z3, 2, automorphism(Z3Z3, {g: Z3Z3.inv[g] for g in Z3Z3.generators}),
                          name="(Z3xZ3):Z2"),
        semidirect_cyclic(cyclic(7), 3, automorphism(cyclic(7), {1: 2}), name="Z7:Z3"),
        semidirect_cyclic(cyclic(5), 4, automorphism(cyclic(5), {1: 2}), name="Z5:Z4"),
        semidirect_cyclic(Z3, 8, automorphism(Z3, {1: 2}), name="Z3:Z8"),
        symmetric(4),
        matrix_group([[[1, 1], [0, 1]], [[0, 2], [1, 0]]], 3, name="SL(2,3)"),
    ]
    return out


def p_groups(p: int, max_order: int = 16) -> list[FiniteGroup]:
    from .numtheory import is_p_power

    return [G for G in small_groups() if G.order <= max_order and is_p_power(G.order, p)]


def index2_subgroups(G: FiniteGroup):
    if G.order % 2:
        return []
    return [H for H in enumerate_subgroups(G) if 2 * H.order == G.order]


def sign_module(G: FiniteGroup, H, factors) -> GModule:
    """Elements outside the index-2 subgroup H act by -1."""
    r = len(factors)
    signs = np.array([1 if g in H else -1 for g in range(G.order)], dtype=np.int64)
    act = signs[:, None, None] * np.eye(r, dtype=np.int64)[None]
    return GModule(G, FiniteAbelianGroup(tuple(factors)), act)


def permutation_module(G: FiniteGroup, H, k: int) -> GModule:
    """(Z/k)^(G/H) with G permuting the left cosets gH."""
    cosets: list[frozenset] = []
    where = {}
    for g in range(G.order):
        if g in where:
            continue
        c = frozenset(int(G.mul[g, h]) for h in H.elements)
        for x in c:
            where[x] = len(cosets)
        cosets.append(c)
    n = len(cosets)
    act = np.zeros((G.order, n, n), dtype=np.int64)
    for g in range(G.order):
        for i, c in enumerate(cosets):
            j = where[int(G.mul[g, min(c)])]
            act[g, j, i] = 1
    return GModule(G, FiniteAbelianGroup((k,) * n), act)


def power_module(G: FiniteGroup, k: int, u: int) -> GModule | None:
    """Z/k where a generator of a cyclic G acts by multiplication by u (if u^|G| = 1 mod k)."""
    if len(G.generators) != 1 or pow(u, G.order, k) != 1 % k:
        return None
    return GModule.from_generators(G, [k], {G.generators[0]: [[u]]})


def inverted_z3_tower() -> PostnikovTower:
    """K(Z/3, 2)//(Z/2) with the generator acting on Z/3 by inversion."""
    G = cyclic(2)
    A = GModule(G, FiniteAbelianGroup((3,)), [[[1]], [[-1]]])
    return make_KAG(G, A, 2, name="K(Z/3,2)//Z2")


def _modules_for(G: FiniteGroup) -> list[GModule]:
    mods = [GModule.trivial(G, [2]), GModule.trivial(G, [3]), GModule.trivial(G, [6]), GModule.trivial(G, [2, 4])]
    subs = index2_subgroups(G)
    if subs:
        mods.append(sign_module(G, subs[0], [3]))
        mods.append(sign_module(G, subs[-1], [4]))
    if len(G.generators) == 1 and G.order > 1:
        for k, u in ((5, 2), (7, 2), (9, 4), (13, 3)):
            M = power_module(G, k, u)
            if M is not None:
                mods.append(M)
    return mods


def nonzero_k(M: GModule, level: int, rng: np.random.Generator) -> Cochain | None:
    """A random cocycle of degree level + 1 representing a nonzero class, if there is one."""
    H = cohomology_group(M.group, M, level + 1)
    if H.order == 1:
        return None
    coords = [int(rng.integers(0, d)) for d in H.invariant_factors]
    if not any(coords):
        coords[-1] = 1
    z = H.element(coords)
    return z + coboundary(Cochain.random(M, level, rng))


@lru_cache(maxsize=4)
def tower_corpus(max_order: int = 24, seed: int = 0) -> tuple[PostnikovTower, ...]:
    """Towers with |pi_1| <= max_order and at most two stages, some with nonzero k-invariants."""
    rng = np.random.default_rng(seed)
    towers: list[PostnikovTower] = [inverted_z3_tower()]
    groups = [G for G in small_groups() if G.order <= max_order]
    for G in groups:
        towers.append(make_BG(G))
    for i, G in enumerate(groups):
        if G.order == 1:
            continue
        mods = _modules_for(G)
        M = mods[i % len(mods)]
        towers.append(make_KAG(G, M, 2, name=f"K({M.abelian},2)//{G.name}"))
        if G.order <= 12:
            N = mods[(i + 2) % len(mods)]
            k = nonzero_k(M, 2, rng)
            stages = [Stage(2, M, k if k is not None else Cochain.zero(M, 3)), Stage(3, N, Cochain.zero(N, 4))]
            towers.append(PostnikovTower(G, stages, name=f"T2[{G.name};{M.abelian},{N.abelian}]"))
    return tuple(towers)


def random_hom(H: FiniteGroup, G: FiniteGroup, rng: np.random.Generator, tries: int = 200) -> np.ndarray:
    """A random homomorphism H -> G found by sampling generator images (trivial as a fallback)."""
    orders = G.element_orders
    for _ in range(tries):
        images = {}
        for h in H.generators:
            o = int(H.element_orders[h])
            cands = [x for x in range(G.order) if o % int(orders[x]) == 0]
            images[h] = int(rng.choice(cands))
        t = extend_to_homomorphism(H, G, images)
        if t is not None:
            return t
    return np.full(H.order, G.identity, dtype=np.int64)


def random_p_map(rng: np.random.Generator, p: int | None = None, towers=None) -> tuple[TowerMap, int]:
    """A random valid map from a p-tower into a corpus tower, with its prime.

    The source carries the p-primary parts of the pulled-back target modules,
    each included after a random unit rescaling, with k-invariants adjusted by
    random coboundaries.  Witnesses are left for validation to fill in.
    """
    from .modules import primary_decompose, pullback_module
    from .cohomology import pullback, pushforward
    from .numtheory import prime_divisors

    towers = towers if towers is not None else tower_corpus()
    while True:
        T = towers[int(rng.integers(len(towers)))]
        G = T.base
        primes = prime_divisors(G.order)
        if not primes:
            continue
        q = p if p is not None else int(rng.choice(primes))
        if q not in primes:
            continue
        cands = p_groups(q, 16)
        H = cands[int(rng.integers(len(cands)))]
        phi1 = random_hom(H, G, rng)
        break
    stages, maps = [], {}
    for st in T.stages:
        pulled = pullback_module(st.module, phi1, H)
        dec = primary_decompose(pulled, q)
        N = dec.p_part
        if N.rank == 0:
            maps[st.level] = np.zeros((st.module.rank, 0), dtype=np.int64)
            continue
        e = int(N.abelian.moduli.max())
        u = int(rng.integers(1, e))
        while np.gcd(u, e) != 1:
            u = int(rng.integers(1, e))
        uinv = pow(u, -1, e)
        kp = pushforward(pullback(st.k, phi1, pulled), dec.proj_p, N).scale(uinv)
        kp = kp + coboundary(Cochain.random(N, st.level, rng))
        stages.append(Stage(st.level, N, kp))
        maps[st.level] = np.mod(u * dec.incl_p, st.module.abelian.moduli[:, None])
    level = max(T.levels, default=1) + 1
    if level <= 3 and rng.random() < 0.3:
        N = GModule.trivial(H, [q])
        k = nonzero_k(N, level, rng) if H.order <= 8 and level <= 3 else None
        stages.append(Stage(level, N, k if k is not None else Cochain.zero(N, level + 1)))
        maps[level] = np.zeros((0, 1), dtype=np.int64)
    S = PostnikovTower(H, stages, name=f"Rand_{q}[{H.name}]")
    return TowerMap(S, T, phi1, maps, {}, name=f"{S.name}->{T.name}"), q


# fibrations for the homotopy fixed point construction -------------------------

@dataclass
class FibrationCase:
    name: str
    gamma: TowerMap
    prime: int
    valid: bool


def _fibration(base: PostnikovTower, G: FiniteGroup, gamma1, extra: dict, name: str, kernel_maps=None):
    """A total tower over G mapping to ``base`` along gamma1.

    At each level the total module is the pulled-back base module plus the
    module in ``extra`` (given with its k-invariant); the map projects away
    the extra summand.
    """
    from .cohomology import pullback, pushforward
    from .modules import direct_sum, pullback_module

    gamma1 = np.asarray(gamma1, dtype=np.int64)
    stages, maps = [], {}
    for level in sorted(set(base.levels) | set(extra)):
        M = base.module_at(level)
        pulled = pullback_module(M, gamma1, G)
        kpull = pullback(base.k_at(level), gamma1, pulled)
        B, kB = extra.get(level, (None, None))
        if B is None:
            stages.append(Stage(level, pulled, kpull))
            maps[level] = np.eye(M.rank, dtype=np.int64)
            continue
        if pulled.rank == 0:
            stages.append(Stage(level, B, kB))
            maps[level] = np.zeros((0, B.rank), dtype=np.int64)
            continue
        ds = direct_sum(pulled, B)
        k = pushforward(kpull, ds.inclusions[0], ds.module) + pushforward(kB, ds.inclusions[1], ds.module)
        stages.append(Stage(level, ds.module, k))
        maps[level] = ds.projections[0]
    total = PostnikovTower(G, [s for s in stages if s.module.order > 1], name=f"E[{name}]")
    return TowerMap(total, base, gamma1, maps, {}, name=name)


def _with_stage(P: FiniteGroup, M: GModule | None, k: Cochain | None, level: int = 2) -> PostnikovTower:
    if M is None:
        return make_BG(P)
    return PostnikovTower(P, [Stage(level, M, k if k is not None else Cochain.zero(M, level + 1))])


def _k_or_zero(M: GModule, level: int, rng) -> Cochain:
    k = nonzero_k(M, level, rng) if M.group.order ** (level + 1) * M.rank <= 400_000 else None
    return k if k is not None else Cochain.zero(M, level + 1)


def fibration_corpus(seed: int = 0) -> list[FibrationCase]:
    """Valid fibrations (p-tower base, prime-to-p fiber) followed by ones that break a hypothesis."""
    from .groups import product_projection

    rng = np.random.default_rng(seed)
    cases: list[FibrationCase] = []
    setups = [(2, cyclic(2), 3), (2, cyclic(4), 3), (2, direct_product(cyclic(2), cyclic(2)), 3),
              (2, dihedral(8), 3), (2, quaternion(8), 3), (2, cyclic(2), 5), (2, cyclic(8), 3),
              (3, cyclic(3), 2), (3, cyclic(9), 2), (3, direct_product(cyclic(3), cyclic(3)), 2),
              (3, cyclic(3), 7), (5, cyclic(5), 2)]
    for p, P, q in setups:
        C = cyclic(q)
        # base without stages, with a trivial stage, with a nonzero k-invariant
        bases = [make_BG(P)]
        Mp = GModule.trivial(P, [p])
        bases.append(_with_stage(P, Mp, _k_or_zero(Mp, 2, rng)))
        for bi, base in enumerate(bases):
            G = direct_product(P, C)
            g1 = product_projection(P, C, 0)
            B = GModule.trivial(G, [q])
            cases.append(FibrationCase(f"{P.name}x{C.name}/b{bi}", _fibration(base, G, g1, {}, f"{P.name}x{q}.{bi}"),
                                       p, True))
            extra = {2: (B, _k_or_zero(B, 2, rng))}
            cases.append(FibrationCase(f"{P.name}x{C.name}+Z{q}/b{bi}",
                                       _fibration(base, G, g1, extra, f"{P.name}x{q}+{q}.{bi}"), p, True))
        # nontrivial action of the base on the fiber: Z/q x| Z/m with inversion
        if len(P.generators) == 1 and P.order % 2 == 0 and q > 2:
            m = P.order
            G = semidirect_cyclic(C, m, automorphism(C, {1: q - 1}))
            g1 = np.arange(G.order) // q
            sgn = GModule(G, FiniteAbelianGroup((q,)),
                          [[[1 if (g // q) % 2 == 0 else q - 1]] for g in range(G.order)])
            for bi, base in enumerate(bases):
                extra = {2: (sgn, _k_or_zero(sgn, 2, rng))} if bi else {3: (sgn, Cochain.zero(sgn, 4))}
                cases.append(FibrationCase(f"Z{q}:{P.name}/b{bi}", _fibration(base, G, g1, extra, f"Z{q}:{m}.{bi}"),
                                           p, True))
    # Z7 x| Z3
    G = semidirect_cyclic(cyclic(7), 3, automorphism(cyclic(7), {1: 2}))
    base = make_BG(cyclic(3))
    cases.append(FibrationCase("Z7:Z3", _fibration(base, G, np.arange(21) // 7, {}, "Z7:Z3"), 3, True))

    # broken hypotheses
    for p, P in [(2, cyclic(2)), (2, cyclic(4)), (3, cyclic(3)), (2, direct_product(cyclic(2), cyclic(2)))]:
        Cp = cyclic(p)
        G = direct_product(P, Cp)
        g1 = product_projection(P, Cp, 0)
        cases.append(FibrationCase(f"kernel-p/{P.name}", _fibration(make_BG(P), G, g1, {}, f"kerp.{P.name}"), p, False))
        Mp = GModule.trivial(P, [p])
        cases.append(FibrationCase(f"kernel-p-2/{P.name}",
                                   _fibration(make_BG(P), P, np.arange(P.order), {2: (Mp, Cochain.zero(Mp, 3))},
                                              f"ker2.{P.name}"), p, False))
        Mbase = GModule.trivial(P, [p])
        base = make_KAG(P, Mbase, 2)
        T1 = trivial_group()
        cases.append(FibrationCase(f"coker-1/{P.name}",
                                   TowerMap(make_BG(T1), make_BG(P), np.zeros(1, dtype=np.int64), {}, {},
                                            name=f"cok1.{P.name}"), p, False))
        cases.append(FibrationCase(f"coker-2/{P.name}",
                                   TowerMap(make_BG(P), base, np.arange(P.order), {}, {}, name=f"cok2.{P.name}"),
                                   p, False))
    Z6 = cyclic(6)
    cases.append(FibrationCase("base-not-p", _fibration(make_BG(Z6), Z6, np.arange(6), {}, "notp"), 2, False))
    return cases


def random_gset(G: FiniteGroup, rng: np.random.Generator, max_orbits: int = 4, subgroups=None) -> np.ndarray:
    """A left action table of G on a disjoint union of random coset spaces G/H."""
    subs = subgroups if subgroups is not None else enumerate_subgroups(G)
    blocks = []
    for _ in range(int(rng.integers(1, max_orbits + 1))):
        H = subs[int(rng.integers(len(subs)))]
        cosets, where = [], {}
        for g in range(G.order):
            if g in where:
                continue
            c = sorted(int(G.mul[g, h]) for h in H.elements)
            for x in c:
                where[x] = len(cosets)
            cosets.append(c[0])
        blocks.append(np.array([[where[int(G.mul[g, c])] for c in cosets] for g in range(G.order)], dtype=np.int64))
    out, off = [], 0
    for b in blocks:
        out.append(b + off)
        off += b.shape[1]
    act = np.concatenate(out, axis=1)
    perm = rng.permutation(act.shape[1])
    inv = np.argsort(perm)
    return perm[act[:, inv]]
