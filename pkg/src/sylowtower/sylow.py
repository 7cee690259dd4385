"""Sylow maps into towers: construction, enumeration, factorization, conjugacy, normality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cohomology import Cochain, cohomologous_witness, pullback, pushforward, solve_coboundary
from .errors import PreconditionError, TheoryViolation, UserInputError
from .groups import Subgroup, are_conjugate, hom_image, hom_kernel, quotient, sylow_subgroups
from .modules import (GModule, apply_hom, hom_image_elements, hom_kernel_elements, primary_decompose,
                      pullback_module, restrict_module)
from .numtheory import is_p_power, p_part
from .postnikov import PostnikovTower, Stage, TowerMap, compose, is_equivalence, is_p_tower, validate_map


def _positions(H: Subgroup) -> np.ndarray:
    pos = np.full(H.parent.order, -1, dtype=np.int64)
    pos[list(H.elements)] = np.arange(H.order)
    return pos


def sylow_tower(T: PostnikovTower, p: int, P: Subgroup | None = None) -> TowerMap:
    """The p-Sylow map onto the p-primary part of T over the Sylow subgroup P.

    At each level the k-invariant restricted to P splits as a p-primary part
    (kept as the source k) and a prime-to-p part, which must bound over P
    since P is a p-group; the bounding cochain becomes the map's witness.
    """
    G = T.base
    if P is None:
        P = sylow_subgroups(G, p)[0]
    if P.parent != G or P.order != p_part(G.order, p) or not is_p_power(P.order, p):
        raise PreconditionError(f"subgroup of order {P.order} is not a Sylow {p}-subgroup of pi_1",
                                location=T.name)
    Pg, emb = P.as_group()
    stages, maps, wit = [], {}, {}
    for st in T.stages:
        dec = primary_decompose(st.module, p)
        MP = restrict_module(st.module, P)
        k_res = pullback(st.k, emb, MP)
        Mp = pullback_module(dec.p_part, emb, Pg)
        Mc = pullback_module(dec.coprime_part, emb, Pg)
        k_p = pushforward(k_res, dec.proj_p, Mp)
        k_c = pushforward(k_res, dec.proj_coprime, Mc)
        if k_c.is_zero():
            b = Cochain.zero(MP, st.level)
        else:
            b_c = solve_coboundary(k_c)
            if b_c is None:
                raise TheoryViolation(
                    f"the prime-to-{p} part of the level-{st.level} k-invariant does not bound over a "
                    f"{p}-group, although coprime cohomology vanishes", location=f"{T.name}/level {st.level}")
            b = pushforward(b_c, dec.incl_coprime, MP).scale(-1)
        if Mp.order > 1:
            stages.append(Stage(st.level, Mp, k_p))
        maps[st.level] = dec.incl_p
        wit[st.level] = b
    name = f"Syl_{p}({T.name})"
    src = PostnikovTower(Pg, stages, name=name, check=False)
    return TowerMap(src, T, emb, maps, wit, name=f"{name}->{T.name}")


@dataclass
class SylowMapSet:
    prime: int
    target: PostnikovTower
    maps: list[TowerMap]

    @property
    def count(self) -> int:
        return len(self.maps)

    def to_json(self) -> dict:
        return {"prime": self.prime, "count": self.count,
                "subgroups": [list(m.image_subgroup().elements) for m in self.maps],
                "source_orders": [dict(sorted(m.source.homotopy_orders().items())) for m in self.maps]}


def enumerate_sylow_maps(T: PostnikovTower, p: int) -> SylowMapSet:
    maps = [sylow_tower(T, p, P) for P in sylow_subgroups(T.base, p)]
    return SylowMapSet(p, T, maps)


def sylow_map_failure(m: TowerMap, p: int) -> str | None:
    """Why m is not a p-Sylow map, or None if it is one."""
    S, T = m.source, m.target
    if not is_p_tower(S, p):
        return "source is not a p-tower"
    if len(set(m.phi1.tolist())) != S.base.order:
        return "pi_1 map is not injective"
    if S.base.order != p_part(T.base.order, p):
        return "pi_1 image is not a Sylow subgroup"
    for level in m.levels:
        Ms, Mt = S.module_at(level), T.module_at(level)
        if Ms.order != p_part(Mt.order, p):
            return f"pi_{level} image is not the {p}-primary part"
        if Ms.order > 1 and len(hom_kernel_elements(m.stage_maps[level], Ms.abelian, Mt.abelian)) != 1:
            return f"pi_{level} map is not injective"
    return None


def is_sylow_map(m: TowerMap, p: int) -> bool:
    return sylow_map_failure(m, p) is None


@dataclass
class Factorization:
    g: TowerMap
    s: TowerMap
    homotopies: dict[int, Cochain]

    def to_json(self) -> dict:
        return {"sylow_subgroup": list(self.s.image_subgroup().elements),
                "levels": sorted(self.homotopies)}


def factor_through_sylow(f: TowerMap, p: int) -> Factorization:
    """Factor f: H -> G with H a p-tower as s o g through the canonical Sylow map s.

    The canonical Sylow subgroup is the smallest one (in the canonical
    order) containing the image of phi1.  The returned homotopies e_n satisfy
    de_n = b_n(f) - b_n(s o g), certifying that s o g agrees with f.
    """
    H, G = f.source, f.target
    if not is_p_tower(H, p):
        raise PreconditionError(f"source of the map is not a {p}-tower", location=f.name,
                                hint=f"all homotopy groups of the source must have {p}-power order")
    v = validate_map(f)
    if not v:
        first = next(d for d in v.diagnostics if not d.ok)
        raise UserInputError(f"map to factor is invalid: {first.message}", location=f"{f.name}/level {first.level}")
    img = set(f.phi1.tolist())
    P = next(S for S in sylow_subgroups(G.base, p) if img <= set(S.elements))
    s = sylow_tower(G, p, P)
    pos = _positions(P)
    g1 = pos[f.phi1]
    maps, wit = {}, {}
    for level in sorted(set(H.levels) | set(G.levels)):
        dec = primary_decompose(G.module_at(level), p)
        phi = f.stage_maps[level]
        maps[level] = np.mod(dec.proj_p @ phi, dec.p_part.abelian.moduli[:, None]) if dec.p_part.rank \
            else np.zeros((0, H.module_at(level).rank), dtype=np.int64)
        N = pullback_module(s.source.module_at(level), g1, H.base)
        bf = f.witnesses[level]
        wit[level] = pushforward(bf, dec.proj_p, N) if bf is not None and N.rank else None
    g = TowerMap(H, s.source, g1, maps, wit, name=f"{f.name}/lift")
    vg = validate_map(g)
    if not vg:
        raise TheoryViolation("the lift to the Sylow tower failed validation", location=f.name)
    sg = compose(s, g)
    homotopies = {}
    for level in sorted(set(H.levels) | set(G.levels)):
        if not np.array_equal(sg.stage_maps[level], f.stage_maps[level]):
            raise TheoryViolation(f"the factorization changes pi_{level}", location=f.name)
        if G.module_at(level).order == 1:
            continue
        diff = f.witnesses[level] - sg.witnesses[level]
        e = cohomologous_witness(diff, Cochain.zero(diff.module, level)) if not diff.is_zero() \
            else Cochain.zero(diff.module, level - 1)
        if e is None:
            raise TheoryViolation(f"the factorization disagrees with the map at level {level}", location=f.name)
        homotopies[level] = e
    if not np.array_equal(sg.phi1, f.phi1):
        raise TheoryViolation("the factorization changes pi_1", location=f.name)
    return Factorization(g, s, homotopies)


@dataclass
class SylowConjugation:
    element: int
    equivalence: TowerMap

    def to_json(self) -> dict:
        return {"element": self.element}


def conjugation_map(T: PostnikovTower, g: int) -> TowerMap:
    """The self-map of T given by conjugation by g on pi_1 and the action of g on each pi_n."""
    G = T.base
    phi1 = np.array([G.conj(g, x) for x in range(G.order)], dtype=np.int64)
    maps = {s.level: s.module.action[g] for s in T.stages}
    m = TowerMap(T, T, phi1, maps, {}, name=f"conj[{g}]")
    return m


def are_conjugate_sylow_maps(m1: TowerMap, m2: TowerMap, p: int) -> SylowConjugation:
    """An element g and an equivalence e of sources with m2 o e = c_g o m1 on homotopy groups."""
    for i, m in enumerate((m1, m2), 1):
        why = sylow_map_failure(m, p)
        if why is not None:
            raise PreconditionError(f"map {i} is not a {p}-Sylow map: {why}", location=m.name)
    T = m1.target
    g = are_conjugate(T.base, m1.image_subgroup(), m2.image_subgroup())
    if g is None:  # pragma: no cover - Sylow subgroups are always conjugate
        raise TheoryViolation("two Sylow subgroups are not conjugate", location=T.name)
    return SylowConjugation(int(g), conjugating_equivalence(m1, m2, int(g)))


def conjugating_equivalence(m1: TowerMap, m2: TowerMap, g: int) -> TowerMap:
    """The equivalence e of sources with m2 o e = c_g o m1, for g moving image(m1) onto image(m2)."""
    T = m1.target
    G = T.base
    pos2 = np.full(G.order, -1, dtype=np.int64)
    pos2[m2.phi1] = np.arange(len(m2.phi1))
    e1 = pos2[[G.conj(g, int(x)) for x in m1.phi1]]
    if (e1 < 0).any():
        raise UserInputError(f"element {g} does not conjugate one image onto the other")
    maps = {}
    for level in m1.levels:
        S1, S2 = m1.source.module_at(level), m2.source.module_at(level)
        if S1.order == 1:
            maps[level] = np.zeros((S2.rank, S1.rank), dtype=np.int64)
            continue
        M = T.module_at(level)
        # image of m1 at this level moved by g, expressed in m2's source coordinates
        moved = apply_hom(M.action[g] @ m1.stage_maps[level], np.eye(S1.rank, dtype=np.int64), M.abelian)
        maps[level] = _preimages(m2.stage_maps[level], S2, M, moved).T
    e = TowerMap(m1.source, m2.source, e1, maps, {}, name=f"conj[{g}]:{m1.name}->{m2.name}")
    if not validate_map(e) or not is_equivalence(e):
        raise TheoryViolation("conjugation of Sylow maps does not give an equivalence", location=T.name)
    lhs = compose(m2, e)
    rhs = compose(conjugation_map(T, g), m1)
    if not np.array_equal(lhs.phi1, rhs.phi1) or any(
            not np.array_equal(lhs.stage_maps[lv], rhs.stage_maps[lv]) for lv in lhs.levels):
        raise TheoryViolation("conjugation square does not commute", location=T.name)
    return e


def _preimages(phi: np.ndarray, S: GModule, M: GModule, targets: np.ndarray) -> np.ndarray:
    """For an injective phi: S -> M, the preimages of the rows of ``targets``."""
    E = S.abelian.elements()
    img = M.abelian.index_of(apply_hom(phi, E, M.abelian))
    lookup = {int(i): k for k, i in enumerate(img)}
    out = []
    for t in targets:
        k = lookup.get(int(M.abelian.index_of(np.mod(t, M.abelian.moduli))))
        if k is None:
            raise TheoryViolation("conjugate Sylow image is not contained in the other Sylow image")
        out.append(E[k])
    return np.array(out, dtype=np.int64).reshape(len(targets), S.rank)


# normality ---------------------------------------------------------------------

@dataclass
class NormalityReport:
    prime: int
    pi1_normal: bool
    trivial_action: dict[int, bool]
    failures: dict[int, list[tuple[int, list[int]]]]
    status: str  # "normal", "obstructed" or "undecided"
    quotient: PostnikovTower | None = None
    quotient_map: TowerMap | None = None
    pi1_witness: tuple[int, list[int]] | None = None

    @property
    def obstructed(self) -> bool:
        return self.status == "obstructed"

    def obstruction_levels(self) -> list[int]:
        return sorted(lv for lv, ok in self.trivial_action.items() if not ok)

    def to_json(self) -> dict:
        d = {
            "prime": self.prime,
            "status": self.status,
            "pi1_normal": self.pi1_normal,
            "trivial_action_on_prime_to_p": {str(k): v for k, v in sorted(self.trivial_action.items())},
            "obstructions": [{"level": lv, "element": g, "vector": a}
                             for lv in sorted(self.failures) for g, a in self.failures[lv]],
        }
        if self.pi1_witness is not None:
            d["pi1_conjugate_outside"] = {"element": self.pi1_witness[0], "conjugate": self.pi1_witness[1]}
        if self.quotient is not None:
            d["quotient"] = self.quotient.summary()
        return d


def normality_obstruction(s: TowerMap, p: int) -> NormalityReport:
    """Necessary conditions for s to be normal, with a quotient certificate when k = 0.

    (a) the pi_1 image is normal; (b) at every level the pi_1 image acts
    trivially on the prime-to-p part.  Each failing (element, basis vector)
    pair is reported.
    """
    why = sylow_map_failure(s, p)
    if why is not None:
        raise PreconditionError(f"not a {p}-Sylow map: {why}", location=s.name)
    T = s.target
    G = T.base
    P = s.image_subgroup()
    normal = P.is_normal()
    pi1_wit = None
    if not normal:
        g = next(x for x in G.generators if P.conjugate(x) != P)
        pi1_wit = (int(g), list(P.conjugate(g).elements))
    trivial, failures = {}, {}
    for st in T.stages:
        dec = primary_decompose(st.module, p)
        Mc = dec.coprime_part
        bad = []
        for h in P.elements:
            for j in range(Mc.rank):
                e = np.zeros(Mc.rank, dtype=np.int64)
                e[j] = 1
                if not np.array_equal(Mc.act(h, e), np.mod(e, Mc.abelian.moduli)):
                    bad.append((int(h), e.tolist()))
        trivial[st.level] = not bad
        if bad:
            failures[st.level] = bad
    ok = normal and all(trivial.values())
    if not ok:
        return NormalityReport(p, normal, trivial, failures, "obstructed", pi1_witness=pi1_wit)
    if not T.all_k_zero():
        return NormalityReport(p, normal, trivial, failures, "undecided")
    Q, proj = quotient(G, P)
    reps = P.right_coset_reps()
    stages, maps = [], {}
    for st in T.stages:
        dec = primary_decompose(st.module, p)
        Mc = dec.coprime_part
        act = Mc.action[np.asarray(reps, dtype=np.int64)]
        MQ = GModule(Q, Mc.abelian, act)
        if MQ.order > 1:
            stages.append(Stage(st.level, MQ, Cochain.zero(MQ, st.level + 1)))
        maps[st.level] = dec.proj_coprime
    QT = PostnikovTower(Q, stages, name=f"{T.name}//Syl_{p}")
    qmap = TowerMap(T, QT, proj, maps, {}, name=f"{T.name}->{QT.name}")
    if not validate_map(qmap):
        raise TheoryViolation("quotient map of a normal Sylow map is invalid", location=T.name)
    return NormalityReport(p, normal, trivial, failures, "normal", QT, qmap)


def exact_at_every_level(s: TowerMap, q: TowerMap) -> bool:
    """pi_n(source s) -> pi_n(T) -> pi_n(quotient) is short exact at every n >= 1."""
    T = s.target
    ker = hom_kernel(T.base, q.target.base, q.phi1)
    if set(ker.elements) != set(s.phi1.tolist()) or hom_image(T.base, q.target.base, q.phi1).order != q.target.base.order:
        return False
    for level in sorted(set(T.levels) | set(s.source.levels) | set(q.target.levels)):
        A = T.module_at(level)
        if A.order == 1:
            continue
        S, Q = s.source.module_at(level), q.target.module_at(level)
        k = hom_kernel_elements(q.stage_maps[level], A.abelian, Q.abelian) if Q.rank else A.abelian.elements()
        im = hom_image_elements(s.stage_maps[level], S.abelian, A.abelian) if S.rank \
            else np.zeros((1, A.rank), dtype=np.int64)
        if sorted(map(tuple, k.tolist())) != sorted(map(tuple, im.tolist())):
            return False
        if Q.rank and len(hom_image_elements(q.stage_maps[level], A.abelian, Q.abelian)) != Q.order:
            return False
        if len(hom_kernel_elements(s.stage_maps[level], S.abelian, A.abelian) if S.rank else [0]) != 1:
            return False
    return True
