"""Nilpotent towers: detection, splitting into Sylow towers, p-completion, ample collections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, TheoryViolation
from .groups import NilpotencyCertificate, compose_tables, generate, invert_table, is_nilpotent_group, quotient, \
    sylow_subgroups
from .modules import ActionNilpotencyCertificate, is_nilpotent_action, primary_decompose, pullback_module
from .cohomology import pullback
from .postnikov import (PostnikovTower, Stage, TowerMap, compose, is_equivalence, primes_of, product_many,
                        truncate, validate_map)
from .sylow import conjugating_equivalence, normality_obstruction, sylow_map_failure, sylow_tower


@dataclass
class NilpotencyReport:
    nilpotent: bool
    group: NilpotencyCertificate
    actions: dict[int, ActionNilpotencyCertificate]

    def __bool__(self) -> bool:
        return self.nilpotent

    def to_json(self) -> dict:
        return {
            "nilpotent": self.nilpotent,
            "pi1_nilpotent": self.group.nilpotent,
            "lower_central_series_orders": [H.order for H in self.group.series],
            "actions": {str(lv): {"nilpotent": c.nilpotent, "filtration_orders": [A.order for A in c.chain]}
                        for lv, c in sorted(self.actions.items())},
        }


def is_nilpotent_tower(T: PostnikovTower) -> NilpotencyReport:
    g = is_nilpotent_group(T.base)
    acts = {s.level: is_nilpotent_action(s.module) for s in T.stages}
    return NilpotencyReport(bool(g) and all(acts.values()), g, acts)


@dataclass
class Decomposition:
    factors: list[tuple[int, TowerMap]]
    product: PostnikovTower
    equivalence: TowerMap

    def to_json(self) -> dict:
        return {
            "factors": [{"prime": p, "tower": s.source.summary()} for p, s in self.factors],
            "equivalence": True,
        }


def _require_nilpotent(T: PostnikovTower) -> None:
    rep = is_nilpotent_tower(T)
    if not rep:
        if not rep.group:
            why = "pi_1 is not nilpotent"
        else:
            lv = next(lv for lv, c in rep.actions.items() if not c)
            why = f"pi_1 does not act nilpotently on pi_{lv}"
        raise PreconditionError(f"tower is not nilpotent: {why}", location=T.name,
                                hint="decomposition and p-completion need a nilpotent tower")


def sylow_product_map(T: PostnikovTower) -> tuple[list[tuple[int, TowerMap]], PostnikovTower, TowerMap | None, str]:
    """The comparison map from the product of the Sylow towers of T to T.

    pi_1 goes by multiplying the Sylow components in prime order and each
    pi_n by summing the inclusions of primary parts.  The map is built one
    level at a time over the truncations of T, solving for the witness at
    each level.  Returns (factors, product, map or None, reason).
    """
    primes = primes_of(T)
    factors = [(p, sylow_tower(T, p)) for p in primes]
    prod = product_many([s.source for _, s in factors], name="x".join(s.source.name for _, s in factors) or "point")
    G = T.base
    phi1 = np.full(prod.tower.base.order, G.identity, dtype=np.int64)
    for (_, s), pr in zip(factors, prod.projections):
        phi1 = G.mul[phi1, s.phi1[pr]]
    maps, wit = {}, {}
    for level in [1] + list(T.levels):
        if level > 1:
            M = T.module_at(level)
            P = prod.tower.module_at(level)
            m = np.zeros((M.rank, P.rank), dtype=np.int64)
            for (_, s), proj in zip(factors, prod.module_projections[level]):
                m = m + s.stage_maps[level] @ proj
            maps[level] = np.mod(m, M.abelian.moduli[:, None]) if M.rank else m
        stage_map = TowerMap(truncate(prod.tower, level), truncate(T, level), phi1, dict(maps), dict(wit),
                             name=f"{prod.tower.name}->{T.name}[{level}]")
        v = validate_map(stage_map)
        if not v:
            first = next(d for d in v.diagnostics if not d.ok)
            return factors, prod.tower, None, f"level {first.level}: {first.message}"
        if not is_equivalence(stage_map):
            return factors, prod.tower, None, f"level {level}: not an isomorphism on homotopy groups"
        wit = dict(stage_map.witnesses)
    eq = TowerMap(prod.tower, T, phi1, maps, wit, name=f"{prod.tower.name}->{T.name}")
    return factors, prod.tower, eq, "equivalence"


def decompose_nilpotent(T: PostnikovTower) -> Decomposition:
    """T as the product of its Sylow towers, one per prime dividing a homotopy group order."""
    _require_nilpotent(T)
    factors, prod, eq, why = sylow_product_map(T)
    if eq is None or not validate_map(eq) or not is_equivalence(eq):
        raise TheoryViolation(f"the product of Sylow towers is not equivalent to a nilpotent tower ({why})",
                              location=T.name)
    return Decomposition(factors, prod, eq)


@dataclass
class PCompletion:
    prime: int
    completion: PostnikovTower
    projection: TowerMap
    sylow: TowerMap
    composite_is_equivalence: bool

    def to_json(self) -> dict:
        return {"prime": self.prime, "completion": self.completion.summary(),
                "sylow_composite_is_equivalence": self.composite_is_equivalence}


def p_completion(T: PostnikovTower, p: int) -> PCompletion:
    """The p-primary quotient tower T -> T^_p of a nilpotent tower, checked against the Sylow map.

    pi_1 is divided by its Hall p'-subgroup, each pi_n replaced by its
    p-primary part; the k-invariants are those of the Sylow tower carried
    over along the isomorphism of the Sylow subgroup with the quotient.
    """
    _require_nilpotent(T)
    G = T.base
    s = sylow_tower(T, p)
    others = [x for q in primes_of(T) if q != p and G.order % q == 0 for S in sylow_subgroups(G, q) for x in S.elements]
    K = generate(G, others) if others else G.trivial_subgroup
    Q, proj = quotient(G, K)
    iso = compose_tables(s.phi1, proj)
    back = invert_table(iso)
    stages = []
    for st in s.source.stages:
        MQ = pullback_module(st.module, back, Q)
        stages.append(Stage(st.level, MQ, pullback(st.k, back, MQ)))
    C = PostnikovTower(Q, stages, name=f"{T.name}^{p}")
    maps = {lv: primary_decompose(T.module_at(lv), p).proj_p for lv in T.levels}
    c = TowerMap(T, C, proj, maps, {}, name=f"{T.name}->{C.name}")
    if not validate_map(c):
        raise TheoryViolation("the p-completion map is not a valid tower map", location=T.name)
    comp = compose(c, s)
    ok = bool(validate_map(comp)) and is_equivalence(comp)
    if not ok:
        raise TheoryViolation("Sylow map followed by p-completion is not an equivalence", location=T.name)
    return PCompletion(p, C, c, s, ok)


@dataclass
class AmpleReport:
    ample: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ample


def sylow_prime(m: TowerMap) -> int | None:
    for p in primes_of(m.target):
        if sylow_map_failure(m, p) is None:
            return p
    return None


def check_ample(maps: list[TowerMap], T: PostnikovTower) -> AmpleReport:
    """No two maps equivalent over T, and per prime dividing |pi_1| the images are all Sylow subgroups."""
    tagged = []
    for i, m in enumerate(maps):
        p = sylow_prime(m)
        if p is None or m.target is not T and m.target.base != T.base:
            raise PreconditionError(f"map {i} is not a Sylow map into the tower", location=m.name)
        tagged.append((p, m))
    for i in range(len(tagged)):
        for j in range(i + 1, len(tagged)):
            (p, a), (q, b) = tagged[i], tagged[j]
            if p == q and a.image_subgroup() == b.image_subgroup():
                conjugating_equivalence(a, b, T.base.identity)
                return AmpleReport(False, f"maps {i} and {j} are equivalent over the tower")
    for p in primes_of(T):
        if T.base.order % p:
            continue
        want = {S.elements for S in sylow_subgroups(T.base, p)}
        have = {m.image_subgroup().elements for q, m in tagged if q == p}
        if want != have:
            return AmpleReport(False, f"the {p}-Sylow images do not exhaust the Sylow {p}-subgroups")
    return AmpleReport(True, "ample")


@dataclass
class Trichotomy:
    nilpotent: bool
    decomposes: bool
    normal: bool

    @property
    def consistent(self) -> bool:
        return self.nilpotent == self.decomposes == self.normal


def trichotomy(T: PostnikovTower) -> Trichotomy:
    """Evaluate nilpotency, splitting as a product of Sylow towers, and normality of every Sylow map.

    Each condition is computed by its own route, so agreement is a real check.
    """
    nil = bool(is_nilpotent_tower(T))
    dec = sylow_product_map(T)[2] is not None
    normal = True
    for p in primes_of(T):
        for P in sylow_subgroups(T.base, p):
            rep = normality_obstruction(sylow_tower(T, p, P), p)
            if not rep.pi1_normal or not all(rep.trivial_action.values()):
                normal = False
    return Trichotomy(nil, dec, normal)
