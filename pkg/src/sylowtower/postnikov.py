"""Finite Postnikov towers whose k-invariants are group cohomology classes of pi_1.

A stage at level n carries pi_n as a module over the base group and a
k-cocycle of degree n + 1 on the base.  Absent levels are zero modules,
which makes truncation and products total operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cohomology import Cochain, cohomologous_witness, coboundary, first_cocycle_failure, pullback, pushforward
from .errors import TheoryViolation, UserInputError
from .groups import (FiniteGroup, compose_tables, direct_product, first_homomorphism_failure, hom_image,
                     invert_table, is_homomorphism, trivial_group)
from .modules import GModule, direct_sum, invert_iso, is_iso, module_map_failure, pullback_module
from .numtheory import is_p_power


@dataclass(frozen=True, eq=False)
class Stage:
    level: int
    module: GModule
    k: Cochain

    @property
    def k_is_zero(self) -> bool:
        return self.k.is_zero()


class PostnikovTower:
    """Base group plus stages with strictly increasing levels >= 2."""

    def __init__(self, base: FiniteGroup, stages=(), name: str | None = None, check: bool = True):
        self.base = base
        self.stages: tuple[Stage, ...] = tuple(s for s in stages if s.module.order > 1)
        self.name = name or "tower"
        if check:
            self._validate()

    def _validate(self) -> None:
        last = 1
        for i, st in enumerate(self.stages):
            loc = f"{self.name}/stages/{i}"
            if st.level <= last:
                raise UserInputError(f"stage levels must be >= 2 and strictly increasing, got {st.level}",
                                     location=loc)
            last = st.level
            if st.module.group != self.base:
                raise UserInputError("stage module is not a module over the base group", location=loc)
            if st.k.module != st.module or st.k.degree != st.level + 1:
                raise UserInputError(f"k-invariant at level {st.level} must be a degree-{st.level + 1} cochain "
                                     "with values in the stage module", location=loc + "/k")
            if not st.k.is_normalized:
                raise UserInputError("k-invariant is not normalized (nonzero on a tuple containing the identity)",
                                     location=loc + "/k", hint="subtract its value on degenerate tuples")
            bad = first_cocycle_failure(st.k)
            if bad is not None:
                raise UserInputError(f"k-invariant is not a cocycle: dk{bad} != 0", location=loc + "/k",
                                     hint="supply a cocycle, e.g. \"zero\"")

    # reading off homotopy groups
    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(s.level for s in self.stages)

    @property
    def top(self) -> int:
        return self.stages[-1].level if self.stages else 1

    def stage(self, level: int) -> Stage | None:
        for s in self.stages:
            if s.level == level:
                return s
        return None

    def module_at(self, level: int) -> GModule:
        s = self.stage(level)
        return s.module if s is not None else GModule.zero(self.base)

    def k_at(self, level: int) -> Cochain:
        s = self.stage(level)
        return s.k if s is not None else Cochain.zero(GModule.zero(self.base), level + 1)

    def homotopy_orders(self) -> dict[int, int]:
        out = {1: self.base.order}
        out.update({s.level: s.module.order for s in self.stages})
        return out

    def all_k_zero(self) -> bool:
        return all(s.k_is_zero for s in self.stages)

    def __repr__(self) -> str:
        parts = ", ".join(f"pi_{s.level}={s.module.abelian}" for s in self.stages)
        return f"PostnikovTower({self.name}: pi_1={self.base.name}" + (f", {parts})" if parts else ")")

    def summary(self) -> dict:
        return {
            "name": self.name,
            "pi_1": {"group": self.base.name, "order": self.base.order},
            "stages": [{"level": s.level, "module": list(s.module.abelian.invariant_factors),
                        "trivial_action": s.module.is_trivial_action(), "k_zero": s.k_is_zero}
                       for s in self.stages],
        }


def make_BG(G: FiniteGroup, name: str | None = None) -> PostnikovTower:
    return PostnikovTower(G, (), name=name or f"B({G.name})")


def point() -> PostnikovTower:
    return make_BG(trivial_group(), name="point")


def make_KAG(G: FiniteGroup, M: GModule, n: int, name: str | None = None) -> PostnikovTower:
    """The split tower with one homotopy group M at level n and zero k-invariant."""
    if n < 2:
        raise UserInputError(f"stage level must be at least 2, got {n}")
    if M.group != G:
        raise UserInputError("module is not a module over the given group")
    return PostnikovTower(G, (Stage(n, M, Cochain.zero(M, n + 1)),), name=name or f"K({M.abelian},{n})//{G.name}")


def truncate(T: PostnikovTower, n: int) -> PostnikovTower:
    return PostnikovTower(T.base, tuple(s for s in T.stages if s.level <= n), name=T.name, check=False)


@dataclass
class ProductData:
    """A product tower with its projection tables and per-level module inclusions/projections."""

    tower: PostnikovTower
    projections: list[np.ndarray]
    inclusions: dict[int, list[np.ndarray]]
    module_projections: dict[int, list[np.ndarray]]


def product_many(towers, name: str | None = None) -> ProductData:
    """Product of several towers; the base is the mixed-radix direct product of the bases."""
    towers = list(towers)
    if not towers:
        return ProductData(point(), [], {}, {})
    bases = [T.base for T in towers]
    G = direct_product(*bases)
    sizes = [B.order for B in bases]
    idx = np.arange(G.order)
    projections = []
    for i in range(len(bases)):
        stride = int(np.prod(sizes[i + 1:], dtype=np.int64))
        projections.append(((idx // stride) % sizes[i]).astype(np.int64))
    stages, incs, projs = [], {}, {}
    for level in sorted({lv for T in towers for lv in T.levels}):
        mods, ks = [], []
        for T, pr in zip(towers, projections):
            M = pullback_module(T.module_at(level), pr, G)
            mods.append(M)
            ks.append(pullback(T.k_at(level), pr, M))
        S = direct_sum(*mods)
        k = Cochain.zero(S.module, level + 1)
        for kk, inc in zip(ks, S.inclusions):
            k = k + pushforward(kk, inc, S.module)
        stages.append(Stage(level, S.module, k))
        incs[level] = list(S.inclusions)
        projs[level] = list(S.projections)
    T = PostnikovTower(G, stages, name=name or "x".join(T.name for T in towers), check=False)
    return ProductData(T, projections, incs, projs)


def product(T1: PostnikovTower, T2: PostnikovTower, name: str | None = None) -> PostnikovTower:
    """Product tower: product base, direct sum of pulled back modules, k inflated and summed."""
    return product_many([T1, T2], name=name).tower


def is_p_tower(T: PostnikovTower, p: int) -> bool:
    return all(is_p_power(o, p) for o in T.homotopy_orders().values())


def primes_of(T: PostnikovTower) -> list[int]:
    from .numtheory import prime_divisors

    ps: set[int] = set()
    for o in T.homotopy_orders().values():
        ps.update(prime_divisors(o))
    return sorted(ps)


# maps ------------------------------------------------------------------------

@dataclass(eq=False)
class TowerMap:
    """phi1 on pi_1, a phi1-equivariant matrix per level, optional witnesses.

    The witness at level n is a degree-n cochain b on the source base with
    values in the target module pulled back along phi1, satisfying
    db = (phi_n)_* k_source - phi1^* k_target.
    """

    source: PostnikovTower
    target: PostnikovTower
    phi1: np.ndarray
    stage_maps: dict[int, np.ndarray] = field(default_factory=dict)
    witnesses: dict[int, Cochain | None] = field(default_factory=dict)
    name: str = "map"

    def __post_init__(self):
        self.phi1 = np.asarray(self.phi1, dtype=np.int64)
        maps = {}
        for level in self.levels:
            Ms, Mt = self.source.module_at(level), self.target.module_at(level)
            m = self.stage_maps.get(level)
            m = np.zeros((Mt.rank, Ms.rank), dtype=np.int64) if m is None else np.asarray(m, dtype=np.int64)
            if m.shape != (Mt.rank, Ms.rank):
                raise UserInputError(f"stage map at level {level} has shape {m.shape}, expected {(Mt.rank, Ms.rank)}",
                                     location=f"{self.name}/stage_maps/{level}")
            maps[level] = np.mod(m, Mt.abelian.moduli[:, None]) if Mt.rank else m
        self.stage_maps = maps

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.source.levels) | set(self.target.levels)))

    def pulled_target(self, level: int) -> GModule:
        return pullback_module(self.target.module_at(level), self.phi1, self.source.base)

    def witness_target(self, level: int) -> Cochain:
        """(phi_n)_* k_source - phi1^* k_target, the cocycle a witness must bound."""
        N = self.pulled_target(level)
        a = pushforward(self.source.k_at(level), self.stage_maps[level], N)
        b = pullback(self.target.k_at(level), self.phi1, N)
        return a - b

    def image_subgroup(self):
        return hom_image(self.source.base, self.target.base, self.phi1)


@dataclass
class LevelDiagnostic:
    level: int
    ok: bool
    message: str
    failure: tuple | None = None

    def to_json(self) -> dict:
        d = {"level": self.level, "ok": self.ok, "message": self.message}
        if self.failure is not None:
            d["failure"] = [x.tolist() if isinstance(x, np.ndarray) else x for x in self.failure]
        return d


@dataclass
class MapValidation:
    ok: bool
    diagnostics: list[LevelDiagnostic]
    witnesses: dict[int, Cochain | None]

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"valid": self.ok, "levels": [d.to_json() for d in self.diagnostics]}


def validate_map(m: TowerMap, fill_witnesses: bool = True) -> MapValidation:
    """Check homomorphism, equivariance and witness conditions level by level.

    Missing witnesses are computed; with ``fill_witnesses`` they are stored on the map.
    """
    S, T = m.source, m.target
    diags: list[LevelDiagnostic] = []
    bad = None
    if m.phi1.shape != (S.base.order,) or not is_homomorphism(S.base, T.base, m.phi1):
        bad = first_homomorphism_failure(S.base, T.base, m.phi1) if m.phi1.shape == (S.base.order,) else None
        diags.append(LevelDiagnostic(1, False, "phi1 is not a group homomorphism", bad))
        return MapValidation(False, diags, {})
    diags.append(LevelDiagnostic(1, True, "phi1 is a homomorphism"))
    witnesses: dict[int, Cochain | None] = {}
    ok = True
    for level in m.levels:
        Ms = S.module_at(level)
        N = m.pulled_target(level)
        fail = module_map_failure(Ms, T.module_at(level), m.phi1, m.stage_maps[level])
        if fail is not None:
            g, vec = fail
            msg = ("stage map is not a homomorphism of abelian groups" if g < 0
                   else f"stage map is not equivariant: phi(g.m) != phi1(g).phi(m) for g={g}")
            diags.append(LevelDiagnostic(level, False, msg, (g, vec)))
            ok = False
            continue
        target = m.witness_target(level)
        b = m.witnesses.get(level)
        if b is not None:
            if b.module != N or b.degree != level:
                diags.append(LevelDiagnostic(level, False, "witness has the wrong degree or coefficients"))
                ok = False
                continue
            if coboundary(b) != target:
                diags.append(LevelDiagnostic(level, False, "witness does not satisfy db = phi_* k - phi1^* k"))
                ok = False
                continue
        else:
            b = cohomologous_witness(target, Cochain.zero(N, level + 1)) if not target.is_zero() \
                else Cochain.zero(N, level)
            if b is None:
                diags.append(LevelDiagnostic(level, False, "k-invariants are not compatible: "
                                             "phi_* k_source and phi1^* k_target are not cohomologous"))
                ok = False
                continue
        witnesses[level] = b
        diags.append(LevelDiagnostic(level, True, "equivariant, witness verified"))
    if ok and fill_witnesses:
        m.witnesses = dict(witnesses)
    return MapValidation(ok, diags, witnesses)


def require_valid(m: TowerMap, what: str = "map") -> TowerMap:
    v = validate_map(m)
    if not v:
        first = next(d for d in v.diagnostics if not d.ok)
        raise UserInputError(f"{what} is not a valid tower map: {first.message}",
                             location=f"{m.name}/level {first.level}")
    return m


def identity_map(T: PostnikovTower) -> TowerMap:
    maps = {s.level: np.eye(s.module.rank, dtype=np.int64) for s in T.stages}
    wit = {s.level: Cochain.zero(s.module, s.level) for s in T.stages}
    return TowerMap(T, T, np.arange(T.base.order), maps, wit, name=f"id({T.name})")


def compose(m2: TowerMap, m1: TowerMap) -> TowerMap:
    """m2 after m1; witnesses pasted as (phi2_n)_* b1 + phi1_1^* b2."""
    if m1.target is not m2.source and not _same_tower(m1.target, m2.source):
        raise UserInputError("maps are not composable")
    phi1 = compose_tables(m1.phi1, m2.phi1)
    maps, wit = {}, {}
    levels = sorted(set(m1.source.levels) | set(m2.target.levels) | set(m1.target.levels))
    for level in levels:
        a = m1.stage_maps.get(level)
        b = m2.stage_maps.get(level)
        Ms, Mt = m1.source.module_at(level), m2.target.module_at(level)
        if a is None or b is None:
            maps[level] = np.zeros((Mt.rank, Ms.rank), dtype=np.int64)
        else:
            maps[level] = b @ a
        b1, b2 = m1.witnesses.get(level), m2.witnesses.get(level)
        if level in set(m1.source.levels) | set(m2.target.levels):
            N = pullback_module(Mt, phi1, m1.source.base)
            # a witness valued in a zero module carries no data
            if b1 is None and m1.target.module_at(level).order == 1:
                b1 = Cochain.zero(m1.pulled_target(level), level)
            if Mt.order == 1:
                wit[level] = Cochain.zero(N, level)
            elif b1 is not None and b2 is not None:
                wit[level] = (pushforward(b1, m2.stage_maps[level], N)
                              + pullback(b2, m1.phi1, N))
            else:
                wit[level] = None
    return TowerMap(m1.source, m2.target, phi1, maps, wit, name=f"{m2.name}.{m1.name}")


def _same_tower(a: PostnikovTower, b: PostnikovTower) -> bool:
    if a.base != b.base or a.levels != b.levels:
        return False
    return all(s.module == t.module and s.k == t.k for s, t in zip(a.stages, b.stages))


def is_equivalence(m: TowerMap) -> bool:
    """Isomorphism on pi_1 and on every pi_n (a level on one side only must be zero on both)."""
    S, T = m.source, m.target
    if S.base.order != T.base.order or len(set(m.phi1.tolist())) != T.base.order:
        return False
    if not is_homomorphism(S.base, T.base, m.phi1):
        return False
    for level in m.levels:
        Ms, Mt = S.module_at(level), T.module_at(level)
        if Ms.order != Mt.order:
            return False
        if Ms.order > 1 and not is_iso(m.stage_maps[level], Ms.abelian, Mt.abelian):
            return False
    return True


def invert_equivalence(m: TowerMap) -> TowerMap:
    """Inverse of an equivalence; witnesses are recomputed."""
    if not is_equivalence(m):
        raise UserInputError("map is not an equivalence", location=m.name)
    S, T = m.source, m.target
    phi1 = invert_table(m.phi1)
    maps = {}
    for level in m.levels:
        Ms, Mt = S.module_at(level), T.module_at(level)
        maps[level] = invert_iso(m.stage_maps[level], Ms.abelian, Mt.abelian) if Ms.order > 1 \
            else np.zeros((Ms.rank, Mt.rank), dtype=np.int64)
    inv = TowerMap(T, S, phi1, maps, {}, name=f"{m.name}^-1")
    v = validate_map(inv)
    if not v:
        raise TheoryViolation("the inverse of a valid equivalence failed validation", location=m.name)
    return inv
