"""Homotopy fixed points for actions of p-towers on prime-to-p fibers, and the classical count."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, TheoryViolation, UserInputError
from .groups import FiniteGroup, hom_image, hom_kernel, quotient
from .intlinalg import smith_normal_form
from .modules import FiniteAbelianGroup, hom_kernel_elements, structure_of
from .numtheory import factorize, is_p_power
from .postnikov import TowerMap, compose, invert_equivalence, is_equivalence, is_p_tower, validate_map
from .sylow import sylow_tower


def cokernel(phi: np.ndarray, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> FiniteAbelianGroup:
    """B / phi(A) via a Smith form of [phi | diag(moduli of B)]."""
    if B.rank == 0:
        return FiniteAbelianGroup(())
    cols = [list(map(int, row)) for row in np.asarray(phi, dtype=np.int64).reshape(B.rank, A.rank)]
    rel = [row + [int(B.moduli[i]) if j == i else 0 for j in range(B.rank)] for i, row in enumerate(cols)]
    _, _, S, _ = smith_normal_form(rel)
    diag = [abs(S[i][i]) for i in range(min(len(S), len(S[0])))]
    orders = [d for d in diag if d > 1]
    return FiniteAbelianGroup.from_cyclic_orders(orders)[0] if orders else FiniteAbelianGroup(())


@dataclass
class LevelData:
    level: int
    kernel: FiniteAbelianGroup | None
    cokernel: FiniteAbelianGroup | None
    kernel_order: int
    cokernel_order: int

    def to_json(self) -> dict:
        return {"level": self.level, "kernel_order": self.kernel_order, "cokernel_order": self.cokernel_order}


@dataclass
class ActionFibration:
    """gamma: total -> base with kernels and cokernels of c_n = pi_n(gamma)."""

    gamma: TowerMap
    levels: list[LevelData]

    @property
    def total(self):
        return self.gamma.source

    @property
    def base(self):
        return self.gamma.target

    def fiber_orders(self) -> dict[int, int]:
        """|pi_n(fiber)| = |ker c_n| * |coker c_{n+1}| from the long exact sequence."""
        by = {d.level: d for d in self.levels}
        top = max(by) if by else 1
        out = {}
        for n in range(1, top + 1):
            k = by[n].kernel_order if n in by else 1
            c = by[n + 1].cokernel_order if n + 1 in by else 1
            out[n] = k * c
        out[0] = by[1].cokernel_order if 1 in by else 1
        return out

    def to_json(self) -> dict:
        return {"levels": [d.to_json() for d in self.levels],
                "fiber_orders": {str(k): v for k, v in sorted(self.fiber_orders().items())}}


def analyze_fibration(gamma: TowerMap) -> ActionFibration:
    v = validate_map(gamma)
    if not v:
        first = next(d for d in v.diagnostics if not d.ok)
        raise UserInputError(f"projection is not a valid tower map: {first.message}",
                             location=f"{gamma.name}/level {first.level}")
    S, T = gamma.source, gamma.target
    img = hom_image(S.base, T.base, gamma.phi1)
    if not img.is_normal():
        raise PreconditionError("the pi_1 image is not normal, so coker(c_1) is undefined",
                                location=f"{gamma.name}/level 1",
                                hint="use a projection whose pi_1 image is a normal subgroup")
    ker1 = hom_kernel(S.base, T.base, gamma.phi1)
    Q, _ = quotient(T.base, img)
    levels = [LevelData(1, None, None, ker1.order, Q.order)]
    for lv in gamma.levels:
        Ms, Mt = S.module_at(lv), T.module_at(lv)
        phi = gamma.stage_maps[lv]
        K = structure_of(Ms.abelian, hom_kernel_elements(phi, Ms.abelian, Mt.abelian)) if Ms.rank \
            else FiniteAbelianGroup(())
        C = cokernel(phi, Ms.abelian, Mt.abelian)
        levels.append(LevelData(lv, K, C, K.order, C.order))
    return ActionFibration(gamma, levels)


@dataclass
class Section:
    section: TowerMap
    sylow: TowerMap
    composite: TowerMap

    def to_json(self) -> dict:
        return {"sylow_subgroup": list(self.sylow.image_subgroup().elements),
                "section_pi1": self.section.phi1.tolist(),
                "gamma_after_section_is_equivalence": True}


def homotopy_fixed_point_section(gamma: TowerMap, p: int) -> Section:
    """A section s of gamma through the p-Sylow tower of the total space.

    Needs a p-tower base and kernels/cokernels of prime-to-p order at every level.
    """
    fib = analyze_fibration(gamma)
    base = gamma.target
    if not is_p_tower(base, p):
        lv, o = next((lv, o) for lv, o in sorted(base.homotopy_orders().items()) if not is_p_power(o, p))
        raise PreconditionError(f"base is not a {p}-tower: pi_{lv} has order {o}",
                                location=f"{gamma.name}/base/level {lv}",
                                hint=f"the acting tower must have {p}-power homotopy groups")
    for d in fib.levels:
        for what, o in (("kernel", d.kernel_order), ("cokernel", d.cokernel_order)):
            if o % p == 0:
                raise PreconditionError(
                    f"{what} of c_{d.level} has order {o}, divisible by {p}; the fiber is not prime-to-{p}",
                    location=f"{gamma.name}/level {d.level}",
                    hint=f"the fiber's homotopy groups must have order prime to {p} (factors {sorted(factorize(o))})")
    syl = sylow_tower(gamma.source, p)
    comp = compose(gamma, syl)
    if not validate_map(comp) or not is_equivalence(comp):
        raise PreconditionError("the Sylow tower of the total space does not map isomorphically to the base",
                                location=gamma.name)
    s = compose(syl, invert_equivalence(comp))
    s.witnesses = {}
    if not validate_map(s):
        raise TheoryViolation("the constructed section is not a valid tower map", location=gamma.name)
    back = compose(gamma, s)
    if not is_equivalence(back):
        raise TheoryViolation("gamma after the section is not an equivalence", location=gamma.name)
    return Section(s, syl, back)


@dataclass
class FixedPoints:
    points: list[int]
    size: int
    prime: int

    @property
    def congruent(self) -> bool:
        return (self.size - len(self.points)) % self.prime == 0

    def to_json(self) -> dict:
        return {"fixed_points": self.points, "set_size": self.size, "prime": self.prime,
                "congruence_holds": self.congruent}


def validate_action(G: FiniteGroup, action) -> np.ndarray:
    """Check a permutation action table act[g, x] (left action) and return it as an array."""
    act = np.asarray(action, dtype=np.int64)
    if act.ndim != 2 or act.shape[0] != G.order:
        raise UserInputError(f"action table must have one row per group element, got shape {act.shape}")
    n = act.shape[1]
    if n and (act.min() < 0 or act.max() >= n):
        raise UserInputError("action table entries must be points of the set")
    for g in range(G.order):
        if len(set(act[g].tolist())) != n:
            raise UserInputError(f"element {g} does not act by a permutation", location=f"action/{g}")
    if not np.array_equal(act[G.identity], np.arange(n)):
        raise UserInputError("identity does not act trivially", location=f"action/{G.identity}")
    bad = np.argwhere((act[G.mul] != act[:, act]).any(axis=2)) if n else []
    if len(bad):
        g, h = (int(x) for x in bad[0])
        raise UserInputError(f"not an action: ({g}*{h}).x != {g}.({h}.x)", location=f"action/{g}")
    return act


def action_from_generators(G: FiniteGroup, images: dict[int, list[int]], n: int) -> np.ndarray:
    """Complete permutation images of generating elements to a full action table."""
    act = np.zeros((G.order, n), dtype=np.int64)
    known = np.zeros(G.order, dtype=bool)
    act[G.identity] = np.arange(n)
    known[G.identity] = True
    gens = {int(g): np.asarray(perm, dtype=np.int64).reshape(n) for g, perm in images.items()}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, perm in gens.items():
                y = int(G.mul[s, x])
                if not known[y]:
                    act[y] = perm[act[x]]
                    known[y] = True
                    nxt.append(y)
        frontier = nxt
    if not known.all():
        raise UserInputError("permutation images are given for elements that do not generate the group")
    return validate_action(G, act)


def finite_gset_fixed_points(G: FiniteGroup, action, p: int, require_coprime: bool = True) -> FixedPoints:
    """Fixed points of a p-group acting on a finite set, with the count |X| = |X^G| mod p.

    With ``require_coprime`` the set size must be prime to p, which forces a fixed point.
    """
    if not is_p_power(G.order, p):
        raise PreconditionError(f"acting group of order {G.order} is not a {p}-group", location="group")
    act = validate_action(G, action)
    n = act.shape[1]
    if require_coprime and n % p == 0:
        raise PreconditionError(f"set size {n} is divisible by {p}", location="set",
                                hint="the fixed-point guarantee needs a set of size prime to p")
    fixed = [int(x) for x in range(n) if (act[:, x] == x).all()]
    out = FixedPoints(fixed, n, p)
    if require_coprime and not fixed:  # pragma: no cover - excluded by the orbit count
        raise TheoryViolation("a p-group acting on a prime-to-p set has no fixed point")
    return out
