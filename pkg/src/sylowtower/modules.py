"""Finite abelian groups in invariant-factor form and G-modules over them.

An element of ``Z/d1 + ... + Z/dk`` is an integer vector reduced
coordinatewise. A homomorphism ``A -> B`` is an integer matrix whose entry
``(i, j)`` is the image of the j-th generator of A in the i-th coordinate
of B; it is well defined when ``d_j(A) * m[i, j] = 0 mod d_i(B)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Mapping, Sequence

import numpy as np

from .config import limits
from .errors import CapacityError, UserInputError
from .groups import FiniteGroup, Subgroup
from .intlinalg import smith_normal_form
from .numtheory import factorize, p_part


def _ro(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        f = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        for d in f:
            if d < 2:
                raise UserInputError(f"invariant factors must be >= 2, got {list(f)}")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise UserInputError(f"invariant factors must form a divisibility chain, got {list(f)}")

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @cached_property
    def moduli(self) -> np.ndarray:
        return _ro(self.invariant_factors)

    def reduce(self, v) -> np.ndarray:
        return np.mod(np.asarray(v, dtype=np.int64), self.moduli)

    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    def elements(self) -> np.ndarray:
        """All elements in mixed-radix order, shape (order, rank)."""
        if self.order > limits().max_module_order:
            raise CapacityError(f"abelian group of order {self.order} is too large to enumerate")
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*[np.arange(d) for d in self.invariant_factors], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def index_of(self, v) -> np.ndarray:
        """Mixed-radix index of (an array of) elements."""
        v = self.reduce(v)
        idx = np.zeros(v.shape[:-1], dtype=np.int64)
        for k, d in enumerate(self.invariant_factors):
            idx = idx * d + v[..., k]
        return idx

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    @classmethod
    def from_cyclic_orders(cls, orders: Sequence[int]) -> tuple["FiniteAbelianGroup", np.ndarray, np.ndarray]:
        """Normalise Z/m1 + ... + Z/mk to invariant-factor form.

        Returns (group, to_inv, from_inv): matrices mapping the diagonal
        coordinates into the normal form and back.
        """
        orders = [int(m) for m in orders]
        k = len(orders)
        if k == 0:
            return cls(()), np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64)
        D = [[orders[i] if i == j else 0 for j in range(k)] for i in range(k)]
        U, Uinv, S, _ = smith_normal_form(D)
        keep = [i for i in range(k) if abs(S[i][i]) > 1]
        factors = tuple(abs(S[i][i]) for i in keep)
        to_inv = np.array([U[i] for i in keep], dtype=np.int64).reshape(len(keep), k)
        from_inv = np.array([[Uinv[r][i] for i in keep] for r in range(k)], dtype=np.int64).reshape(k, len(keep))
        to_inv = np.mod(to_inv, np.array(factors, dtype=np.int64)[:, None]) if keep else to_inv
        from_inv = np.mod(from_inv, np.array(orders, dtype=np.int64)[:, None])
        return cls(factors), to_inv, from_inv


def structure_of(A: FiniteAbelianGroup, elements: np.ndarray) -> FiniteAbelianGroup:
    """Invariant factors of the subgroup formed by ``elements`` (rows of A).

    Uses |S[p^j]| = p^(l_j): the number of cyclic p-primary factors of
    order at least p^j is l_j - l_(j-1).
    """
    n = len(elements)
    primary: list[int] = []
    for p, a in factorize(n).items() if n > 1 else []:
        logs = [0]
        j = 1
        while logs[-1] < a:
            killed = int((np.mod(elements * p ** j, A.moduli) == 0).all(axis=1).sum())
            e = 0
            while p ** (e + 1) <= killed:
                e += 1
            logs.append(e)
            j += 1
        ge = [logs[j] - logs[j - 1] for j in range(1, len(logs))] + [0]
        for j in range(len(ge) - 1):
            primary += [p ** (j + 1)] * (ge[j] - ge[j + 1])
    return _primary_to_invariant(primary)


def _primary_to_invariant(primary: list[int]) -> FiniteAbelianGroup:
    by_prime: dict[int, list[int]] = {}
    for q in primary:
        p = next(iter(factorize(q)))
        by_prime.setdefault(p, []).append(q)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * width
    for qs in by_prime.values():
        qs = sorted(qs)
        for i, q in enumerate(qs):
            factors[width - len(qs) + i] *= q
    return FiniteAbelianGroup(tuple(f for f in factors if f > 1))


def is_hom(matrix, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> bool:
    m = np.asarray(matrix, dtype=np.int64).reshape(B.rank, A.rank)
    if A.rank == 0 or B.rank == 0:
        return True
    return bool((np.mod(m * A.moduli[None, :], B.moduli[:, None]) == 0).all())


def apply_hom(matrix, vecs, B: FiniteAbelianGroup) -> np.ndarray:
    """Apply a homomorphism to vectors stored in the last axis."""
    m = np.asarray(matrix, dtype=np.int64)
    v = np.asarray(vecs, dtype=np.int64)
    if B.rank == 0:
        return np.zeros(v.shape[:-1] + (0,), dtype=np.int64)
    if v.shape[-1] == 0:
        return np.zeros(v.shape[:-1] + (B.rank,), dtype=np.int64)
    return np.mod(v @ m.T, B.moduli)


def hom_kernel_elements(matrix, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> np.ndarray:
    E = A.elements()
    img = apply_hom(matrix, E, B)
    return E[(img == 0).all(axis=1)]


def hom_image_elements(matrix, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> np.ndarray:
    img = apply_hom(matrix, A.elements(), B)
    return np.unique(img, axis=0) if len(img) else img


def is_iso(matrix, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> bool:
    if A.order != B.order or not is_hom(matrix, A, B):
        return False
    return len(hom_kernel_elements(matrix, A, B)) == 1


def invert_iso(matrix, A: FiniteAbelianGroup, B: FiniteAbelianGroup) -> np.ndarray:
    """Matrix of the inverse of an isomorphism A -> B."""
    E = A.elements()
    img = B.index_of(apply_hom(matrix, E, B))
    lookup = {int(i): k for k, i in enumerate(img)}
    if len(lookup) != A.order or A.order != B.order:
        raise UserInputError("matrix is not an isomorphism")
    cols = []
    for j in range(B.rank):
        e = np.zeros(B.rank, dtype=np.int64)
        e[j] = 1
        cols.append(E[lookup[int(B.index_of(e))]])
    return np.array(cols, dtype=np.int64).T.reshape(A.rank, B.rank)


class GModule:
    """A finite abelian group with a left action of a finite group.

    ``action[g]`` is the matrix of g acting on coordinate vectors.
    """

    def __init__(self, group: FiniteGroup, abelian: FiniteAbelianGroup, action=None, check: bool = True):
        r = abelian.rank
        self.group = group
        self.abelian = abelian
        if action is None:
            action = np.broadcast_to(np.eye(r, dtype=np.int64), (group.order, r, r))
        act = np.array(action, dtype=np.int64).reshape(group.order, r, r)
        if r:
            act = np.mod(act, abelian.moduli[None, :, None])
        act.setflags(write=False)
        self.action = act
        if check:
            self._validate()

    def _validate(self) -> None:
        G, A, act = self.group, self.abelian, self.action
        r = A.rank
        if r == 0:
            return
        mods = A.moduli
        for g in range(G.order):
            if not is_hom(act[g], A, A):
                raise UserInputError(f"action of element {g} is not well defined on {A}")
        if not (np.mod(act[G.identity] - np.eye(r, dtype=np.int64), mods[:, None]) == 0).all():
            raise UserInputError("identity does not act as the identity")
        prod_ = np.mod(np.einsum("aij,bjk->abik", act, act), mods[None, None, :, None])
        target = act[G.mul]
        bad = np.argwhere((np.mod(prod_ - target, mods[None, None, :, None]) != 0).any(axis=(2, 3)))
        if len(bad):
            g, h = (int(x) for x in bad[0])
            raise UserInputError(f"action is not a homomorphism: action({g}*{h}) != action({g})action({h})")

    @classmethod
    def from_generators(cls, group: FiniteGroup, factors: Sequence[int],
                        images: Mapping[int, Sequence[Sequence[int]]]) -> "GModule":
        """Complete an action from matrices for generating elements, then validate."""
        A = FiniteAbelianGroup(tuple(factors))
        r = A.rank
        act = np.zeros((group.order, r, r), dtype=np.int64)
        known = np.zeros(group.order, dtype=bool)
        act[group.identity] = np.eye(r, dtype=np.int64)
        known[group.identity] = True
        gens = {int(g): np.array(m, dtype=np.int64).reshape(r, r) for g, m in images.items()}
        frontier = [group.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s, ms in gens.items():
                    y = int(group.mul[x, s])
                    val = np.mod(act[x] @ ms, A.moduli[:, None]) if r else act[x]
                    if not known[y]:
                        act[y] = val
                        known[y] = True
                        nxt.append(y)
            frontier = nxt
        if not known.all():
            raise UserInputError("action matrices are given for elements that do not generate the group")
        return cls(group, A, act)

    @classmethod
    def trivial(cls, group: FiniteGroup, factors: Sequence[int]) -> "GModule":
        return cls(group, FiniteAbelianGroup(tuple(factors)), check=False)

    @classmethod
    def zero(cls, group: FiniteGroup) -> "GModule":
        return cls(group, FiniteAbelianGroup(()), check=False)

    @property
    def order(self) -> int:
        return self.abelian.order

    @property
    def rank(self) -> int:
        return self.abelian.rank

    def act(self, g: int, v) -> np.ndarray:
        return apply_hom(self.action[g], v, self.abelian)

    def is_trivial_action(self) -> bool:
        r = self.rank
        if r == 0:
            return True
        diff = self.action - np.eye(r, dtype=np.int64)[None]
        return bool((np.mod(diff, self.abelian.moduli[None, :, None]) == 0).all())

    def __eq__(self, other) -> bool:
        return (isinstance(other, GModule) and self.group == other.group
                and self.abelian == other.abelian and np.array_equal(self.action, other.action))

    def __hash__(self) -> int:
        return hash((self.group, self.abelian, self.action.tobytes()))

    def __repr__(self) -> str:
        return f"GModule({self.abelian} over {self.group.name})"


def pullback_module(M: GModule, hom_table, source: FiniteGroup) -> GModule:
    """The module M viewed over ``source`` through a homomorphism source -> M.group."""
    t = np.asarray(hom_table, dtype=np.int64)
    return GModule(source, M.abelian, M.action[t], check=False)


def restrict_module(M: GModule, H: Subgroup) -> GModule:
    """Restriction to a subgroup, as a module over the subgroup's own group."""
    if H.parent != M.group:
        raise UserInputError("subgroup does not belong to the module's group")
    Hg, emb = H.as_group()
    return pullback_module(M, emb, Hg)


def module_map_failure(M: GModule, N: GModule, phi1, phi) -> tuple[int, np.ndarray] | None:
    """First (h, generator of M) violating phi(h.m) = phi1(h).phi(m), or None."""
    phi = np.asarray(phi, dtype=np.int64).reshape(N.rank, M.rank)
    t = np.asarray(phi1, dtype=np.int64)
    if not is_hom(phi, M.abelian, N.abelian):
        return (-1, np.zeros(M.rank, dtype=np.int64))
    if M.rank == 0 or N.rank == 0:
        return None
    for h in range(M.group.order):
        lhs = np.mod(phi @ M.action[h], N.abelian.moduli[:, None])
        rhs = np.mod(N.action[t[h]] @ phi, N.abelian.moduli[:, None])
        bad = np.nonzero((lhs != rhs).any(axis=0))[0]
        if len(bad):
            e = np.zeros(M.rank, dtype=np.int64)
            e[bad[0]] = 1
            return (h, e)
    return None


def module_map_check(M: GModule, N: GModule, phi1, phi) -> bool:
    """Whether phi: M -> N is phi1-equivariant (M over H, N over G, phi1: H -> G)."""
    return module_map_failure(M, N, phi1, phi) is None


@dataclass(frozen=True)
class DirectSum:
    module: GModule
    inclusions: tuple[np.ndarray, ...]
    projections: tuple[np.ndarray, ...]


def direct_sum(*modules: GModule) -> DirectSum:
    """External direct sum over a common group, normalised to invariant factors."""
    G = modules[0].group
    orders = [d for M in modules for d in M.abelian.invariant_factors]
    A, to_inv, from_inv = FiniteAbelianGroup.from_cyclic_orders(orders)
    k = len(orders)
    block = np.zeros((G.order, k, k), dtype=np.int64)
    offs = np.cumsum([0] + [M.rank for M in modules])
    for M, o in zip(modules, offs):
        block[:, o:o + M.rank, o:o + M.rank] = M.action
    act = np.einsum("ij,gjk,kl->gil", to_inv, block, from_inv) if A.rank else np.zeros((G.order, 0, 0))
    S = GModule(G, A, act, check=False)
    incs, projs = [], []
    for M, o in zip(modules, offs):
        e = np.zeros((k, M.rank), dtype=np.int64)
        e[o:o + M.rank, :] = np.eye(M.rank, dtype=np.int64)
        incs.append(_ro(np.mod(to_inv @ e, A.moduli[:, None]) if A.rank else np.zeros((0, M.rank))))
        projs.append(_ro(np.mod(from_inv[o:o + M.rank, :], M.abelian.moduli[:, None])
                         if M.rank else np.zeros((0, A.rank))))
    return DirectSum(S, tuple(incs), tuple(projs))


@dataclass(frozen=True)
class PrimaryDecomposition:
    """M = M_p + M^(p) with explicit inclusion and projection matrices."""

    prime: int
    module: GModule
    p_part: GModule
    coprime_part: GModule
    incl_p: np.ndarray
    proj_p: np.ndarray
    incl_coprime: np.ndarray
    proj_coprime: np.ndarray


def _cyclic_split(d: int, p: int) -> tuple[int, int, int, int]:
    """For Z/d = Z/p^a + Z/m: (p^a, m, incl multiplier into Z/d for each part)."""
    pa = p_part(d, p)
    m = d // pa
    e_p = (m * pow(m, -1, pa)) % d if pa > 1 else 0
    e_c = (pa * pow(pa, -1, m)) % d if m > 1 else 0
    return pa, m, e_p, e_c


def primary_decompose(M: GModule, p: int) -> PrimaryDecomposition:
    """Split M into its p-primary and prime-to-p submodules via CRT idempotents.

    Projection to either part is coordinatewise reduction; inclusion is
    multiplication by the matching idempotent.
    """
    factors = M.abelian.invariant_factors
    r = len(factors)
    splits = [_cyclic_split(d, p) for d in factors]
    p_idx = [i for i, s in enumerate(splits) if s[0] > 1]
    c_idx = [i for i, s in enumerate(splits) if s[1] > 1]
    Ap = FiniteAbelianGroup(tuple(splits[i][0] for i in p_idx))
    Ac = FiniteAbelianGroup(tuple(splits[i][1] for i in c_idx))
    incl_p = np.zeros((r, len(p_idx)), dtype=np.int64)
    proj_p = np.zeros((len(p_idx), r), dtype=np.int64)
    for col, i in enumerate(p_idx):
        incl_p[i, col] = splits[i][2]
        proj_p[col, i] = 1
    incl_c = np.zeros((r, len(c_idx)), dtype=np.int64)
    proj_c = np.zeros((len(c_idx), r), dtype=np.int64)
    for col, i in enumerate(c_idx):
        incl_c[i, col] = splits[i][3]
        proj_c[col, i] = 1
    act = M.action
    act_p = np.einsum("ij,gjk,kl->gil", proj_p, act, incl_p)
    act_c = np.einsum("ij,gjk,kl->gil", proj_c, act, incl_c)
    Mp = GModule(M.group, Ap, act_p, check=False)
    Mc = GModule(M.group, Ac, act_c, check=False)
    return PrimaryDecomposition(p, M, Mp, Mc, _ro(incl_p), _ro(proj_p), _ro(incl_c), _ro(proj_c))


@dataclass(frozen=True)
class ActionNilpotencyCertificate:
    """Chain M_0 = A > M_1 > ... where M_{i+1} is generated by g.a - a, a in M_i."""

    nilpotent: bool
    chain: tuple[FiniteAbelianGroup, ...]
    chain_elements: tuple[np.ndarray, ...]

    def __bool__(self) -> bool:
        return self.nilpotent


def subgroup_generated(A: FiniteAbelianGroup, gens: np.ndarray) -> np.ndarray:
    """Elements of the subgroup of A generated by the rows of ``gens``, sorted by index."""
    seen = {0: A.zero()}
    frontier = [A.zero()]
    gens = [g for g in np.asarray(gens).reshape(-1, A.rank) if (g != 0).any()]
    uniq = {int(A.index_of(g)): g for g in gens}
    gens = list(uniq.values())
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = A.reduce(x + g)
                k = int(A.index_of(y))
                if k not in seen:
                    seen[k] = y
                    nxt.append(y)
        frontier = nxt
    keys = sorted(seen)
    return np.array([seen[k] for k in keys], dtype=np.int64).reshape(len(keys), A.rank)


def is_nilpotent_action(M: GModule) -> ActionNilpotencyCertificate:
    A = M.abelian
    current = A.elements()
    chain = [A]
    elems = [current]
    while len(current) > 1:
        diffs = np.concatenate([M.act(g, current) - current for g in M.group.generators]) \
            if M.group.generators else np.zeros((0, A.rank), dtype=np.int64)
        nxt = subgroup_generated(A, np.mod(diffs, A.moduli) if A.rank else diffs)
        if len(nxt) == len(current):
            return ActionNilpotencyCertificate(False, tuple(chain), tuple(elems))
        current = nxt
        chain.append(structure_of(A, current))
        elems.append(current)
    return ActionNilpotencyCertificate(True, tuple(chain), tuple(elems))


def hom_components(f, A: GModule, B: GModule, p: int) -> tuple[np.ndarray, np.ndarray]:
    """The p-primary and prime-to-p components of a module map f: A -> B."""
    da, db = primary_decompose(A, p), primary_decompose(B, p)
    f = np.asarray(f, dtype=np.int64)
    fp = np.mod(db.proj_p @ f @ da.incl_p, db.p_part.abelian.moduli[:, None]) \
        if db.p_part.rank and da.p_part.rank else np.zeros((db.p_part.rank, da.p_part.rank), dtype=np.int64)
    fc = np.mod(db.proj_coprime @ f @ da.incl_coprime, db.coprime_part.abelian.moduli[:, None]) \
        if db.coprime_part.rank and da.coprime_part.rank else \
        np.zeros((db.coprime_part.rank, da.coprime_part.rank), dtype=np.int64)
    return fp, fc


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g


def all_vectors(A: FiniteAbelianGroup):
    return itertools.product(*[range(d) for d in A.invariant_factors])
