"""Finite groups stored as multiplication tables.

Elements are integers ``0 .. order-1``. All builtin constructors put the
identity at index 0, but tables loaded from files may place it anywhere.
Subgroups are sorted tuples of element indices, so every output of this
module is canonical and can be compared or serialised directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .config import limits
from .errors import CapacityError, UserInputError
from .numtheory import is_p_power, p_part, prime_divisors


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``mul[a, b]`` is the index of the product ``a*b``. Instances are
    immutable; the table arrays are read-only.
    """

    def __init__(
        self,
        table,
        labels: Sequence[str] | None = None,
        name: str | None = None,
        generators: Sequence[int] | None = None,
        check: bool = True,
    ):
        mul = _frozen(table)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise UserInputError("multiplication table must be a non-empty square array")
        n = mul.shape[0]
        if mul.min() < 0 or mul.max() >= n:
            raise UserInputError("multiplication table entries must be element indices")
        self.mul = mul
        ident = [e for e in range(n) if np.array_equal(mul[e], np.arange(n))
                 and np.array_equal(mul[:, e], np.arange(n))]
        if not ident:
            raise UserInputError("multiplication table has no two-sided identity")
        self.identity = ident[0]
        rows, cols = np.nonzero(mul == self.identity)
        inv = np.full(n, -1, dtype=np.int64)
        inv[rows] = cols
        if check:
            self._validate(inv)
        self.inv = _frozen(inv)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(self.labels) != n:
            raise UserInputError("labels must name every element")
        self.name = name or f"group[{n}]"
        self.generators = tuple(int(g) for g in generators) if generators is not None else None
        if self.generators is None:
            self.generators = tuple(greedy_generators(self))
        self._key = (n, mul.tobytes())

    def _validate(self, inv: np.ndarray) -> None:
        n = self.order
        mul = self.mul
        for row in mul:
            if len(np.unique(row)) != n:
                raise UserInputError("multiplication table is not a Latin square")
        if (inv < 0).any() or (mul[np.arange(n), inv] != self.identity).any() \
                or (mul[inv, np.arange(n)] != self.identity).any():
            raise UserInputError("multiplication table has elements without two-sided inverses")
        if n <= 128:
            left = mul[mul, :]                       # (a*b)*c indexed [a, b, c]
            right = mul[np.arange(n)[:, None, None], mul[None, :, :]]
            bad = np.argwhere(left != right)
        else:
            bad = []
            for a in range(n):
                diff = np.argwhere(mul[mul[a]] != mul[a][mul])
                if len(diff):
                    bad = [(a, *diff[0])]
                    break
        if len(bad):
            a, b, c = (int(x) for x in bad[0])
            raise UserInputError(f"multiplication is not associative at ({a}, {b}, {c})")

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def product(self, elems: Iterable[int]) -> int:
        out = self.identity
        for g in elems:
            out = int(self.mul[out, g])
        return out

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def commutator(self, x: int, y: int) -> int:
        """x^-1 y^-1 x y."""
        return int(self.mul[self.mul[self.inv[x], self.inv[y]], self.mul[x, y]])

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        out = []
        for g in range(self.order):
            k, x = 1, g
            while x != self.identity:
                x = int(self.mul[x, g])
                k += 1
            out.append(k)
        return tuple(out)

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    @cached_property
    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (self.identity,))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup of ``parent`` as a sorted tuple of element indices."""

    parent: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(int(e) for e in set(self.elements))))

    @classmethod
    def checked(cls, parent: FiniteGroup, elements: Iterable[int]) -> "Subgroup":
        H = cls(parent, tuple(elements))
        s = set(H.elements)
        if parent.identity not in s:
            raise UserInputError("subgroup does not contain the identity")
        for a in H.elements:
            if int(parent.inv[a]) not in s:
                raise UserInputError(f"subgroup is not closed under inverses at element {a}")
            for b in H.elements:
                if int(parent.mul[a, b]) not in s:
                    raise UserInputError(f"subgroup is not closed under products at ({a}, {b})")
        if parent.order % H.order:
            raise UserInputError("subgroup order does not divide the group order")
        return H

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subgroup) and self.parent == other.parent
                and self.elements == other.elements)

    def __hash__(self) -> int:
        return hash(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, elements={list(self.elements)})"

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def sort_key(self) -> tuple:
        return (self.order, self.elements)

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def conjugate(self, g: int) -> "Subgroup":
        """g H g^-1."""
        return Subgroup(self.parent, tuple(self.parent.conj(g, h) for h in self.elements))

    def is_normal(self) -> bool:
        return all(self.conjugate(g) == self for g in self.parent.generators)

    def right_coset_reps(self) -> list[int]:
        """Smallest element of each right coset Hx, in increasing order."""
        G = self.parent
        seen = np.zeros(G.order, dtype=bool)
        reps = []
        for x in range(G.order):
            if not seen[x]:
                reps.append(x)
                seen[[int(G.mul[h, x]) for h in self.elements]] = True
        return reps

    @cached_property
    def _as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        G = self.parent
        elems = self.elements
        pos = {g: i for i, g in enumerate(elems)}
        table = [[pos[int(G.mul[a, b])] for b in elems] for a in elems]
        labels = [G.labels[g] for g in elems]
        H = FiniteGroup(table, labels=labels, name=f"subgroup[{self.order}] of {G.name}", check=False)
        return H, _frozen(elems)

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone group plus its embedding table into the parent."""
        return self._as_group


def greedy_generators(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    current = {G.identity}
    for g in range(G.order):
        if g not in current:
            gens.append(g)
            current = set(_closure(G, gens))
            if len(current) == G.order:
                break
    return gens


def _closure(G: FiniteGroup, gens: Iterable[int]) -> list[int]:
    gens = [int(g) for g in gens]
    seen = {G.identity}
    frontier = [G.identity]
    mul = G.mul
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(mul[x, s])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def generate(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """The subgroup generated by ``gens``."""
    return Subgroup(G, tuple(_closure(G, gens)))


def _check_order(G: FiniteGroup, bound: int, what: str) -> None:
    if G.order > bound:
        raise CapacityError(
            f"{what} is limited to groups of order <= {bound}, got {G.order}",
            location=f"group {G.name}",
        )


def enumerate_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup exactly once, sorted by size then element tuple."""
    _check_order(G, limits().max_subgroup_order, "subgroup enumeration")
    cyclic = {}
    for g in range(G.order):
        c = frozenset(_closure(G, [g]))
        cyclic.setdefault(c, g)
    found: dict[frozenset, list[int]] = {frozenset([G.identity]): []}
    layer = list(found)
    while layer:
        new_layer = []
        for H in layer:
            gens = found[H]
            for C, g in cyclic.items():
                if C <= H:
                    continue
                K = frozenset(_closure(G, gens + [g]))
                if K not in found:
                    found[K] = gens + [g]
                    new_layer.append(K)
        layer = new_layer
    subs = [Subgroup(G, tuple(H)) for H in found]
    subs.sort(key=Subgroup.sort_key)
    return subs


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(G, tuple(g for g in range(G.order) if H.conjugate(g) == H))


def sylow_subgroups(G: FiniteGroup, p: int) -> list[Subgroup]:
    """All Sylow p-subgroups (maximal p-subgroups), canonically sorted.

    One Sylow subgroup is grown from the trivial group by repeatedly
    adjoining an element of the normaliser whose p-th power already lies in
    the current subgroup; the rest are its conjugates.
    """
    _check_order(G, limits().max_group_order, "Sylow subgroup search")
    if p < 2 or prime_divisors(p) != [p]:
        raise UserInputError(f"{p} is not a prime")
    target = p_part(G.order, p)
    H = G.trivial_subgroup
    while H.order < target:
        N = normalizer(G, H)
        for g in N.elements:
            if g in H:
                continue
            gp = g
            for _ in range(p - 1):
                gp = int(G.mul[gp, g])
            if gp in H:
                H = generate(G, list(H.elements) + [g])
                break
        else:  # pragma: no cover - would contradict Cauchy's theorem
            raise AssertionError("no element of order p in N(H)/H")
    conjugates = {H.conjugate(g) for g in range(G.order)}
    return sorted(conjugates, key=Subgroup.sort_key)


@dataclass(frozen=True)
class NilpotencyCertificate:
    nilpotent: bool
    series: tuple[Subgroup, ...]

    def __bool__(self) -> bool:
        return self.nilpotent


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    series = [G.whole]
    while True:
        cur = series[-1]
        comms = {G.commutator(x, g) for x in cur.elements for g in G.generators}
        # [cur, G] is normal; close under conjugation to get all commutators
        nxt = normal_closure(G, comms)
        if nxt == cur:
            return series
        series.append(nxt)
        if nxt.order == 1:
            return series


def normal_closure(G: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    gens = {G.conj(g, x) for x in elems for g in range(G.order)}
    return generate(G, sorted(gens))


def is_nilpotent_group(G: FiniteGroup) -> NilpotencyCertificate:
    """Lower central series test; the series itself is the certificate."""
    series = lower_central_series(G)
    return NilpotencyCertificate(series[-1].order == 1, tuple(series))


def are_conjugate(G: FiniteGroup, H1: Subgroup, H2: Subgroup) -> int | None:
    """Smallest g with g H1 g^-1 = H2, or None."""
    if H1.order != H2.order:
        return None
    for g in range(G.order):
        if H1.conjugate(g) == H2:
            return g
    return None


# homomorphisms ---------------------------------------------------------------

def is_homomorphism(G: FiniteGroup, H: FiniteGroup, table) -> bool:
    t = np.asarray(table, dtype=np.int64)
    if t.shape != (G.order,) or t.min(initial=0) < 0 or t.max(initial=0) >= H.order:
        return False
    return bool((t[G.mul] == H.mul[t[:, None], t[None, :]]).all())


def first_homomorphism_failure(G: FiniteGroup, H: FiniteGroup, table) -> tuple[int, int] | None:
    t = np.asarray(table, dtype=np.int64)
    bad = np.argwhere(t[G.mul] != H.mul[t[:, None], t[None, :]])
    return (int(bad[0][0]), int(bad[0][1])) if len(bad) else None


def hom_image(G: FiniteGroup, H: FiniteGroup, table) -> Subgroup:
    return Subgroup(H, tuple(int(x) for x in set(np.asarray(table).tolist())))


def hom_kernel(G: FiniteGroup, H: FiniteGroup, table) -> Subgroup:
    t = np.asarray(table)
    return Subgroup(G, tuple(int(g) for g in np.nonzero(t == H.identity)[0]))


def extend_to_homomorphism(G: FiniteGroup, H: FiniteGroup, images: dict[int, int]) -> np.ndarray | None:
    """Extend generator images to a homomorphism table, or None if inconsistent."""
    table = np.full(G.order, -1, dtype=np.int64)
    table[G.identity] = H.identity
    frontier = [G.identity]
    gens = list(images)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = int(G.mul[x, s])
                val = int(H.mul[table[x], images[s]])
                if table[y] < 0:
                    table[y] = val
                    nxt.append(y)
                elif table[y] != val:
                    return None
        frontier = nxt
    if (table < 0).any() or not is_homomorphism(G, H, table):
        return None
    return table


def find_isomorphism(G1: FiniteGroup, G2: FiniteGroup) -> np.ndarray | None:
    """An isomorphism table G1 -> G2, or None.

    Backtracks over images of a greedy generating sequence of G1, trying
    candidate images in increasing index order.
    """
    bound = limits().max_isomorphism_order
    _check_order(G1, bound, "isomorphism search")
    _check_order(G2, bound, "isomorphism search")
    if G1.order != G2.order:
        return None
    if sorted(G1.element_orders) != sorted(G2.element_orders):
        return None
    gens = greedy_generators(G1)
    o1, o2 = G1.element_orders, G2.element_orders

    def search(i: int, images: dict[int, int]):
        if i == len(gens):
            t = extend_to_homomorphism(G1, G2, images)
            if t is not None and len(set(t.tolist())) == G2.order:
                return t
            return None
        g = gens[i]
        for cand in range(G2.order):
            if o2[cand] != o1[g]:
                continue
            images[g] = cand
            # prune: partial generating set must map consistently
            if extend_to_homomorphism_partial(G1, G2, images):
                res = search(i + 1, images)
                if res is not None:
                    return res
            del images[g]
        return None

    return search(0, {})


def extend_to_homomorphism_partial(G1: FiniteGroup, G2: FiniteGroup, images: dict[int, int]) -> bool:
    """Whether the images define a homomorphism on the subgroup they generate."""
    sub = _closure(G1, images)
    table = {G1.identity: G2.identity}
    frontier = [G1.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, im in images.items():
                y = int(G1.mul[x, s])
                val = int(G2.mul[table[x], im])
                if y not in table:
                    table[y] = val
                    nxt.append(y)
                elif table[y] != val:
                    return False
        frontier = nxt
    return len(set(table.values())) == len(sub)


def compose_tables(first, second) -> np.ndarray:
    """second o first."""
    return _frozen(np.asarray(second)[np.asarray(first)])


def invert_table(table) -> np.ndarray:
    t = np.asarray(table)
    out = np.empty_like(t)
    out[t] = np.arange(len(t))
    return _frozen(out)


# constructors ----------------------------------------------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], name="trivial", generators=[])


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UserInputError(f"cyclic group order must be positive, got {n}")
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, name=f"cyclic:{n}",
                       generators=[1] if n > 1 else [], check=False)


def _perm_str(p: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


def from_permutations(gens: Sequence[Sequence[int]], name: str | None = None) -> FiniteGroup:
    """Group generated by permutations of {0..n-1}; elements sorted lexicographically.

    Composition is (p*q)(i) = p(q(i)).
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    if not gens:
        return trivial_group()
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = tuple(x[s[i]] for i in range(n))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    elems = sorted(seen)
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[tuple(a[b[i]] for i in range(n))] for b in elems] for a in elems]
    return FiniteGroup(table, labels=[_perm_str(e) for e in elems], name=name,
                       generators=[pos[g] for g in gens], check=False)


def symmetric(n: int) -> FiniteGroup:
    if n < 1:
        raise UserInputError(f"symmetric group degree must be positive, got {n}")
    if n == 1:
        return FiniteGroup([[0]], labels=["()"], name="sym:1", generators=[])
    elems = list(itertools.permutations(range(n)))
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[tuple(a[b[i]] for i in range(n))] for b in elems] for a in elems]
    swap = tuple([1, 0] + list(range(2, n)))
    cycle = tuple(list(range(1, n)) + [0])
    gens = [pos[swap]] + ([pos[cycle]] if n > 2 else [])
    return FiniteGroup(table, labels=[_perm_str(e) for e in elems], name=f"sym:{n}",
                       generators=gens, check=False)


def alternating(n: int) -> FiniteGroup:
    def even(p):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        return inv % 2 == 0
    elems = [p for p in itertools.permutations(range(n)) if even(p)]
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[tuple(a[b[i]] for i in range(n))] for b in elems] for a in elems]
    return FiniteGroup(table, labels=[_perm_str(e) for e in elems], name=f"alt:{n}")


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order n (n even): elements s^f r^i stored at f*(n/2)+i."""
    if n < 2 or n % 2:
        raise UserInputError(f"dihedral group order must be even and >= 2, got {n}")
    m = n // 2
    table = np.empty((n, n), dtype=np.int64)
    for f in range(2):
        for i in range(m):
            for g in range(2):
                for j in range(m):
                    ii = ((-i if g else i) + j) % m
                    table[f * m + i, g * m + j] = ((f + g) % 2) * m + ii
    gens = ([1] if m > 1 else []) + [m]
    return FiniteGroup(table, name=f"dihedral:{n}", generators=gens, check=False)


def dicyclic(n: int) -> FiniteGroup:
    """Dicyclic group of order n (n divisible by 4): x^i y^f at f*(n/2)+i."""
    if n < 4 or n % 4:
        raise UserInputError(f"dicyclic group order must be a multiple of 4, got {n}")
    m2 = n // 2
    m = m2 // 2
    table = np.empty((n, n), dtype=np.int64)
    for f in range(2):
        for i in range(m2):
            for g in range(2):
                for j in range(m2):
                    if f == 0:
                        k, h = (i + j) % m2, g
                    elif g == 0:
                        k, h = (i - j) % m2, 1
                    else:
                        k, h = (i - j + m) % m2, 0
                    table[f * m2 + i, g * m2 + j] = h * m2 + k
    return FiniteGroup(table, name=f"dicyclic:{n}", generators=[1, m2], check=False)


def quaternion(n: int) -> FiniteGroup:
    if n < 8 or not is_p_power(n, 2):
        raise UserInputError(f"generalised quaternion order must be a power of 2 >= 8, got {n}")
    G = dicyclic(n)
    G.name = f"quaternion:{n}"
    return G


def direct_product(*factors: FiniteGroup) -> FiniteGroup:
    """Direct product; element (a, b, ...) is stored at its mixed-radix index."""
    if not factors:
        return trivial_group()
    G = factors[0]
    for H in factors[1:]:
        G = _product2(G, H)
    if len(factors) > 1:
        G.name = "product:[" + ",".join(f.name for f in factors) + "]"
    return G


def _product2(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    n, m = G.order, H.order
    table = (G.mul[:, None, :, None] * m + H.mul[None, :, None, :]).reshape(n * m, n * m)
    gens = [g * m + H.identity for g in G.generators] + [G.identity * m + h for h in H.generators]
    labels = [f"({a},{b})" for a in G.labels for b in H.labels]
    return FiniteGroup(table, labels=labels, name=f"{G.name}x{H.name}", generators=gens, check=False)


def product_projection(G: FiniteGroup, H: FiniteGroup, which: int) -> np.ndarray:
    """Projection table from the product G x H (as built by direct_product) to a factor."""
    idx = np.arange(G.order * H.order)
    return _frozen(idx // H.order if which == 0 else idx % H.order)


def product_inclusion(G: FiniteGroup, H: FiniteGroup, which: int) -> np.ndarray:
    if which == 0:
        return _frozen(np.arange(G.order) * H.order + H.identity)
    return _frozen(G.identity * H.order + np.arange(H.order))


def semidirect_cyclic(N: FiniteGroup, m: int, automorphism: Sequence[int], name: str | None = None) -> FiniteGroup:
    """N x| Z/m where the generator of Z/m acts on N by ``automorphism``.

    Element (x, h) is stored at h*|N| + x; requires automorphism^m = id.
    """
    alpha = np.asarray(automorphism, dtype=np.int64)
    if not is_homomorphism(N, N, alpha) or len(set(alpha.tolist())) != N.order:
        raise UserInputError("semidirect_cyclic needs an automorphism of N")
    powers = [np.arange(N.order)]
    for _ in range(1, m):
        powers.append(alpha[powers[-1]])
    if not np.array_equal(alpha[powers[-1]], np.arange(N.order)):
        raise UserInputError("automorphism order does not divide m")
    n = N.order
    table = np.empty((n * m, n * m), dtype=np.int64)
    for h1 in range(m):
        twisted = powers[h1]
        for h2 in range(m):
            block = N.mul[:, twisted]
            table[h1 * n:(h1 + 1) * n, h2 * n:(h2 + 1) * n] = ((h1 + h2) % m) * n + block
    gens = list(N.generators) + ([n + N.identity] if m > 1 else [])
    return FiniteGroup(table, name=name or f"{N.name}:{m}", generators=gens)


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """G/N with cosets ordered by their smallest element, plus the projection table."""
    if not N.is_normal():
        raise UserInputError("quotient by a non-normal subgroup")
    reps = N.right_coset_reps()
    proj = np.empty(G.order, dtype=np.int64)
    for i, r in enumerate(reps):
        for h in N.elements:
            proj[int(G.mul[h, r])] = i
    table = [[int(proj[G.mul[a, b]]) for b in reps] for a in reps]
    Q = FiniteGroup(table, labels=[G.labels[r] + "N" for r in reps], name=f"{G.name}/N{N.order}",
                    generators=sorted({int(proj[g]) for g in G.generators} - {int(proj[G.identity])}),
                    check=False)
    return Q, _frozen(proj)
