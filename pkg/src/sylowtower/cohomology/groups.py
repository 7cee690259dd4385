"""H^n(G; M) with explicit cocycle bases, class coordinates and witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..config import limits
from ..errors import CapacityError, TheoryViolation, UserInputError
from ..groups import FiniteGroup, Subgroup
from ..modules import FiniteAbelianGroup, GModule, PrimaryDecomposition, primary_decompose, restrict_module
from ..numtheory import factorize
from .cochains import Cochain, coboundary, is_cocycle, pullback, pushforward
from .linalg import (LocalHomology, ReducedComplex, SparseMatrix, back_witness, backward_mid, forward,
                     homology, reduce_complex, solve_dense)
from .resolution import BarModel, model_for


def _assemble(terms, act: np.ndarray, r: int, row_scale: np.ndarray | None, mod: int):
    """Expand (row, col, g, coeff) terms into scalar entries (rows, cols, vals), summing duplicates."""
    R, C, Gs, V = terms
    if r == 0 or len(R) == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z
    ii, jj = np.meshgrid(np.arange(r), np.arange(r), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    rows = (R[:, None] * r + ii[None, :]).ravel()
    cols = (C[:, None] * r + jj[None, :]).ravel()
    blocks = act[Gs][:, ii, jj]  # (terms, r*r)
    vals = (V[:, None] * blocks)
    if row_scale is not None:
        vals = vals * row_scale[ii][None, :]
    vals = np.mod(vals.ravel(), mod)
    keep = vals != 0
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    if len(rows) == 0:
        return rows, cols, vals
    ncols = int(cols.max()) + 1
    key = rows * ncols + cols
    uniq, inv = np.unique(key, return_inverse=True)
    summed = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(summed, inv, vals)
    summed = np.mod(summed, mod)
    keep = summed != 0
    uniq, summed = uniq[keep], summed[keep]
    return uniq // ncols, uniq % ncols, summed


@dataclass
class _PrimePart:
    q: int
    E: int
    exps: np.ndarray  # e_i of the q-primary coordinates
    dec: PrimaryDecomposition
    model: object
    n: int

    @property
    def Mq(self) -> GModule:
        return self.dec.p_part

    @property
    def r(self) -> int:
        return self.Mq.rank

    @property
    def mod(self) -> int:
        return self.q ** self.E

    def _terms(self, deg: int):
        return self.model.coboundary_terms(deg)

    def matrix_A(self) -> tuple[SparseMatrix, int]:
        """delta_{n-1} into degree n, plus relation columns for coordinates of order below q^E."""
        n, r, mod = self.n, self.r, self.mod
        m = self.model.ncells(n) * r
        left = self.model.ncells(n - 1) * r if n > 0 else 0
        if n > 0:
            rows, cols, vals = _assemble(self._terms(n - 1), self.Mq.action, r, None, mod)
        else:
            rows = cols = vals = np.zeros(0, dtype=np.int64)
        rel = [i for i in range(m) if self.exps[i % r] < self.E]
        rel_rows = np.array(rel, dtype=np.int64)
        rel_cols = left + np.arange(len(rel), dtype=np.int64)
        rel_vals = np.array([self.q ** int(self.exps[i % r]) for i in rel], dtype=np.int64)
        A = SparseMatrix.from_arrays(np.concatenate([rows, rel_rows]), np.concatenate([cols, rel_cols]),
                                     np.concatenate([vals, rel_vals]), mod, m, left + len(rel))
        return A, left

    def matrix_B(self) -> SparseMatrix:
        n, r, mod = self.n, self.r, self.mod
        m = self.model.ncells(n) * r
        right = self.model.ncells(n + 1) * r
        scale = np.array([self.q ** (self.E - int(e)) for e in self.exps], dtype=np.int64)
        rows, cols, vals = _assemble(self._terms(n), self.Mq.action, r, scale, mod)
        return SparseMatrix.from_arrays(rows, cols, vals, mod, right, m)

    def to_dict(self, psi: np.ndarray) -> dict[int, int]:
        flat = np.asarray(psi, dtype=np.int64).reshape(-1)
        return {i: int(v) for i, v in enumerate(flat) if v}

    def from_dict(self, d: dict[int, int], count: int) -> np.ndarray:
        out = np.zeros(count, dtype=np.int64)
        for i, v in d.items():
            if i < count:
                out[i] = v
        return out


def _prime_parts(M: GModule, n: int, model) -> list[_PrimePart]:
    parts = []
    for q in sorted(factorize(M.order)) if M.order > 1 else []:
        dec = primary_decompose(M, q)
        exps = np.array([factorize(d)[q] for d in dec.p_part.abelian.invariant_factors], dtype=np.int64)
        parts.append(_PrimePart(q, int(exps.max()), exps, dec, model, n))
    return parts


def _check_degree(n: int) -> None:
    if n < 0:
        raise UserInputError(f"degree must be non-negative, got {n}")
    if n > limits().max_degree:
        raise CapacityError(f"degree {n} exceeds the configured maximum {limits().max_degree}",
                            hint="raise SYLOWTOWER_MAX_DEGREE")


def _check_capacity(G: FiniteGroup, M: GModule, n: int, model) -> None:
    _check_degree(n)
    if isinstance(model, BarModel):
        cells = model.ncells(n + 1) * max(M.rank, 1)
        if cells > limits().max_cells:
            raise CapacityError(f"the bar complex in degree {n + 1} has {cells} cells",
                                hint="raise SYLOWTOWER_MAX_CELLS or use a smaller group or degree")


class CohomologyGroup:
    """H^n(G; M) as a finite abelian group with generator cocycles.

    Computed on a reduced model of the normalized bar complex (see
    ``resolution``); cocycles and witnesses are always returned as bar cochains.
    """

    def __init__(self, M: GModule, n: int, method: str = "auto"):
        G = M.group
        self.group = G
        self.module = M
        self.degree = n
        self.model = BarModel(G) if method == "bar" else model_for(G, method)
        _check_capacity(G, M, n, self.model)
        self._parts = _prime_parts(M, n, self.model)
        self._local: list[tuple[ReducedComplex, LocalHomology]] = []
        orders: list[int] = []
        for part in self._parts:
            A, _ = part.matrix_A()
            B = part.matrix_B()
            red = reduce_complex(A, B, part.q, part.E, A.rows.__len__())
            h = homology(red)
            self._local.append((red, h))
            orders += [part.q ** c for c in h.exps]
        self._orders = orders
        self.abelian, self._to_inv, self._from_inv = FiniteAbelianGroup.from_cyclic_orders(orders)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.abelian.invariant_factors

    @property
    def order(self) -> int:
        return self.abelian.order

    def is_trivial(self) -> bool:
        return self.abelian.order == 1

    def __repr__(self) -> str:
        return f"H^{self.degree}({self.group.name}; {self.module.abelian}) = {self.abelian}"

    def _local_coords(self, c: Cochain) -> list[int]:
        out: list[int] = []
        for part, (red, h) in zip(self._parts, self._local):
            cq = pushforward(c, part.dec.proj_p, part.Mq)
            psi = self.model.restrict(cq)
            vec = forward(red, part.to_dict(psi))
            out += h.coords(vec)
        return out

    def coordinates(self, c: Cochain) -> np.ndarray:
        """Coordinates of the class of a cocycle in the invariant-factor basis."""
        if c.module != self.module or c.degree != self.degree:
            raise UserInputError("cochain does not belong to this cohomology group")
        if not coboundary(c).is_zero():
            raise UserInputError("cochain is not a cocycle")
        local = np.array(self._local_coords(c), dtype=np.int64)
        if self.abelian.rank == 0:
            return np.zeros(0, dtype=np.int64)
        return np.mod(self._to_inv @ local, self.abelian.moduli)

    @cached_property
    def generators(self) -> tuple[Cochain, ...]:
        """Bar cocycles representing the invariant-factor generators."""
        gens = []
        for j in range(self.abelian.rank):
            gens.append(self._cocycle_from_local(self._from_inv[:, j]))
        return tuple(gens)

    def _cocycle_from_local(self, weights) -> Cochain:
        total = Cochain.zero(self.module, self.degree)
        k = 0
        for part, (red, h) in zip(self._parts, self._local):
            vec = np.zeros(len(red.mid), dtype=np.int64)
            for g in h.gens:
                vec = np.mod(vec + int(weights[k]) * g, red.mod)
                k += 1
            if not vec.any():
                continue
            full = backward_mid(red, vec)
            count = self.model.ncells(self.degree) * part.r
            psi = part.from_dict(full, count).reshape(-1, part.r)
            zq = self.model.extend(psi, part.Mq, self.degree)
            total = total + pushforward(zq, part.dec.incl_p, self.module)
        return total

    def element(self, coords) -> Cochain:
        """A cocycle representing the class with the given invariant-factor coordinates."""
        coords = self.abelian.reduce(np.asarray(coords, dtype=np.int64).reshape(self.abelian.rank))
        local = np.mod(self._from_inv @ coords, np.array(self._orders, dtype=np.int64)) \
            if self.abelian.rank else np.zeros(len(self._orders), dtype=np.int64)
        return self._cocycle_from_local(local)

    def class_of(self, c: Cochain) -> "CohomologyClass":
        return CohomologyClass(c, self, self.coordinates(c))

    def zero_class(self) -> "CohomologyClass":
        return CohomologyClass(Cochain.zero(self.module, self.degree), self, self.abelian.zero())

    def random_cocycle(self, rng: np.random.Generator) -> Cochain:
        """A cocycle with random class, plus a random coboundary when n >= 1."""
        coords = [int(rng.integers(0, d)) for d in self.invariant_factors]
        z = self.element(coords) if coords else Cochain.zero(self.module, self.degree)
        if self.degree >= 1:
            z = z + coboundary(Cochain.random(self.module, self.degree - 1, rng))
        return z


@dataclass(frozen=True, eq=False)
class CohomologyClass:
    representative: Cochain
    ambient: CohomologyGroup
    coords: np.ndarray

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CohomologyClass) and self.ambient is other.ambient
                and np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def to_json(self) -> dict:
        return {"coordinates": [int(x) for x in self.coords],
                "invariant_factors": list(self.ambient.invariant_factors)}


_CACHE: dict = {}


def cohomology_group(G: FiniteGroup, M: GModule, n: int, method: str = "auto") -> CohomologyGroup:
    """H^n(G; M) computed by Smith normal form on a reduction of the normalized bar complex.

    ``method`` is "auto" (Morse-reduced when G is solvable), "morse" or "bar".
    """
    if M.group != G:
        raise UserInputError("module is not a module over the given group")
    _check_degree(n)
    key = (M, n, method)
    got = _CACHE.get(key)
    if got is None:
        got = CohomologyGroup(M, n, method)
        if len(_CACHE) > 256:
            _CACHE.clear()
        _CACHE[key] = got
    return got


def restriction(cls: CohomologyClass, H: Subgroup) -> CohomologyClass:
    """Restrict a class to a subgroup, as a class over the subgroup's own group."""
    amb = cls.ambient
    if H.parent != amb.group:
        raise UserInputError("subgroup does not belong to the class's group")
    Hg, emb = H.as_group()
    MH = restrict_module(amb.module, H)
    c = pullback(cls.representative, emb, MH)
    return cohomology_group(Hg, MH, amb.degree).class_of(c)


def coset_data(H: Subgroup) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Right coset representatives T, the map x -> h(x) = x rho(x)^-1 in H (as H-indices)."""
    G = H.parent
    reps = H.right_coset_reps()
    rho = np.zeros(G.order, dtype=np.int64)
    for t in reps:
        for h in H.elements:
            rho[int(G.mul[h, t])] = t
    hx = G.mul[np.arange(G.order), G.inv[rho]]
    pos = {g: i for i, g in enumerate(H.elements)}
    hidx = np.array([pos[int(x)] for x in hx], dtype=np.int64)
    return reps, rho, hidx


def transfer_cochain(c: Cochain, H: Subgroup, MG: GModule) -> Cochain:
    """Cochain-level transfer from H to G.

    cor(c)(g1..gn) = sum_t t^-1 . c(y1, y1^-1 y2, ..., y_{n-1}^-1 y_n) with
    y_k = h(t g1 ... gk), summed over the right coset representatives t.
    """
    G = H.parent
    n = c.degree
    reps, _, hidx = coset_data(H)
    Hg, emb = H.as_group()
    N = G.order
    r = MG.rank
    if n == 0:
        total = np.zeros(r, dtype=np.int64)
        for t in reps:
            total += MG.action[G.inv[t]] @ c.values
        return Cochain(MG, 0, total)
    grid = np.indices((N,) * n).reshape(n, -1).T
    pref = np.empty_like(grid)
    pref[:, 0] = grid[:, 0]
    for k in range(1, n):
        pref[:, k] = G.mul[pref[:, k - 1], grid[:, k]]
    out = np.zeros((len(grid), r), dtype=np.int64)
    for t in reps:
        Y = hidx[G.mul[t, pref]]  # H-indices of y_k
        args = np.empty_like(Y)
        args[:, 0] = Y[:, 0]
        for k in range(1, n):
            args[:, k] = Hg.mul[Hg.inv[Y[:, k - 1]], Y[:, k]]
        vals = c.values[tuple(args.T)]
        if r:
            out += vals @ MG.action[G.inv[t]].T
    return Cochain(MG, n, out.reshape((N,) * n + (r,)))


def transfer(cls: CohomologyClass, H: Subgroup, MG: GModule) -> CohomologyClass:
    """Transfer of a class over H (a subgroup of MG's group) to G."""
    if H.parent != MG.group:
        raise UserInputError("subgroup does not belong to the target group")
    c = transfer_cochain(cls.representative, H, MG)
    return cohomology_group(MG.group, MG, cls.ambient.degree).class_of(c)


def cohomologous_witness(c1: Cochain, c2: Cochain, method: str = "auto") -> Cochain | None:
    """A cochain b with db = c1 - c2, or None if the cocycles are not cohomologous."""
    if c1.module != c2.module or c1.degree != c2.degree:
        raise UserInputError("cochains live in different groups or degrees")
    n = c1.degree
    if n == 0:
        raise UserInputError("degree-0 cocycles have no witness; compare them directly",
                             hint="cocycles of degree 0 are cohomologous exactly when equal")
    c = c1 - c2
    if not is_cocycle(c):
        raise UserInputError("cohomologous_witness needs cocycles")
    if c.is_zero():
        return Cochain.zero(c.module, n - 1)
    return solve_coboundary(c, method)


def solve_coboundary(c: Cochain, method: str = "auto") -> Cochain | None:
    """Some b with db = c for a cocycle c, or None."""
    M, n, G = c.module, c.degree, c.group
    model = BarModel(G) if method == "bar" else model_for(G, method)
    _check_capacity(G, M, n - 1, model)
    total = Cochain.zero(M, n - 1)
    for part in _prime_parts(M, n, model):
        cq = pushforward(c, part.dec.proj_p, part.Mq)
        if cq.is_zero():
            continue
        solver = _witness_solver(part)
        psi = model.restrict(cq)
        vec, seen = forward(solver, part.to_dict(psi), record=True)
        y = solve_dense(solver.A, vec, part.q, part.E)
        if y is None:
            return None
        beta = {cid: int(v) for cid, v in zip(solver.left, y) if v}
        full = back_witness(solver, beta, seen)
        left = model.ncells(n - 1) * part.r
        bpsi = part.from_dict(full, left).reshape(-1, part.r)
        bq = model.extend(bpsi, part.Mq, n - 1) + model.homotopy(cq)
        if coboundary(bq) != cq:
            raise TheoryViolation("a computed witness does not bound the cocycle")
        total = total + pushforward(bq, part.dec.incl_p, M)
    return total


_SOLVERS: dict = {}


def _witness_solver(part: _PrimePart) -> ReducedComplex:
    key = (part.Mq, part.n, part.model.name, part.model.group)
    got = _SOLVERS.get(key)
    if got is None:
        A, _ = part.matrix_A()
        got = reduce_complex(A, None, part.q, part.E, len(A.rows))
        if len(_SOLVERS) > 256:
            _SOLVERS.clear()
        _SOLVERS[key] = got
    return got
