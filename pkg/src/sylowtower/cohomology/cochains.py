"""Inhomogeneous bar cochains G^n -> M stored as dense tables."""

from __future__ import annotations

import numpy as np

from ..config import limits
from ..errors import CapacityError, UserInputError
from ..groups import FiniteGroup
from ..modules import GModule


def _check_size(G: FiniteGroup, n: int, r: int) -> None:
    cells = G.order ** n * max(r, 1)
    if n > limits().max_degree + 1:
        raise CapacityError(f"degree {n} exceeds the configured maximum degree {limits().max_degree}",
                            hint="raise SYLOWTOWER_MAX_DEGREE")
    if cells > limits().max_cells:
        raise CapacityError(f"a degree-{n} cochain table over a group of order {G.order} has {cells} entries",
                            hint="raise SYLOWTOWER_MAX_CELLS or use a smaller group or degree")


class Cochain:
    """A function G^n -> M; ``values[g1, ..., gn]`` is a coordinate vector of M."""

    __slots__ = ("group", "module", "degree", "values")

    def __init__(self, module: GModule, degree: int, values, reduce: bool = True):
        G = module.group
        r = module.rank
        vals = np.asarray(values, dtype=np.int64)
        shape = (G.order,) * degree + (r,)
        if vals.shape != shape:
            raise UserInputError(f"cochain table has shape {vals.shape}, expected {shape}")
        if reduce and r:
            vals = np.mod(vals, module.abelian.moduli)
        vals.setflags(write=False)
        self.group = G
        self.module = module
        self.degree = degree
        self.values = vals

    @classmethod
    def zero(cls, module: GModule, degree: int) -> "Cochain":
        _check_size(module.group, degree, module.rank)
        shape = (module.group.order,) * degree + (module.rank,)
        return cls(module, degree, np.zeros(shape, dtype=np.int64), reduce=False)

    @classmethod
    def random(cls, module: GModule, degree: int, rng: np.random.Generator) -> "Cochain":
        """A uniformly random normalized cochain."""
        _check_size(module.group, degree, module.rank)
        shape = (module.group.order,) * degree + (module.rank,)
        if module.rank == 0:
            return cls(module, degree, np.zeros(shape, dtype=np.int64), reduce=False)
        vals = rng.integers(0, np.iinfo(np.int64).max, size=shape) % module.abelian.moduli
        return cls(module, degree, normalize_table(vals, module.group.identity), reduce=False)

    @classmethod
    def constant(cls, module: GModule, value) -> "Cochain":
        return cls(module, 0, np.asarray(value, dtype=np.int64).reshape(module.rank))

    @property
    def is_normalized(self) -> bool:
        e = self.group.identity
        for ax in range(self.degree):
            if np.any(np.take(self.values, e, axis=ax)):
                return False
        return True

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __call__(self, *gs: int) -> np.ndarray:
        return self.values[tuple(gs)]

    def _same(self, other: "Cochain") -> None:
        if self.module != other.module or self.degree != other.degree:
            raise UserInputError("cochains live in different groups")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.module, self.degree, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.module, self.degree, self.values - other.values)

    def __neg__(self) -> "Cochain":
        return Cochain(self.module, self.degree, -self.values)

    def scale(self, k: int) -> "Cochain":
        return Cochain(self.module, self.degree, self.values * int(k))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and self.module == other.module
                and self.degree == other.degree and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.degree, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, {self.module})"

    def to_json(self):
        return self.values.tolist()


def normalize_table(vals: np.ndarray, identity: int) -> np.ndarray:
    vals = np.array(vals, dtype=np.int64)
    n = vals.ndim - 1
    for ax in range(n):
        idx = [slice(None)] * vals.ndim
        idx[ax] = identity
        vals[tuple(idx)] = 0
    return vals


def coboundary(c: Cochain) -> Cochain:
    """(dc)(g1..g_{n+1}) = g1.c(g2..) + sum (-1)^i c(..gi g_{i+1}..) + (-1)^{n+1} c(g1..gn)."""
    G, M, n = c.group, c.module, c.degree
    _check_size(G, n + 1, M.rank)
    v = c.values
    N = G.order
    out = np.einsum("aij,...j->a...i", M.action, v) if M.rank else np.zeros((N,) + v.shape, dtype=np.int64)
    if M.rank:
        out = out.reshape((N,) + v.shape)
    for i in range(1, n + 1):
        # c(g1, .., g_i g_{i+1}, ..): take along axis i-1 with the multiplication table
        out = out + (-1) ** i * np.take(v, G.mul, axis=i - 1)
    out = out + (-1) ** (n + 1) * v[..., None, :]
    return Cochain(M, n + 1, out)


def _coboundary_slice(c: Cochain, g1: int) -> np.ndarray:
    """The table of (dc)(g1, -, ..., -) for one fixed first argument."""
    G, M, n = c.group, c.module, c.degree
    v = c.values
    if n == 0:
        return np.mod(M.action[g1] @ v - v, M.abelian.moduli) if M.rank else v
    out = v @ M.action[g1].T - v[G.mul[g1]]
    head = v[g1]
    for i in range(2, n + 1):
        out = out + (-1) ** i * np.take(head, G.mul, axis=i - 2)
    out = out + (-1) ** (n + 1) * head[..., None, :]
    return np.mod(out, M.abelian.moduli) if M.rank else out


def first_cocycle_failure(c: Cochain) -> tuple[int, ...] | None:
    """First argument tuple where dc is nonzero, streamed one first argument at a time."""
    if c.module.rank == 0:
        return None
    for g1 in range(c.group.order):
        d = _coboundary_slice(c, g1)
        bad = np.argwhere(d.any(axis=-1)) if d.ndim > 1 else (np.zeros((1, 0), dtype=np.int64) if d.any() else [])
        if len(bad):
            return (g1,) + tuple(int(x) for x in bad[0])
    return None


def is_cocycle(c: Cochain) -> bool:
    return first_cocycle_failure(c) is None


def pushforward(c: Cochain, phi, target: GModule) -> Cochain:
    """Apply a module homomorphism (matrix target.rank x source.rank) to every value."""
    phi = np.asarray(phi, dtype=np.int64).reshape(target.rank, c.module.rank)
    if target.rank == 0:
        vals = np.zeros(c.values.shape[:-1] + (0,), dtype=np.int64)
    elif c.module.rank == 0:
        vals = np.zeros(c.values.shape[:-1] + (target.rank,), dtype=np.int64)
    else:
        vals = c.values @ phi.T
    return Cochain(target, c.degree, vals)


def pullback(c: Cochain, hom_table, source_module: GModule) -> Cochain:
    """Precompose with a group homomorphism source -> c.group.

    ``source_module`` must be c.module pulled back along the same homomorphism.
    """
    t = np.asarray(hom_table, dtype=np.int64)
    n = c.degree
    if n == 0:
        return Cochain(source_module, 0, c.values)
    _check_size(source_module.group, n, c.module.rank)
    idx = np.ix_(*([t] * n))
    return Cochain(source_module, n, c.values[idx])
