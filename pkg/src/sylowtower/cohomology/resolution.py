"""Cochain models of the normalized bar complex.

``BarModel`` uses every bar cell. ``MorseModel`` runs Gaussian elimination
on the bar resolution along an acyclic matching read off from a
polycyclic normal form (the matching that produces the Anick resolution),
so only the critical cells survive. Both expose the same interface:

* ``cells(n)``: critical n-cells (tuples of non-identity elements);
* ``coboundary_terms(n)``: the differential of the reduced cochain complex
  as arrays ``(row, col, g, coeff)`` meaning
  ``(d psi)[row] += coeff * g . psi[col]``;
* ``restrict(z)``: a bar cochain as a reduced cochain (composition with
  the inclusion of the reduced resolution);
* ``extend(psi)``: a reduced cochain as a bar cochain (composition with
  the projection onto the reduced resolution);
* ``homotopy(c)``: ``c`` composed with the chain homotopy, so that for a
  bar cocycle ``c`` with ``restrict(c) = d beta`` one has
  ``c = d(extend(beta) + homotopy(c))``.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import TheoryViolation
from ..groups import FiniteGroup, generate
from ..modules import GModule
from .cochains import Cochain, _check_size


class PolycyclicSeries:
    """A series G = G_1 > G_2 > ... > G_{r+1} = 1 with each step normal of prime index.

    ``letters[i]`` lies in G_i minus G_{i+1}; every element has a unique
    normal form a_1^e_1 ... a_r^e_r with 0 <= e_i < primes[i].
    """

    def __init__(self, G: FiniteGroup, letters: list[int], primes: list[int]):
        self.group = G
        self.letters = tuple(letters)
        self.primes = tuple(primes)
        N = G.order
        words: list[tuple[int, ...] | None] = [None] * N
        for exps in itertools.product(*[range(p) for p in primes]):
            g = G.identity
            word: list[int] = []
            for i, e in enumerate(exps):
                for _ in range(e):
                    g = int(G.mul[g, letters[i]])
                    word.append(i)
            if words[g] is not None:
                raise TheoryViolation("polycyclic normal forms are not unique")
            words[g] = tuple(word)
        self.words: tuple[tuple[int, ...], ...] = tuple(words)  # type: ignore[arg-type]
        # prefix element of each word
        pref: list[list[int]] = []
        for g in range(N):
            acc = [G.identity]
            for letter in self.words[g]:
                acc.append(int(G.mul[acc[-1], letters[letter]]))
            pref.append(acc)
        self._prefix = pref

    def prefix(self, g: int, length: int) -> int:
        return self._prefix[g][length]

    def suffix(self, g: int, length: int) -> int:
        """The element spelled by the word of g with the first ``length`` letters removed."""
        G = self.group
        return int(G.mul[G.inv[self._prefix[g][length]], g])

    @classmethod
    def find(cls, G: FiniteGroup) -> "PolycyclicSeries | None":
        """A polycyclic series built by refining the derived series, or None if G is not solvable."""
        layers = [tuple(range(G.order))]
        current = generate(G, range(G.order))
        while current.order > 1:
            comms = {G.commutator(x, y) for x in current.elements for y in current.elements}
            nxt = generate(G, sorted(comms))
            if nxt.order == current.order:
                return None
            layers.append(nxt.elements)
            current = nxt
        letters_rev: list[int] = []
        primes_rev: list[int] = []
        # refine each abelian layer K/L from the bottom up
        for top, bottom in reversed(list(zip(layers, layers[1:] + [(G.identity,)]))):
            H = set(bottom)
            hgens = sorted(set(bottom) - {G.identity})
            top_set = set(top)
            while len(H) < len(top_set):
                x = min(top_set - H)
                o, y = 1, x
                while y not in H:
                    y = int(G.mul[y, x])
                    o += 1
                p = min(q for q in range(2, o + 1) if o % q == 0)
                z = x
                for _ in range(o // p - 1):
                    z = int(G.mul[z, x])
                hgens.append(z)
                H = set(generate(G, hgens).elements)
                letters_rev.append(z)
                primes_rev.append(p)
        return cls(G, letters_rev[::-1], primes_rev[::-1])


def faces(G: FiniteGroup, cell: tuple[int, ...]) -> list[tuple[int, int, tuple[int, ...]]]:
    """Boundary of a bar cell as (group coefficient, sign, face); degenerate faces omitted."""
    m = len(cell)
    e = G.identity
    out = [(cell[0], 1, cell[1:])]
    for i in range(1, m):
        prod = int(G.mul[cell[i - 1], cell[i]])
        if prod != e:
            out.append((e, -1 if i % 2 else 1, cell[:i - 1] + (prod,) + cell[i + 1:]))
    out.append((e, -1 if m % 2 else 1, cell[:-1]))
    return out


class BarModel:
    """The normalized bar complex itself; every cell is critical."""

    name = "bar"

    def __init__(self, G: FiniteGroup):
        self.group = G
        self.nonid = np.array([g for g in range(G.order) if g != G.identity], dtype=np.int64)
        pos = -np.ones(G.order, dtype=np.int64)
        pos[self.nonid] = np.arange(len(self.nonid))
        self.pos = pos

    def ncells(self, n: int) -> int:
        return len(self.nonid) ** n

    def cells(self, n: int) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in t) for t in itertools.product(self.nonid.tolist(), repeat=n)]

    def _grid(self, n: int) -> np.ndarray:
        k = len(self.nonid)
        if n == 0:
            return np.zeros((1, 0), dtype=np.int64)
        idx = np.indices((k,) * n).reshape(n, -1).T
        return self.nonid[idx]

    def _index(self, tup: np.ndarray) -> np.ndarray:
        k = len(self.nonid)
        p = self.pos[tup]
        ok = (p >= 0).all(axis=1)
        idx = np.zeros(len(tup), dtype=np.int64)
        for j in range(tup.shape[1]):
            idx = idx * k + p[:, j]
        return np.where(ok, idx, -1)

    def coboundary_terms(self, n: int):
        G = self.group
        _check_size(G, n + 1, 1)
        el = self._grid(n + 1)
        rows = np.arange(len(el), dtype=np.int64)
        R, C, Gs, V = [], [], [], []
        e = G.identity

        def add(cols, g, coeff):
            ok = cols >= 0
            R.append(rows[ok])
            C.append(cols[ok])
            Gs.append(np.broadcast_to(g, rows.shape)[ok] if np.ndim(g) else np.full(ok.sum(), g))
            V.append(np.full(ok.sum(), coeff, dtype=np.int64))

        add(self._index(el[:, 1:]), el[:, 0], 1)
        for i in range(1, n + 1):
            merged = np.concatenate([el[:, :i - 1], G.mul[el[:, i - 1], el[:, i]][:, None], el[:, i + 1:]], axis=1)
            add(self._index(merged), e, (-1) ** i)
        add(self._index(el[:, :n]), e, (-1) ** (n + 1))
        return (np.concatenate(R), np.concatenate(C), np.concatenate(Gs).astype(np.int64),
                np.concatenate(V))

    def restrict(self, z: Cochain) -> np.ndarray:
        n = z.degree
        if n == 0:
            return z.values.reshape(1, -1)
        idx = np.ix_(*([self.nonid] * n))
        return z.values[idx].reshape(-1, z.module.rank)

    def extend(self, psi: np.ndarray, M: GModule, n: int) -> Cochain:
        out = np.zeros((self.group.order,) * n + (M.rank,), dtype=np.int64)
        k = len(self.nonid)
        if n == 0:
            out[...] = psi.reshape(M.rank)
        else:
            out[np.ix_(*([self.nonid] * n))] = np.asarray(psi).reshape((k,) * n + (M.rank,))
        return Cochain(M, n, out)

    def homotopy(self, c: Cochain) -> Cochain:
        return Cochain.zero(c.module, c.degree - 1)


class MorseModel:
    """Reduction of the bar resolution along the Anick matching of a polycyclic normal form."""

    name = "morse"

    def __init__(self, G: FiniteGroup, series: PolycyclicSeries):
        self.group = G
        self.series = series
        self._kind_cache: dict[tuple[int, ...], tuple] = {}
        self._f_cache: dict[int, dict] = {}
        self._cells: dict[int, list[tuple[int, ...]]] = {}

    # matching -----------------------------------------------------------------

    def _min_prefix(self, tail: tuple[int, ...], w: tuple[int, ...]) -> int | None:
        """Shortest prefix length L such that tail + w[:L] ends in an obstruction."""
        t_last, k = tail[-1], w[0]
        if t_last > k:
            return 1
        if t_last < k:
            return None
        t = 0
        for x in reversed(tail):
            if x != k:
                break
            t += 1
        s = 0
        for x in w:
            if x != k:
                break
            s += 1
        need = self.series.primes[k] - t
        return need if need <= s else None

    def classify(self, cell: tuple[int, ...]) -> tuple:
        """('c',) critical, ('l', partner, u) matched upward, ('u', partner, u) matched downward.

        ``u`` is the (unit) coefficient of the lower cell in the boundary of the upper one.
        """
        got = self._kind_cache.get(cell)
        if got is not None:
            return got
        words = self.series.words
        G = self.group
        tail: tuple[int, ...] | None = None
        res: tuple = ("c",)
        for pos, g in enumerate(cell):
            w = words[g]
            L = 1 if tail is None else self._min_prefix(tail, w)
            if L is None:
                merged = cell[:pos - 1] + (int(G.mul[cell[pos - 1], g]),) + cell[pos + 1:]
                res = ("u", merged, -1 if pos % 2 else 1)
                break
            if L < len(w):
                split = cell[:pos] + (self.series.prefix(g, L), self.series.suffix(g, L)) + cell[pos + 1:]
                res = ("l", split, -1 if (pos + 1) % 2 else 1)
                break
            tail = w
        self._kind_cache[cell] = res
        return res

    def cells(self, n: int) -> list[tuple[int, ...]]:
        """Critical cells of degree n: chains in which each entry is the minimal obstruction prefix."""
        if n in self._cells:
            return self._cells[n]
        words = self.series.words
        by_word = {w: g for g, w in enumerate(words)}
        out: list[tuple[int, ...]] = []
        if n == 0:
            out = [()]
        else:
            r = len(self.series.letters)
            letters = [by_word[(i,)] for i in range(r)]
            frontier = [(g,) for g in letters]
            for _ in range(n - 1):
                nxt = []
                for cell in frontier:
                    tail = words[cell[-1]]
                    for g in range(self.group.order):
                        w = words[g]
                        if g == self.group.identity:
                            continue
                        if self._min_prefix(tail, w) == len(w):
                            nxt.append(cell + (g,))
                frontier = nxt
            out = sorted(frontier)
        self._cells[n] = out
        return out

    def ncells(self, n: int) -> int:
        return len(self.cells(n))

    # path sums ----------------------------------------------------------------

    def _project(self, cell: tuple[int, ...]) -> dict:
        """f(cell) as {(critical index, group element): coefficient}."""
        n = len(cell)
        memo = self._f_cache.setdefault(n, {})
        if cell in memo:
            return memo[cell]
        index = {c: i for i, c in enumerate(self.cells(n))}
        G = self.group
        stack = [cell]
        onstack = set()
        while stack:
            z = stack[-1]
            if z in memo:
                stack.pop()
                continue
            kind = self.classify(z)
            if kind[0] == "c":
                memo[z] = {(index[z], G.identity): 1}
                stack.pop()
                continue
            if kind[0] == "u":
                memo[z] = {}
                stack.pop()
                continue
            up, u = kind[1], kind[2]
            pending = [e for (_, _, e) in faces(G, up) if e != z and e not in memo]
            if pending:
                if z in onstack:
                    raise TheoryViolation("the Morse matching has a cycle")
                onstack.add(z)
                stack.extend(pending)
                continue
            acc: dict = {}
            for lam, s, e in faces(G, up):
                if e == z:
                    continue
                for (ci, g), v in memo[e].items():
                    key = (ci, int(G.mul[lam, g]))
                    acc[key] = acc.get(key, 0) - u * s * v
            memo[z] = {k: v for k, v in acc.items() if v}
            onstack.discard(z)
            stack.pop()
        return memo[cell]

    def coboundary_terms(self, n: int):
        G = self.group
        R, C, Gs, V = [], [], [], []
        for row, cell in enumerate(self.cells(n + 1)):
            acc: dict = {}
            for lam, s, e in faces(G, cell):
                for (ci, g), v in self._project(e).items():
                    key = (ci, int(G.mul[lam, g]))
                    acc[key] = acc.get(key, 0) + s * v
            for (ci, g), v in sorted(acc.items()):
                if v:
                    R.append(row)
                    C.append(ci)
                    Gs.append(g)
                    V.append(v)
        mk = lambda a: np.array(a, dtype=np.int64)
        return mk(R), mk(C), mk(Gs), mk(V)

    def _value_recursion(self, n: int, seed, M: GModule, kind: str) -> dict:
        """Memoised values on degree-n cells for the two cochain recursions.

        kind 'f': V(z) = psi(z) on critical cells, 0 on upper cells,
                  -u * sum_{e != z} s lam.V(e) over the faces of z's partner.
        kind 'h': W(e) = u * (c(e+) - sum_{e' != e} s lam.W(e')) on lower cells, else 0.
        """
        G = self.group
        act = M.action
        mods = M.abelian.moduli
        r = M.rank
        zero = np.zeros(r, dtype=np.int64)
        memo: dict = {}

        def base(z):
            k = self.classify(z)
            if kind == "f":
                if k[0] == "c":
                    return seed(z)
                if k[0] == "u":
                    return zero
            elif k[0] != "l":
                return zero
            return None

        def compute(roots):
            for root in roots:
                if root in memo:
                    continue
                stack = [root]
                onstack = set()
                while stack:
                    z = stack[-1]
                    if z in memo:
                        stack.pop()
                        continue
                    b = base(z)
                    if b is not None:
                        memo[z] = b
                        stack.pop()
                        continue
                    _, up, u = self.classify(z)
                    fs = faces(G, up)
                    pending = [e for (_, _, e) in fs if e != z and e not in memo]
                    if pending:
                        if z in onstack:
                            raise TheoryViolation("the Morse matching has a cycle")
                        onstack.add(z)
                        stack.extend(pending)
                        continue
                    acc = zero.copy()
                    for lam, s, e in fs:
                        if e == z or not r:
                            continue
                        acc += s * (act[lam] @ memo[e])
                    if kind == "f":
                        val = -u * acc
                    else:
                        val = u * (seed(up) - acc)
                    memo[z] = np.mod(val, mods) if r else val
                    onstack.discard(z)
                    stack.pop()

        memo["__compute__"] = compute
        return memo

    def restrict(self, z: Cochain) -> np.ndarray:
        n = z.degree
        M = z.module
        crit = self.cells(n)
        if n == 0:
            return z.values.reshape(1, -1)
        G = self.group
        vals = z.values
        W = self._value_recursion(n - 1, lambda cell: vals[cell], M, "h")
        compute = W.pop("__compute__")
        out = np.zeros((len(crit), M.rank), dtype=np.int64)
        for i, c in enumerate(crit):
            fs = faces(G, c)
            compute([e for _, _, e in fs])
            acc = vals[c].copy()
            for lam, s, e in fs:
                if M.rank:
                    acc -= s * (M.action[lam] @ W[e])
            out[i] = acc
        return np.mod(out, M.abelian.moduli) if M.rank else out

    def extend(self, psi: np.ndarray, M: GModule, n: int) -> Cochain:
        crit = self.cells(n)
        psi = np.asarray(psi, dtype=np.int64).reshape(len(crit), M.rank)
        index = {c: i for i, c in enumerate(crit)}
        _check_size(self.group, n, M.rank)
        out = np.zeros((self.group.order,) * n + (M.rank,), dtype=np.int64)
        if n == 0:
            out[...] = psi[0]
            return Cochain(M, 0, out)
        V = self._value_recursion(n, lambda cell: psi[index[cell]], M, "f")
        compute = V.pop("__compute__")
        nonid = [g for g in range(self.group.order) if g != self.group.identity]
        allcells = list(itertools.product(nonid, repeat=n))
        compute(allcells)
        for cell in allcells:
            out[cell] = V[cell]
        return Cochain(M, n, out)

    def homotopy(self, c: Cochain) -> Cochain:
        n = c.degree
        M = c.module
        out = np.zeros((self.group.order,) * (n - 1) + (M.rank,), dtype=np.int64)
        if n == 0:
            raise ValueError("no homotopy below degree 0")
        vals = c.values
        W = self._value_recursion(n - 1, lambda cell: vals[cell], M, "h")
        compute = W.pop("__compute__")
        nonid = [g for g in range(self.group.order) if g != self.group.identity]
        allcells = list(itertools.product(nonid, repeat=n - 1))
        compute(allcells)
        for cell in allcells:
            out[cell] = W[cell]
        return Cochain(M, n - 1, out)


_MODEL_CACHE: dict = {}


def model_for(G: FiniteGroup, prefer: str = "auto"):
    """The reduced model for G (Morse when G is solvable), cached per group table."""
    key = (G, prefer)
    got = _MODEL_CACHE.get(key)
    if got is not None:
        return got
    model = None
    if prefer in ("auto", "morse"):
        series = PolycyclicSeries.find(G)
        if series is not None:
            model = MorseModel(G, series)
    if model is None:
        model = BarModel(G)
    _MODEL_CACHE[key] = model
    return model
