"""Linear algebra over the chain rings Z/q^E.

A cochain complex with finite coefficients splits over the primes dividing
the coefficient order, and each q-primary piece is a complex of free
Z/q^E-modules once coordinates of smaller order are handled by scaling rows
and appending relation columns. Homology is then computed by

1. sparse elimination on unit pivots (each step is an elementary chain
   homotopy equivalence, logged so cochains can be moved back and forth), and
2. a dense local Smith normal form on whatever is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, TheoryViolation


def valuation_mod(x: int, q: int, E: int) -> int:
    """q-adic valuation of x in Z/q^E (E for zero)."""
    x %= q ** E
    if x == 0:
        return E
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v


@dataclass
class Smith:
    """U @ A @ V = diag(d) over Z/q^E, with inverses of U and V kept."""

    U: np.ndarray
    Uinv: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    diag: list[int]  # valuations of the diagonal, E meaning zero; length min(rows, cols)


def local_smith(A: np.ndarray, q: int, E: int, left: bool = True, right: bool = True) -> Smith:
    """Smith form over Z/q^E; ``left``/``right`` say whether U or V are tracked."""
    mod = q ** E
    A = np.mod(np.array(A, dtype=np.int64), mod)
    m, n = A.shape
    U = np.eye(m if left else 0, dtype=np.int64)
    Uinv = np.eye(m if left else 0, dtype=np.int64)
    V = np.eye(n if right else 0, dtype=np.int64)
    Vinv = np.eye(n if right else 0, dtype=np.int64)
    diag: list[int] = []
    for t in range(min(m, n)):
        sub = A[t:, t:]
        if not sub.any():
            diag.extend([E] * (min(m, n) - t))
            break
        # entry of smallest valuation
        best = None
        for v in range(E):
            hit = np.argwhere(np.mod(sub, q ** (v + 1)) != 0)
            if len(hit):
                best = (v, int(hit[0][0]) + t, int(hit[0][1]) + t)
                break
        v, i, j = best  # type: ignore[misc]
        if i != t:
            A[[t, i]] = A[[i, t]]
            if left:
                U[[t, i]] = U[[i, t]]
                Uinv[:, [t, i]] = Uinv[:, [i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if right:
                V[:, [t, j]] = V[:, [j, t]]
                Vinv[[t, j]] = Vinv[[j, t]]
        piv = int(A[t, t])
        unit = piv // q ** v
        uinv = pow(unit, -1, mod)
        # scale row t so the pivot is exactly q^v
        if uinv != 1:
            A[t] = np.mod(A[t] * uinv, mod)
            if left:
                U[t] = np.mod(U[t] * uinv, mod)
                Uinv[:, t] = np.mod(Uinv[:, t] * unit, mod)
        # clear column t below and row t to the right; entries are divisible by q^v
        col = A[t + 1:, t] // q ** v
        if col.any():
            A[t + 1:] = np.mod(A[t + 1:] - np.outer(col, A[t]), mod)
            if left:
                U[t + 1:] = np.mod(U[t + 1:] - np.outer(col, U[t]), mod)
                Uinv[:, t] = np.mod(Uinv[:, t] + Uinv[:, t + 1:] @ col, mod)
        row = A[t, t + 1:] // q ** v
        if row.any():
            A[:, t + 1:] = np.mod(A[:, t + 1:] - np.outer(A[:, t], row), mod)
            if right:
                V[:, t + 1:] = np.mod(V[:, t + 1:] - np.outer(V[:, t], row), mod)
                Vinv[t] = np.mod(Vinv[t] + row @ Vinv[t + 1:], mod)
        diag.append(v)
    return Smith(U, Uinv, V, Vinv, diag)


# sparse elimination ------------------------------------------------------------

class SparseMatrix:
    """Row and column dictionaries over Z/mod, kept in sync."""

    def __init__(self, mod: int):
        self.mod = mod
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, dict[int, int]] = {}

    @classmethod
    def from_arrays(cls, rows, cols, vals, mod: int, nrows: int, ncols: int) -> "SparseMatrix":
        S = cls(mod)
        S.rows = {i: {} for i in range(nrows)}
        S.cols = {j: {} for j in range(ncols)}
        for i, j, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
            v %= mod
            if v:
                S.rows[i][j] = v
                S.cols[j][i] = v
        return S

    def set(self, i: int, j: int, v: int) -> None:
        v %= self.mod
        if v:
            self.rows[i][j] = v
            self.cols[j][i] = v
        else:
            self.rows[i].pop(j, None)
            self.cols[j].pop(i, None)

    def drop_row(self, i: int) -> None:
        for j in self.rows.pop(i):
            self.cols[j].pop(i, None)

    def drop_col(self, j: int) -> None:
        for i in self.cols.pop(j):
            self.rows[i].pop(j, None)

    def pivot_eliminate(self, i: int, j: int) -> None:
        """Schur complement on the unit entry (i, j); row i and column j are removed."""
        mod = self.mod
        a_inv = pow(self.rows[i][j], -1, mod)
        row_i = {k: v for k, v in self.rows[i].items() if k != j}
        for r, v in list(self.cols[j].items()):
            if r == i:
                continue
            f = v * a_inv % mod
            rr = self.rows[r]
            for k, w in row_i.items():
                nv = (rr.get(k, 0) - f * w) % mod
                if nv:
                    rr[k] = nv
                    self.cols[k][r] = nv
                else:
                    rr.pop(k, None)
                    self.cols[k].pop(r, None)
        self.drop_row(i)
        self.drop_col(j)

    def dense(self, row_ids: list[int], col_ids: list[int]) -> np.ndarray:
        out = np.zeros((len(row_ids), len(col_ids)), dtype=np.int64)
        cpos = {c: k for k, c in enumerate(col_ids)}
        for a, r in enumerate(row_ids):
            for c, v in self.rows[r].items():
                out[a, cpos[c]] = v
        return out


@dataclass
class ReducedComplex:
    """C^{n-1} -A-> C^n -B-> C^{n+1} over Z/q^E after unit-pivot elimination.

    Cells are integer ids. ``mid`` lists the surviving middle cells, ``left``
    the surviving columns of A (including relation columns), ``right`` the
    surviving rows of B.
    """

    q: int
    E: int
    m: int  # middle size before reduction
    left: list[int]
    mid: list[int]
    right: list[int]
    A: np.ndarray
    B: np.ndarray
    log: list = field(default_factory=list)

    @property
    def mod(self) -> int:
        return self.q ** self.E


def _unit(v: int, q: int) -> bool:
    return v % q != 0


def reduce_complex(A: SparseMatrix, B: SparseMatrix | None, q: int, E: int, m: int,
                   max_dense: int = 4000) -> ReducedComplex:
    """Eliminate unit pivots of A (middle rows against left columns) and then of B."""
    mod = q ** E
    log: list = []
    # A-pivots: column w of A with a unit entry at row x
    order = sorted(A.cols, key=lambda c: (len(A.cols[c]), c))
    for w in order:
        if w not in A.cols:
            continue
        cands = [x for x, v in A.cols[w].items() if _unit(v, q)]
        if not cands:
            continue
        x = min(cands, key=lambda r: (len(A.rows[r]), r))
        a = A.rows[x][w]
        col_w = {z: v for z, v in A.cols[w].items() if z != x}
        row_x = {u: v for u, v in A.rows[x].items() if u != w}
        log.append(("A", x, w, pow(a, -1, mod), col_w, row_x))
        A.pivot_eliminate(x, w)
        if B is not None:
            B.drop_col(x)
    if B is not None:
        order = sorted(B.cols, key=lambda c: (len(B.cols[c]), c))
        for x in order:
            if x not in B.cols:
                continue
            cands = [y for y, v in B.cols[x].items() if _unit(v, q)]
            if not cands:
                continue
            y = min(cands, key=lambda r: (len(B.rows[r]), r))
            a = B.rows[y][x]
            row_y = {z: v for z, v in B.rows[y].items() if z != x}
            log.append(("B", x, y, pow(a, -1, mod), row_y))
            B.pivot_eliminate(y, x)
            A.drop_row(x)
    mid = sorted(A.rows)
    left = sorted(c for c, col in A.cols.items() if col)
    right = sorted(r for r, row in B.rows.items() if row) if B is not None else []
    if len(mid) > max_dense or (len(mid) * max(len(left), len(right)) > max_dense * max_dense):
        raise CapacityError(f"{len(mid)} cells survive sparse elimination; dense stage is too large",
                            hint="use a smaller group, degree or module")
    Ad = A.dense(mid, left)
    Bd = B.dense(right, mid) if B is not None else np.zeros((0, len(mid)), dtype=np.int64)
    return ReducedComplex(q, E, m, left, mid, right, Ad, Bd, log)


def forward(red: ReducedComplex, z: dict[int, int], record: bool = False):
    """Move a middle cochain (cell -> value) into the reduced complex.

    With ``record`` the values at eliminated A-pivot rows are returned too,
    as needed by ``back_witness``.
    """
    mod = red.mod
    z = dict(z)
    seen: list[int] = []
    for entry in red.log:
        if entry[0] == "A":
            _, x, w, ainv, col_w, _ = entry
            vx = z.pop(x, 0) % mod
            seen.append(vx)
            if vx:
                f = vx * ainv % mod
                for zz, v in col_w.items():
                    z[zz] = (z.get(zz, 0) - v * f) % mod
        else:
            z.pop(entry[1], None)
    vec = np.array([z.get(c, 0) % mod for c in red.mid], dtype=np.int64)
    return (vec, seen) if record else vec


def backward_mid(red: ReducedComplex, vec: np.ndarray) -> dict[int, int]:
    """Lift a reduced middle cocycle to the full middle space."""
    mod = red.mod
    z = {c: int(v) % mod for c, v in zip(red.mid, vec)}
    for entry in reversed(red.log):
        if entry[0] == "A":
            z[entry[1]] = 0
        else:
            _, x, _, ainv, row_y = entry
            s = sum(v * z.get(c, 0) for c, v in row_y.items())
            z[x] = (-ainv * s) % mod
    return z


def back_witness(red: ReducedComplex, beta: dict[int, int], seen: list[int]) -> dict[int, int]:
    """Turn a reduced solution of A beta = c into a full one."""
    mod = red.mod
    b = dict(beta)
    k = len(seen)
    for entry in reversed(red.log):
        if entry[0] != "A":
            continue
        k -= 1
        _, x, w, ainv, _, row_x = entry
        s = sum(v * b.get(u, 0) for u, v in row_x.items())
        b[w] = (ainv * (seen[k] - s)) % mod
    return b


@dataclass
class LocalHomology:
    """Homology at the middle of a reduced complex.

    ``exps`` are the exponents c_j of the cyclic summands Z/q^{c_j};
    ``gens`` are reduced middle vectors representing the generators.
    """

    red: ReducedComplex
    exps: list[int]
    gens: list[np.ndarray]
    _kerV: np.ndarray
    _kerVinv: np.ndarray
    _kexp: list[int]
    _U2: np.ndarray

    def coords(self, vec: np.ndarray) -> list[int]:
        q, E = self.red.q, self.red.E
        mod = q ** E
        y = np.mod(self._kerVinv @ np.asarray(vec, dtype=np.int64), mod)
        ys = []
        for i, b in enumerate(self._kexp):
            if b == 0:
                if y[i] % mod:
                    raise TheoryViolation("vector is not a cocycle in the reduced complex")
                continue
            s = q ** (E - b)
            if y[i] % s:
                raise TheoryViolation("vector is not a cocycle in the reduced complex")
            ys.append((int(y[i]) // s) % q ** b)
        ys_arr = np.array(ys, dtype=np.int64)
        out = np.mod(self._U2 @ ys_arr, mod) if len(ys) else np.zeros(self._U2.shape[0], dtype=np.int64)
        return [int(out[j]) % q ** c for j, c in enumerate(self.exps_all) if c > 0]

    exps_all: list[int] = field(default_factory=list)


def homology(red: ReducedComplex) -> LocalHomology:
    q, E = red.q, red.E
    mod = q ** E
    m = len(red.mid)
    B, A = red.B, red.A
    if B.shape[0]:
        sb = local_smith(B, q, E, left=False)
        V, Vinv, bdiag = sb.V, sb.Vinv, sb.diag
    else:
        V = np.eye(m, dtype=np.int64)
        Vinv = np.eye(m, dtype=np.int64)
        bdiag = []
    # kernel generator i: q^{E-b_i} V e_i, of order q^{b_i}; b_i = E past the diagonal
    # generator i of ker B is q^{E-k_i} V e_i and has order q^{k_i}
    kexp = [bdiag[i] if i < len(bdiag) else E for i in range(m)]
    keep = [i for i in range(m) if kexp[i] > 0]
    W = np.stack([np.mod(V[:, i] * q ** (E - kexp[i]), mod) for i in keep], axis=1) if keep \
        else np.zeros((m, 0), dtype=np.int64)
    # coordinates of A's columns in the kernel generators
    VA = np.mod(Vinv @ A, mod) if A.size else np.zeros((m, A.shape[1]), dtype=np.int64)
    g = len(keep)
    Y = np.zeros((g, A.shape[1]), dtype=np.int64)
    for a, i in enumerate(keep):
        s = q ** (E - kexp[i])
        rowv = VA[i]
        if np.any(rowv % s):
            raise TheoryViolation("coboundaries are not cocycles: d o d != 0 in the reduced complex")
        Y[a] = (rowv // s) % q ** kexp[i]
    for i in range(m):
        if kexp[i] == 0 and np.any(VA[i] % mod):
            raise TheoryViolation("coboundaries are not cocycles: d o d != 0 in the reduced complex")
    P = np.concatenate([Y, np.diag([q ** kexp[i] for i in keep]).astype(np.int64).reshape(g, g)], axis=1) \
        if g else np.zeros((0, 0), dtype=np.int64)
    if g:
        sp = local_smith(P, q, E, right=False)
        pd = sp.diag + [E] * (g - len(sp.diag))
        U2, U2inv = sp.U, sp.Uinv
    else:
        pd, U2, U2inv = [], np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64)
    exps_all = [int(c) for c in pd]
    gens = []
    for j, c in enumerate(exps_all):
        if c > 0:
            yvec = U2inv[:, j]
            gens.append(np.mod(W @ yvec, mod))
    exps = [c for c in exps_all if c > 0]
    h = LocalHomology(red, exps, gens, V, Vinv, kexp, U2)
    h.exps_all = exps_all
    return h


def solve_dense(A: np.ndarray, c: np.ndarray, q: int, E: int) -> np.ndarray | None:
    """Some x with A x = c over Z/q^E, or None."""
    mod = q ** E
    m, n = A.shape
    if m == 0:
        return np.zeros(n, dtype=np.int64)
    if n == 0:
        return np.zeros(0, dtype=np.int64) if not np.any(np.mod(c, mod)) else None
    s = local_smith(A, q, E)
    Uc = np.mod(s.U @ np.mod(c, mod), mod)
    y = np.zeros(n, dtype=np.int64)
    for i in range(m):
        v = s.diag[i] if i < len(s.diag) else E
        if v >= E:
            if Uc[i] % mod:
                return None
            continue
        if Uc[i] % q ** v:
            return None
        y[i] = Uc[i] // q ** v
    return np.mod(s.V @ y, mod)
