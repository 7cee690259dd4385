"""Reference computations written from first principles on raw tables.

Nothing here imports sylowtower; the tests compare the package against these.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np


def _closure(table, gens):
    """Subgroup generated by gens, as a frozenset, by saturating under right multiplication."""
    n = len(table)
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    seen = {e}
    stack = [e]
    gens = list(gens)
    while stack:
        x = stack.pop()
        for g in gens:
            y = table[x][g]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def brute_sylow_count(table, p: int) -> int:
    """Number of subgroups of order the full p-part of |G|.

    Every p-subgroup is reached from a cyclic one by adjoining p-elements one
    at a time, since each intermediate subgroup is again a p-group.
    """
    n = len(table)
    pk = 1
    while n % (pk * p) == 0:
        pk *= p
    if pk == 1:
        return 1
    pel = [x for x in range(n) if _is_p_power(len(_closure(table, [x])), p)]
    found = {_closure(table, [x]) for x in pel}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            if len(H) == pk:
                continue
            for x in pel:
                if x in H:
                    continue
                K = _closure(table, list(H) + [x])
                if _is_p_power(len(K), p) and K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return sum(1 for H in found if len(H) == pk)


def orbit_fixed_points(action) -> int:
    """|X^G| for a permutation action table act[g][x], counting orbits of size one via union-find."""
    act = [list(map(int, row)) for row in action]
    npts = len(act[0]) if act else 0
    parent = list(range(npts))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in act:
        for x, y in enumerate(row):
            a, b = find(x), find(y)
            if a != b:
                parent[a] = b
    sizes = {}
    for x in range(npts):
        r = find(x)
        sizes[r] = sizes.get(r, 0) + 1
    return sum(1 for s in sizes.values() if s == 1)


def _structure(elements_orders: list[int]) -> list[int]:
    """Invariant factors of a finite abelian group from the multiset of its element orders."""
    from collections import Counter

    cnt = Counter(elements_orders)
    total = sum(cnt.values())
    if total == 1:
        return []
    # for each prime, the number of elements of order dividing p^j determines the p-partition
    primes = sorted({q for o in cnt for q in range(2, o + 1) if o % q == 0 and all(q % r for r in range(2, q))})
    parts = {}
    for q in primes:
        sizes = []
        j = 1
        while True:
            c = sum(v for o, v in cnt.items() if (q ** j) % o == 0 and _is_p_power(o, q))
            sizes.append(c)
            if j > 1 and sizes[-1] == sizes[-2]:
                break
            j += 1
        # log_q of |A[q^j]| / |A[q^(j-1)]| is the number of cyclic factors of order >= q^j
        logs = [round(np.log(sizes[0]) / np.log(q))] + [round(np.log(sizes[i] / sizes[i - 1]) / np.log(q))
                                                         for i in range(1, len(sizes))]
        exps = []
        for j, c in enumerate(logs, start=1):
            nxt = logs[j] if j < len(logs) else 0
            exps += [j] * (c - nxt)
        parts[q] = sorted(exps, reverse=True)
    width = max(len(v) for v in parts.values())
    factors = []
    for i in range(width):
        d = 1
        for q, e in parts.items():
            if i < len(e):
                d *= q ** e[i]
        factors.append(d)
    return sorted(factors)


def cyclic_cohomology(m: int, k: int, u: int, n: int) -> list[int]:
    """H^n(Z/m; Z/k) with the generator acting by u, from the 2-periodic resolution.

    The cochain complex is Z/k -(u-1)-> Z/k -N-> Z/k -(u-1)-> ..., with
    N = 1 + u + ... + u^(m-1); kernels and images are found by listing
    elements, and the quotient's structure is read off its element orders.
    """
    els = range(k)
    d = lambda a: ((u - 1) * a) % k  # noqa: E731
    norm = sum(pow(u, i, k) for i in range(m)) % k
    N = lambda a: (norm * a) % k  # noqa: E731
    if n == 0:
        ker = [a for a in els if d(a) == 0]
        im = [0]
    elif n % 2 == 1:
        ker = [a for a in els if N(a) == 0]
        im = sorted({d(a) for a in els})
    else:
        ker = [a for a in els if d(a) == 0]
        im = sorted({N(a) for a in els})
    im_set = set(im)
    cosets = {}
    for a in ker:
        cosets.setdefault(frozenset((a + b) % k for b in im_set), a)
    reps = sorted(cosets.values())

    def order(a):
        j = 1
        while (j * a) % k not in im_set:
            j += 1
        return j

    return _structure([order(a) for a in reps])


def fp_cohomology_dim(table, action, p: int, n: int) -> int:
    """dim over F_p of H^n(G; V) for V = F_p^r, from unnormalized bar cochains and Gaussian elimination.

    ``action[g]`` is the r x r matrix of g acting on column vectors.
    """
    G = len(table)
    act = [np.asarray(a, dtype=np.int64) % p for a in action]
    r = act[0].shape[0]

    def delta(deg):
        # matrix of d: C^deg -> C^(deg+1), columns indexed by (tuple, coord)
        src = list(itertools.product(range(G), repeat=deg))
        dst = list(itertools.product(range(G), repeat=deg + 1))
        sidx = {t: i for i, t in enumerate(src)}
        D = np.zeros((len(dst) * r, len(src) * r), dtype=np.int64)
        for row, t in enumerate(dst):
            # (dc)(g1..g_{deg+1}) = g1 c(g2..) + sum (-1)^i c(.., gi g_{i+1}, ..) + (-1)^{deg+1} c(g1..g_deg)
            terms = [(act[t[0]], t[1:], 1)]
            for i in range(deg):
                merged = t[:i] + (table[t[i]][t[i + 1]],) + t[i + 2:]
                terms.append((None, merged, (-1) ** (i + 1)))
            terms.append((None, t[:deg], (-1) ** (deg + 1)))
            for mat, args, sign in terms:
                c = sidx[args] * r
                block = mat if mat is not None else np.eye(r, dtype=np.int64)
                D[row * r:(row + 1) * r, c:c + r] += sign * block
        return D % p

    def rank(M):
        M = M.copy() % p
        rk = 0
        rows, cols = M.shape
        for c in range(cols):
            piv = next((i for i in range(rk, rows) if M[i, c]), None)
            if piv is None:
                continue
            M[[rk, piv]] = M[[piv, rk]]
            M[rk] = (M[rk] * pow(int(M[rk, c]), -1, p)) % p
            nz = np.nonzero(M[:, c])[0]
            for i in nz:
                if i != rk:
                    M[i] = (M[i] - M[i, c] * M[rk]) % p
            rk += 1
            if rk == rows:
                break
        return rk

    dim_c = G ** n * r
    r_out = rank(delta(n))
    r_in = rank(delta(n - 1)) if n > 0 else 0
    return dim_c - r_out - r_in


def gcd_structure(m: int, k: int) -> list[int]:
    g = gcd(m, k)
    return [g] if g > 1 else []
