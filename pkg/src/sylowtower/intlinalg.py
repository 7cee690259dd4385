"""Smith normal form of small integer matrices with unimodular transforms."""

from __future__ import annotations


def smith_normal_form(M: list[list[int]]):
    """Return (U, Uinv, S, V) with U @ M @ V = S diagonal, d1 | d2 | ...

    Entries are Python ints; intended for matrices with a few dozen rows.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = [[int(x) for x in row] for row in M]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Uinv = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        if c == 0:
            return
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]
        for row in Uinv:  # Uinv <- Uinv @ E^-1: col_src -= c * col_dst
            row[src] -= c * row[dst]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_col(src, dst, c):  # col_dst += c * col_src
        if c == 0:
            return
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]
        for row in Uinv:
            row[i] = -row[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        done = False
            if not done:
                nz = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                nz += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i, j = min(nz)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # divisibility of the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            negate_row(t)
        t += 1
    return U, Uinv, A, V
