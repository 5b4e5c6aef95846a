"""Exact integer linear algebra and finitely generated abelian groups.

Matrices are immutable row-major tuples of tuples of Python ints; all
transforms are returned, never applied in place.  Hermite form is
row-style: U * M = H with U unimodular and H in upper echelon shape with
positive pivots and reduced entries above each pivot.  Smith form returns
U * M * V = D with nonnegative diagonal in a divisibility chain.

A `mod` argument, where offered, means the row lattice is implicitly
extended by mod * Z^cols; entries stay reduced, which is what keeps ray
class computations with huge moduli cheap.  Transforms are not available
in that mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .numutil import valuation

Matrix = tuple[tuple[int, ...], ...]


def matrix(rows) -> Matrix:
    rows = tuple(tuple(int(x) for x in r) for r in rows)
    if rows:
        w = len(rows[0])
        if any(len(r) != w for r in rows):
            raise ValueError("ragged matrix")
    return rows


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def dims(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = dims(a)
    rb, cb = dims(b)
    if ca != rb:
        raise ValueError("dimension mismatch")
    bt = tuple(zip(*b)) if b else ()
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v: tuple[int, ...], a: Matrix) -> tuple[int, ...]:
    if not a:
        return ()
    cols = len(a[0])
    return tuple(sum(v[i] * a[i][j] for i in range(len(a))) for j in range(cols))


def _hnf_rows(m: Matrix, track_u: bool):
    """Shared row-HNF worker.  Returns (H rows, U rows or None, pivot cols)."""
    rows = [list(r) for r in m]
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)] if track_u else None
    top = 0
    pivots = []
    for col in range(nc):
        # Clear column below `top` by gcd chaining into row `top`.
        piv = None
        for i in range(top, nr):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != top:
            rows[top], rows[piv] = rows[piv], rows[top]
            if track_u:
                u[top], u[piv] = u[piv], u[top]
        for i in range(top + 1, nr):
            while rows[i][col]:
                a, b = rows[top][col], rows[i][col]
                if abs(b) < abs(a) or a == 0:
                    rows[top], rows[i] = rows[i], rows[top]
                    if track_u:
                        u[top], u[i] = u[i], u[top]
                    a, b = rows[top][col], rows[i][col]
                q = b // a
                if q:
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[top])]
                    if track_u:
                        u[i] = [x - q * y for x, y in zip(u[i], u[top])]
        if rows[top][col] < 0:
            rows[top] = [-x for x in rows[top]]
            if track_u:
                u[top] = [-x for x in u[top]]
        if rows[top][col] == 0:
            continue
        # Reduce entries above the pivot.
        a = rows[top][col]
        for i in range(top):
            q = rows[i][col] // a
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[top])]
                if track_u:
                    u[i] = [x - q * y for x, y in zip(u[i], u[top])]
        pivots.append(col)
        top += 1
        if top == nr:
            break
    return rows, u, pivots


def hermite_normal_form(m: Matrix) -> tuple[Matrix, Matrix]:
    """Row HNF: returns (H, U) with U unimodular and U * M = H."""
    rows, u, _ = _hnf_rows(m, track_u=True)
    return matrix(rows), matrix(u)


def hnf_mod(m: Matrix, mod: int) -> Matrix:
    """HNF of the lattice spanned by rows of M together with mod * Z^n.

    Result is square (n x n) upper triangular with positive diagonal
    dividing the column's content; input entries may be pre-reduced mod
    `mod` since that changes rows only by multiples of the stacked
    mod * e_j generators.
    """
    if mod <= 0:
        raise ValueError("mod must be positive")
    nc = dims(m)[1] if m else 0
    stacked = [tuple(x % mod for x in r) for r in m if any(x % mod for x in r)]
    stacked += [
        tuple(mod if i == j else 0 for j in range(nc)) for i in range(nc)
    ]
    rows, _, _ = _hnf_rows(matrix(stacked), track_u=False)
    return matrix(rows[:nc])


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith form: returns (D, U, V) with U * M * V = D diagonal,
    d_i >= 0 and d_1 | d_2 | ...
    """
    nr, nc = dims(m)
    a = [list(r) for r in m]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in a:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    n = min(nr, nc)
    while t < n:
        # Find smallest nonzero entry in the trailing block as pivot.
        piv = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best, piv = x, (i, j)
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            row_swap(t, i0)
        if j0 != t:
            col_swap(t, j0)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        col_swap(t, j)
                        dirty = True
        # Enforce divisibility of the rest of the block by the pivot.
        p = a[t][t]
        bad = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, -1)  # adds row `bad` into pivot row, redo block
            continue
        t += 1
    for i in range(n):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]
    return matrix(a), matrix(u), matrix(v)


def snf_diagonal_mod(m: Matrix, mod: int) -> list[int]:
    """Diagonal of the Smith form of the stacked matrix [M; mod*I].

    Every invariant divides mod, so with mod = p^B this is exactly the
    p-primary structure of coker(M) truncated at exponent B.  Entries are
    kept reduced mod `mod` throughout, so huge relation entries never
    appear.
    """
    if mod <= 0:
        raise ValueError("mod must be positive")
    nc = dims(m)[1] if m else 0
    if nc == 0:
        return []
    rows = [[x % mod for x in r] for r in m if any(x % mod for x in r)]
    rows += [[mod if i == j else 0 for j in range(nc)] for i in range(nc)]
    nr = len(rows)

    a = rows
    t = 0
    diag = []
    while t < nc:
        piv = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j] % mod
                a[i][j] = x
                if x and (best is None or x < best):
                    best, piv = x, (i, j)
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            a[t], a[i0] = a[i0], a[t]
        if j0 != t:
            for r in a:
                r[t], r[j0] = r[j0], r[t]
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [(x - q * y) % mod for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for r in a:
                        r[j] = (r[j] - q * r[t]) % mod
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        dirty = True
        p = a[t][t]
        bad = None
        for i in range(t + 1, nr):
            if any(x % p for x in a[i][t + 1 :]):
                bad = i
                break
        if bad is not None:
            a[t] = [(x + y) % mod for x, y in zip(a[t], a[bad])]
            continue
        diag.append(gcd(p, mod))
        t += 1
    while len(diag) < nc:
        diag.append(mod)
    return diag


def solve_left(m: Matrix, b: tuple[int, ...]) -> tuple[int, ...] | None:
    """Solve x * M = b over Z; None when b is not in the row lattice."""
    h, u = hermite_normal_form(m)
    nr, nc = dims(m)
    if len(b) != nc:
        raise ValueError("dimension mismatch")
    # Back-substitute against H's pivots.
    pivots = []
    for i in range(nr):
        row = h[i]
        j = next((k for k, x in enumerate(row) if x), None)
        if j is None:
            break
        pivots.append((i, j))
    y = [0] * nr
    r = list(b)
    for i, j in pivots:
        if r[j] % h[i][j]:
            return None
        q = r[j] // h[i][j]
        y[i] = q
        if q:
            r = [x - q * z for x, z in zip(r, h[i])]
    if any(r):
        return None
    return vec_mat(tuple(y), u)


def left_kernel(m: Matrix) -> Matrix:
    """Basis (rows) of {x : x * M = 0}."""
    h, u = hermite_normal_form(m)
    out = []
    for i, row in enumerate(h):
        if not any(row):
            out.append(u[i])
    return matrix(out)


def det(m: Matrix) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n, c = dims(m)
    if n != c:
        raise ValueError("det of non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class AbGroup:
    """Finitely generated abelian group as invariant factors plus rank.

    invariant_factors is the divisibility chain d_1 | d_2 | ..., each >= 2.
    """

    invariant_factors: tuple[int, ...] = ()
    free_rank: int = 0
    generators: tuple[str, ...] = ()

    def __post_init__(self):
        fs = self.invariant_factors
        if any(d < 2 for d in fs):
            raise ValueError("invariant factors must be >= 2")
        if any(fs[i + 1] % fs[i] for i in range(len(fs) - 1)):
            raise ValueError("divisibility chain violated")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and not self.free_rank

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        parts += ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "1"


def group_from_relations(num_generators: int, relations: Matrix,
                         labels: tuple[str, ...] | None = None) -> AbGroup:
    """Cokernel Z^g / (row lattice of `relations`)."""
    if relations and dims(relations)[1] != num_generators:
        raise ValueError("relation width must equal generator count")
    if not relations:
        return AbGroup((), num_generators, labels or ())
    d, _, _ = smith_normal_form(relations)
    nr, nc = dims(d)
    diag = [d[i][i] for i in range(min(nr, nc))]
    rank = sum(1 for x in diag if x)
    invs = tuple(x for x in diag if x > 1)
    gens = labels if labels is not None else tuple(
        f"g{i}" for i in range(len(invs) + num_generators - rank)
    )
    return AbGroup(invs, num_generators - rank, gens)


def invariant_factors_bounded(m: Matrix, bound: int) -> tuple[int, ...]:
    """Invariant factors of a finite cokernel whose exponent divides
    `bound`.  Reduction runs mod 2*bound so entries never blow up; a
    diagonal value not dividing `bound` (in particular a free generator)
    raises, so a wrong bound cannot pass silently."""
    from .numutil import factorint

    modx = 2 * bound
    diag = [gcd(d, modx) for d in snf_diagonal_mod(m, modx)]
    for v in diag:
        if v > 1 and bound % v:
            raise ValueError(
                f"cokernel invariant {v} does not divide the bound {bound}"
            )
    fac = factorint(bound) if bound > 1 else {}
    per_prime: dict[int, list[int]] = {l: [] for l in fac}
    for v in diag:
        for l in per_prime:
            e = 0
            while v % l == 0:
                v //= l
                e += 1
            if e:
                per_prime[l].append(e)
    depth = max((len(v) for v in per_prime.values()), default=0)
    out = []
    for rank in range(depth):
        d = 1
        for l, es in per_prime.items():
            es = sorted(es, reverse=True)
            if rank < len(es):
                d *= l ** es[rank]
        out.append(d)
    out.reverse()
    return tuple(x for x in out if x > 1)


def p_part_invariants(g: AbGroup, p: int) -> list[int]:
    """Descending p-power parts of the invariant factors (paper's A_S list)."""
    out = []
    for d in g.invariant_factors:
        v = valuation(d, p)
        if v > 0:
            out.append(p**v)
    out.sort(reverse=True)
    return out
