"""Native arithmetic backend for quadratic fields K = Q(sqrt(d)).

Elements are integer coordinate pairs (x, y) on the integral basis
{1, w}, w = (1+sqrt(d))/2 for d = 1 mod 4 and sqrt(d) otherwise, so
w^2 = t*w + u with (t, u) = (1, (d-1)/4) or (0, d).  Ideals are 2x2 row
HNF lattices over that basis.  The class group is certified by counting
reduced binary quadratic forms; relation presentations are built from
small smooth elements so every relation carries an explicit principal
generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from . import zabgroup as zg
from .numutil import factorint, is_prime, kronecker, primes_in, squarefree_part_known

Elem = tuple[int, int]


class ResourceError(Exception):
    """Configured desk-scale bound exceeded."""


class NotPrincipal(Exception):
    """Raised with a certificate when an ideal has no generator."""


@dataclass(frozen=True)
class QuadField:
    d: int
    disc: int
    t: int  # w^2 = t*w + u
    u: int

    @property
    def signature(self) -> tuple[int, int]:
        return (2, 0) if self.d > 0 else (0, 1)

    @property
    def degree(self) -> int:
        return 2

    def __repr__(self):
        return f"QuadField(d={self.d})"


def make_quadratic_field(d: int) -> QuadField:
    if d in (0, 1):
        raise ValueError("d must not be 0 or 1")
    if not squarefree_part_known(d):
        raise ValueError(f"d={d} is not squarefree")
    if d % 4 == 1:
        return QuadField(d, d, 1, (d - 1) // 4)
    return QuadField(d, 4 * d, 0, d)


# -- element arithmetic ------------------------------------------------------

def elem_add(a: Elem, b: Elem) -> Elem:
    return (a[0] + b[0], a[1] + b[1])


def elem_mul(k: QuadField, a: Elem, b: Elem) -> Elem:
    x = a[0] * b[0] + k.u * a[1] * b[1]
    y = a[0] * b[1] + a[1] * b[0] + k.t * a[1] * b[1]
    return (x, y)


def elem_conj(k: QuadField, a: Elem) -> Elem:
    return (a[0] + k.t * a[1], -a[1])


def elem_norm(k: QuadField, a: Elem) -> int:
    return a[0] * a[0] + k.t * a[0] * a[1] - k.u * a[1] * a[1]


def elem_trace(k: QuadField, a: Elem) -> int:
    return 2 * a[0] + k.t * a[1]


def elem_pow(k: QuadField, a: Elem, n: int) -> Elem:
    if n < 0:
        raise ValueError("negative element power")
    r: Elem = (1, 0)
    while n:
        if n & 1:
            r = elem_mul(k, r, a)
        a = elem_mul(k, a, a)
        n >>= 1
    return r


def elem_pow_mod(k: QuadField, a: Elem, n: int, m: int) -> Elem:
    r: Elem = (1, 0)
    a = (a[0] % m, a[1] % m)
    while n:
        if n & 1:
            x = elem_mul(k, r, a)
            r = (x[0] % m, x[1] % m)
        x = elem_mul(k, a, a)
        a = (x[0] % m, x[1] % m)
        n >>= 1
    return r


def embeddings(k: QuadField, a: Elem) -> tuple[float, float]:
    """Real embeddings (d > 0) with sqrt(d) > 0 first."""
    s = math.sqrt(k.d)
    w1 = (1 + s) / 2 if k.d % 4 == 1 else s
    w2 = (1 - s) / 2 if k.d % 4 == 1 else -s
    return (a[0] + a[1] * w1, a[0] + a[1] * w2)


def is_totally_positive(k: QuadField, a: Elem) -> bool:
    """Exact sign test under both real embeddings (d > 0 only)."""
    if k.d < 0:
        return a != (0, 0)

    def positive(x: int, y: int) -> bool:
        # sign of 2x + y(t +- sqrt(d)) ... reduce to comparing squares
        if y == 0:
            return x > 0
        lhs = 2 * x + k.t * y  # element*2 = lhs + y*sqrt(d) (first emb)
        # first embedding positive iff lhs + y*sqrt(d) > 0
        if y > 0:
            return lhs >= 0 or lhs * lhs < y * y * k.d
        return lhs > 0 and lhs * lhs > y * y * k.d

    x, y = a
    first = positive(x, y)
    second = positive(x + k.t * y, -y) if k.t else positive(x, -y)
    return first and second


# -- ideals ------------------------------------------------------------------

@dataclass(frozen=True)
class QuadIdeal:
    k: QuadField
    hnf: zg.Matrix  # 2x2 upper triangular rows on {1, w}

    @property
    def norm(self) -> int:
        return self.hnf[0][0] * self.hnf[1][1]

    def __contains__(self, a: Elem) -> bool:
        return zg.solve_left(self.hnf, a) is not None

    def __repr__(self):
        return f"QuadIdeal({self.hnf})"


def ideal_from_rows(k: QuadField, rows) -> QuadIdeal:
    h, _ = zg.hermite_normal_form(zg.matrix(rows))
    h = tuple(r for r in h if any(r))
    if len(h) != 2:
        raise ValueError("rows do not span a full lattice")
    return QuadIdeal(k, h)


def ideal_from_gens(k: QuadField, gens) -> QuadIdeal:
    rows = []
    for g in gens:
        rows.append(g)
        rows.append(elem_mul(k, g, (0, 1)))
    return ideal_from_rows(k, rows)


def ring_ideal(k: QuadField) -> QuadIdeal:
    return QuadIdeal(k, zg.identity(2))


def principal_ideal(k: QuadField, g: Elem) -> QuadIdeal:
    if g == (0, 0):
        raise ValueError("zero element")
    return ideal_from_gens(k, [g])


def ideal_mul(a: QuadIdeal, b: QuadIdeal) -> QuadIdeal:
    k = a.k
    rows = [elem_mul(k, r, s) for r in a.hnf for s in b.hnf]
    return ideal_from_rows(k, rows)


def ideal_pow(a: QuadIdeal, n: int) -> QuadIdeal:
    r = ring_ideal(a.k)
    while n:
        if n & 1:
            r = ideal_mul(r, a)
        a = ideal_mul(a, a)
        n >>= 1
    return r


def ideal_norm(a: QuadIdeal) -> int:
    return a.norm


# -- prime splitting ---------------------------------------------------------

@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    e: int
    f: int
    two_elt: tuple[int, Elem]
    ideal: QuadIdeal

    @property
    def norm(self) -> int:
        return self.p**self.f

    @property
    def hnf(self) -> zg.Matrix:
        return self.ideal.hnf

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, alpha={self.two_elt[1]})"


def _omega_minpoly_mod(k: QuadField, p: int) -> list[int]:
    # x^2 - t x - u
    return [(-k.u) % p, (-k.t) % p, 1]


def split_prime(k: QuadField, p: int) -> list[PrimeIdeal]:
    """Prime ideals above p with product (p), sorted canonically."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    sym = kronecker(k.disc, p)
    out = []
    if sym == -1:
        ideal = ideal_from_gens(k, [(p, 0)])
        out.append(PrimeIdeal(p, 1, 2, (p, (p, 0)), ideal))
    else:
        roots = [r for r in range(p) if (r * r - k.t * r - k.u) % p == 0]
        e = 2 if sym == 0 else 1
        if sym == 0 and not roots:
            raise AssertionError("ramified prime must have a root mod p")
        seen = set()
        for r in sorted(roots):
            alpha: Elem = (-r, 1)  # w - r
            ideal = ideal_from_gens(k, [(p, 0), alpha])
            if ideal.hnf in seen:
                continue
            seen.add(ideal.hnf)
            # second generator doubles as a uniformizer: force v_P = 1
            sq = ideal_mul(ideal, ideal)
            if alpha in sq:
                alpha = (alpha[0] + p, alpha[1])
                assert alpha not in sq
            out.append(PrimeIdeal(p, e, 1, (p, alpha), ideal))
    prod = ring_ideal(k)
    for pr in out:
        prod = ideal_mul(prod, ideal_pow(pr.ideal, pr.e))
    assert prod.hnf == ideal_from_gens(k, [(p, 0)]).hnf, "splitting failed product check"
    assert sum(pr.e * pr.f for pr in out) == 2
    return sorted(out, key=lambda pr: (pr.f, pr.two_elt[1]))


def valuation_at(pr: PrimeIdeal, a: Elem) -> int:
    """v_P(a) for a nonzero integral element, by membership ladder."""
    if a == (0, 0):
        raise ValueError("valuation of zero")
    v = 0
    power = pr.ideal
    while a in power:
        v += 1
        power = ideal_mul(power, pr.ideal)
    return v


# -- class number by reduced forms -------------------------------------------

@lru_cache(maxsize=None)
def class_number(k: QuadField) -> int:
    """Wide (ordinary) class number, by reduced form counting.

    Independent of the relation machinery: for D < 0 reduced forms are
    counted directly; for D > 0 reduced indefinite forms are grouped into
    rho-cycles (narrow classes) and corrected by the fundamental unit
    norm.
    """
    D = k.disc
    if abs(D) > 10**7:
        raise ResourceError(f"|disc| = {abs(D)} above class-number bound 1e7")
    if D < 0:
        count = 0
        b = D % 2
        while b * b <= abs(D) // 3:
            m = (b * b - D) // 4
            a = max(b, 1)
            while a * a <= m:
                if a and m % a == 0:
                    c = m // a
                    if a <= c:
                        if b == 0 or a == b or a == c:
                            count += 1  # ambiguous-boundary: only +b
                        else:
                            count += 2  # +-b
                a += 1
            b += 2
        return count
    # D > 0: narrow classes are cycles of reduced forms.
    forms = set()
    s = isqrt(D)
    for b in range(1, s + 1):
        if (D - b * b) % 4:
            continue
        m = (D - b * b) // 4  # = |a*c| with a*c < 0
        a = 1
        while a * a <= m:
            if m % a == 0:
                for aa in {a, m // a}:
                    for asgn in (aa, -aa):
                        c = (b * b - D) // (4 * asgn)
                        if _is_reduced_pos(D, asgn, b, c):
                            forms.add((asgn, b, c))
            a += 1
    cycles = 0
    todo = set(forms)
    while todo:
        f = todo.pop()
        cycles += 1
        g = _rho(D, f)
        while g != f:
            todo.discard(g)
            g = _rho(D, g)
    h_narrow = cycles
    eps = fundamental_unit(k)
    if eps.norm == -1:
        return h_narrow
    assert h_narrow % 2 == 0, "narrow class number must be even when N(eps)=1"
    return h_narrow // 2


def _is_reduced_pos(D: int, a: int, b: int, c: int) -> bool:
    """Reduced indefinite form: 0 < b < sqrt(D) and
    |sqrt(D) - 2|a|| < b, all tests exact (D is never a square)."""
    if b <= 0 or b * b >= D:
        return False
    x = 2 * abs(a)
    # sqrt(D) < x + b  and  x - b < sqrt(D)
    if (x + b) * (x + b) <= D:
        return False
    if x > b and (x - b) * (x - b) >= D:
        return False
    return True


def _rho(D: int, form: tuple[int, int, int]) -> tuple[int, int, int]:
    """Reduction/cycle step for indefinite forms."""
    a, b, c = form
    s = isqrt(D)
    ac = abs(c)
    # b' = -b mod 2|c|, chosen in the standard window
    if ac > s:
        lo, hi = -ac, ac  # |b'| <= |c|
        base = (-b) % (2 * ac)
        b2 = base if base <= ac else base - 2 * ac
    else:
        base = (-b) % (2 * ac)
        b2 = base + ((s - base) // (2 * ac)) * (2 * ac)
    c2 = (b2 * b2 - D) // (4 * c)
    return (c, b2, c2)


# -- fundamental unit --------------------------------------------------------

@dataclass(frozen=True)
class UnitData:
    fundamental_unit: Elem | None
    norm: int
    torsion_order: int
    torsion_generator: Elem


@lru_cache(maxsize=None)
def fundamental_unit(k: QuadField) -> UnitData:
    """Smallest unit > 1 via the continued fraction of w (d > 0)."""
    if k.d < 0:
        if k.d == -1:
            return UnitData(None, 0, 4, (0, 1))
        if k.d == -3:
            return UnitData(None, 0, 6, (0, 1))
        return UnitData(None, 0, 2, (-1, 0))
    d = k.d
    # surd state: alpha = (P + sqrt(d)) / Q
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    sq = isqrt(d)
    seen = {}
    steps = []
    state = (P, Q)
    idx = 0
    while state not in seen:
        seen[state] = idx
        P, Q = state
        assert Q > 0 and (d - P * P) % Q == 0
        a = (P + sq) // Q  # exact floor since d is not a square
        steps.append(a)
        P2 = a * Q - P
        Q2 = (d - P2 * P2) // Q
        state = (P2, Q2)
        idx += 1
    j = seen[state]
    # alpha_j = (a_j + 1/(a_{j+1} + ...)) is fixed by the Moebius map of
    # the periodic block M_{a_j} * ... * M_{a_{k-1}}, M_a = [[a,1],[1,0]].
    A, B, C, Dm = 1, 0, 0, 1
    for a in steps[j:]:
        A, B, C, Dm = A * a + B, A, C * a + Dm, C
    # eps = C*alpha_j + Dm is a unit (Perron); alpha_j = (Pj + sqrt d)/Qj.
    Pj, Qj = next(s for s, i in seen.items() if i == j)
    num0 = C * Pj + Dm * Qj
    num1 = C
    den = Qj
    # on basis {1, w}: sqrt(d) = 2w - 1 for d = 1 mod 4, else w
    if d % 4 == 1:
        x0, x1 = (num0 - num1), 2 * num1
    else:
        x0, x1 = num0, num1
    if x0 % den or x1 % den:
        raise AssertionError("period unit not integral; should not happen")
    eps: Elem = (x0 // den, x1 // den)
    n = elem_norm(k, eps)
    if abs(n) != 1:
        raise AssertionError(f"period element has norm {n}")
    # normalize so the embedding with sqrt(d) > 0 exceeds 1
    for cand in (eps, elem_conj(k, eps)):
        for sgn in (cand, (-cand[0], -cand[1])):
            a2, b2 = 2 * sgn[0] + k.t * sgn[1] - 2, sgn[1]
            if _sign_quad(a2, b2, d) > 0:  # first embedding > 1
                return UnitData(sgn, n, 2, (-1, 0))
    raise AssertionError("no conjugate of the unit exceeds 1")


def _sign_quad(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d) for nonsquare d > 0."""
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1 if (a or b) else 0
    if a * a > b * b * d:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


def units_for_presentation(k: QuadField) -> tuple[Elem, int, list[Elem]]:
    """(torsion generator, torsion order, fundamental units)."""
    ud = fundamental_unit(k)
    fund = [ud.fundamental_unit] if ud.fundamental_unit else []
    return ud.torsion_generator, ud.torsion_order, fund


# -- principal generators ----------------------------------------------------

def _norm_solutions(k: QuadField, n: int, y_bound: int):
    """Solutions (x, y) of N(x + y*w) = n with |y| <= y_bound."""
    t, u = k.t, k.u
    for y in range(-y_bound, y_bound + 1):
        # x^2 + t x y - u y^2 - n = 0
        disc = (t * y) ** 2 + 4 * (u * y * y + n)
        if disc < 0:
            continue
        r = isqrt(disc)
        if r * r != disc:
            continue
        for num in (-t * y + r, -t * y - r):
            if num % 2 == 0:
                yield (num // 2, y)


def principal_generator(k: QuadField, a: QuadIdeal, norm_bound: int = 10**8) -> Elem:
    """Generator of a principal ideal by bounded norm-equation search.

    Chosen totally positive when one exists (d > 0, positive norm).
    Raises NotPrincipal with an exhausted-search certificate, or
    ResourceError above the norm bound.
    """
    n = a.norm
    if n > norm_bound:
        raise ResourceError(
            f"ideal norm {n} exceeds search bound {norm_bound}; raise norm_bound"
        )
    cands = []
    if k.d < 0:
        y_bound = isqrt(4 * n // abs(k.disc)) + 1
        for x, y in _norm_solutions(k, n, y_bound):
            if principal_ideal(k, (x, y)).hnf == a.hnf:
                cands.append((x, y))
    else:
        eps = fundamental_unit(k).fundamental_unit
        emax = max(abs(v) for v in embeddings(k, eps))
        if not math.isfinite(emax):
            raise ResourceError("fundamental unit too large for generator search")
        y_bound = int(2 * math.sqrt(n * emax) / math.sqrt(k.disc)) + 2
        for target in (n, -n):
            for x, y in _norm_solutions(k, target, y_bound):
                if (x, y) != (0, 0) and principal_ideal(k, (x, y)).hnf == a.hnf:
                    cands.append((x, y))
    if not cands:
        raise NotPrincipal(
            f"no generator with |norm| = {n} in the unit fundamental domain; "
            f"ideal class is nontrivial (h = {class_number(k)})"
        )
    for g in cands:
        for cand in (g, (-g[0], -g[1])):
            if is_totally_positive(k, cand):
                return cand
    return cands[0]


# -- class group presentations ------------------------------------------------

@dataclass(frozen=True)
class ClassPresentation:
    """Class group on prime-ideal generators with verified relations.

    Every relation row r has an explicit element gen with
    (gen) = prod ideals[i]^r[i]; rows span the full relation lattice
    (index in Z^k equals the independently counted class number).
    """

    gens: tuple[PrimeIdeal, ...]
    relations: zg.Matrix
    principal_gens: tuple[Elem, ...]
    group: zg.AbGroup


def class_group(k: QuadField) -> tuple[zg.AbGroup, tuple[PrimeIdeal, ...]]:
    pres = class_presentation(k, avoid=1)
    return pres.group, pres.gens


@lru_cache(maxsize=None)
def class_presentation(k: QuadField, avoid: int = 1) -> ClassPresentation:
    """Relation presentation from smooth elements, certified against the
    form-counted class number.  Generators avoid primes dividing `avoid`.
    """
    h = class_number(k)
    if h == 1:
        return ClassPresentation((), (), (), zg.AbGroup())
    # factor base: split/ramified primes of smallest norm, coprime to avoid
    base: list[PrimeIdeal] = []
    p = 1
    bound = max(3 * isqrt(abs(k.disc)), 40)
    while True:
        p = _next_prime(p)
        if p > bound:
            bound *= 2
            if bound > 10**6:
                raise ResourceError("factor base too large")
        if avoid % p == 0:
            continue
        if kronecker(k.disc, p) == -1:
            continue
        base.extend(pr for pr in split_prime(k, p))
        if len(base) >= 10 and p > isqrt(abs(k.disc)) // 2:
            rel = _collect_relations(k, base, h)
            if rel is not None:
                rows, gens_elems = rel
                group = zg.group_from_relations(len(base), rows)
                return ClassPresentation(tuple(base), rows, tuple(gens_elems), group)


def _next_prime(p):
    from .numutil import next_prime

    return next_prime(p)


def _collect_relations(k, base, h):
    """Factor small elements over the base; stop when the relation lattice
    has full rank and index h.  Returns (rows, elements) or None."""
    idx: dict[int, list[tuple[int, PrimeIdeal]]] = {}
    for i, pr in enumerate(base):
        idx.setdefault(pr.p, []).append((i, pr))
    rows: list[tuple[int, ...]] = []
    elems: list[Elem] = []
    seen = set()
    max_c = 4 * isqrt(abs(k.disc)) + 60
    for size in range(1, max_c):
        for x, y in _shell(size):
            if (x, y) in seen or gcd(x, y) != 1:
                continue
            seen.add((x, y))
            n = abs(elem_norm(k, (x, y)))
            if n == 0:
                continue
            fac = _try_factor_over(n, idx)
            if fac is None:
                continue
            row = [0] * len(base)
            for p, exp in fac.items():
                got = 0
                for i, pr in idx[p]:
                    v = valuation_at(pr, (x, y))
                    row[i] = v
                    got += v * pr.f
                assert got == exp, "norm exponent mismatch in relation"
            rows.append(tuple(row))
            elems.append((x, y))
        if len(rows) >= len(base) + 4:
            hmat, _ = zg.hermite_normal_form(zg.matrix(rows))
            nz = [r for r in hmat if any(r)]
            if len(nz) == len(base):
                det = 1
                for i, r in enumerate(nz):
                    det *= r[i]
                if det == h:
                    return zg.matrix(rows), elems
                if det < h:
                    raise AssertionError(
                        f"relation lattice index {det} < h = {h}: "
                        "form count and relations disagree"
                    )
    return None


def _shell(size: int):
    for x in range(-size, size + 1):
        if abs(x) == size:
            yield from ((x, y) for y in range(-size, size + 1))
        else:
            yield (x, size)
            yield (x, -size)


def _try_factor_over(n, idx):
    out = {}
    for p in idx:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    return out if n == 1 else None


def class_number_from_relations(k: QuadField) -> int:
    """Order of the relation-presented group (independent route)."""
    pres = class_presentation(k)
    g = pres.group
    if g.free_rank:
        raise AssertionError("class group presentation has free rank")
    return g.order if not g.is_trivial else 1
