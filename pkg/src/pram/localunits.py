"""Multiplicative structure of (O_K/P^k)^x and (O_K/m)^x.

All arithmetic happens in O_K/p^N on coordinate vectors mod p^N; the
quotient by the capped lattice P^k + p^N O_K is canonically O_K/P^k.
One-units split into shallow layers 1 + pi^j (j <= e/(p-1)) presented by
explicit generators whose p-th powers are peeled into deeper layers, and
a deep part transported by the p-adic logarithm onto the additive
lattice P^j0/P^k.  Every presentation's order is asserted against
q^(k-1)(q-1), so a silent structure error cannot pass.

Elements fed into a local computation are CRT-normalized to be 1 at the
other primes above p; that is what makes the coordinate divisibility
behind series truncation exact (an element with valuation >= e_Q * t at
every prime Q above p has coordinates divisible by p^t).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import zabgroup as zg
from .numutil import factorint, inv_mod, valuation

Vec = tuple[int, ...]


class PrecisionError(Exception):
    """p-adic precision underflow or structure mismatch; never silent."""


class LocalResourceError(Exception):
    pass


def _vmod(x, m) -> Vec:
    return tuple(v % m for v in x)


def _vsub(x, y) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def _vadd(x, y) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def _red(x: Vec, lat: zg.Matrix) -> Vec:
    """Canonical representative of x modulo an upper-triangular full-rank
    row lattice.  Rows are processed top-down: subtracting row i only
    touches columns >= i, so earlier coordinates stay reduced."""
    out = list(x)
    n = len(out)
    for i in range(n):
        q = out[i] // lat[i][i]
        if q:
            for j in range(i, n):
                out[j] -= q * lat[i][j]
    return tuple(out)


def _coords_mod(target: Vec, gens: list, mod_rows) -> Vec | None:
    """Integer x with sum x_i gens[i] = target modulo span(mod_rows)."""
    rows = list(gens) + list(mod_rows)
    sol = zg.solve_left(zg.matrix(rows), tuple(target))
    return None if sol is None else sol[: len(gens)]


def _maxv(i: int, p: int) -> int:
    v = 0
    while p ** (v + 1) <= i:
        v += 1
    return v


@lru_cache(maxsize=None)
def _log_imax(kv: int, j0: int, e: int, p: int) -> int:
    """Largest series index i with i*j0 - e*v_p(i) < kv."""
    cap = (kv + e * 66) // j0 + 2
    imax = 1
    for i in range(1, cap + 1):
        v = valuation(i, p) if i % p == 0 else 0
        if i * j0 - e * v < kv:
            imax = i
    return imax


class ResidueRing:
    """O_K / p^N together with capped lattices P^j + p^N O_K.

    `levels` maps primes above p (frozen dataclasses; equality-keyed) to
    the exponent k at which their unit groups will be read.  N is sized
    so that every logarithm needed at those levels stays exact.
    """

    def __init__(self, F, p: int, levels: dict, guard: int = 2):
        self.F = F
        self.p = p
        self.primes = tuple(F.primes_above(p))
        self.levels = {}
        for pr in self.primes:
            self.levels[pr] = 0
        for pr, k in levels.items():
            if pr not in self.levels:
                raise ValueError("level given for a prime not above p")
            self.levels[pr] = k
        need = 1
        for pr in self.primes:
            k = self.levels[pr]
            if k:
                j0 = pr.e // (p - 1) + 1
                imax = _log_imax(k + pr.e + 1, j0, pr.e, p)
                need = max(need, -(-k // pr.e) + _maxv(imax, p) + guard)
        self.N = need
        self.pN = p**self.N
        self._lat: dict = {}
        self._idem: dict = {}

    @property
    def n(self) -> int:
        return self.F.degree

    @property
    def one(self) -> Vec:
        return (1,) + (0,) * (self.n - 1)

    def mul(self, x: Vec, y: Vec) -> Vec:
        return _vmod(self.F.mul(x, y), self.pN)

    def pow(self, x: Vec, m: int) -> Vec:
        if m < 0:
            x, m = self.inv(x), -m
        r = self.one
        x = _vmod(x, self.pN)
        while m:
            if m & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            m >>= 1
        return r

    def inv(self, x: Vec) -> Vec:
        n = self.n
        basis = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
        cols = [self.mul(x, e) for e in basis]
        return _solve_mod_pn(cols, self.one, self.p, self.pN)

    # capped ideal lattices ---------------------------------------------

    def lat(self, pr, j: int) -> zg.Matrix:
        key = (pr, j)
        if key not in self._lat:
            if j == 0:
                out = zg.identity(self.n)
            elif j == 1:
                out = zg.hnf_mod(zg.matrix([tuple(r) for r in pr.hnf]), self.pN)
            else:
                half = self.lat(pr, j // 2)
                out = self._lat_mul(half, half)
                if j % 2:
                    out = self._lat_mul(out, self.lat(pr, 1))
            self._lat[key] = out
        return self._lat[key]

    def _lat_mul(self, a: zg.Matrix, b: zg.Matrix) -> zg.Matrix:
        return zg.hnf_mod(zg.matrix([self.mul(x, y) for x in a for y in b]), self.pN)

    def in_lat(self, x: Vec, lat: zg.Matrix) -> bool:
        return not any(_red(_vmod(x, self.pN), lat))

    def vP(self, pr, x: Vec, cap: int | None = None) -> int:
        """P-valuation of x (up to the working precision)."""
        if not any(_vmod(x, self.pN)):
            return cap if cap is not None else self.N * pr.e
        hi = cap if cap is not None else self.N * pr.e
        v = 0
        while v < hi and self.in_lat(x, self.lat(pr, v + 1)):
            v += 1
        return v

    def idempotent(self, pr) -> Vec:
        """1 at pr (to level N e), 0 at the other primes above p."""
        if pr not in self._idem:
            a_lat = self.lat(pr, self.N * pr.e)
            b = zg.identity(self.n)
            for q in self.primes:
                if q != pr:
                    b = self._lat_mul(b, self.lat(q, self.N * q.e))
            x = zg.solve_left(zg.matrix(list(a_lat) + list(b)), self.one)
            if x is None:
                raise PrecisionError("lattices above p not comaximal")
            a_part = [0] * self.n
            for c, row in zip(x[: len(a_lat)], a_lat):
                for i in range(self.n):
                    a_part[i] += c * row[i]
            self._idem[pr] = _vmod(_vsub(self.one, tuple(a_part)), self.pN)
        return self._idem[pr]

    def normalize_at(self, pr, x: Vec) -> Vec:
        """x at pr, 1 at the other primes above p."""
        x = _vmod(x, self.pN)
        if len(self.primes) == 1:
            return x
        e = self.idempotent(pr)
        return _vmod(_vadd(self.one, self.mul(e, _vsub(x, self.one))), self.pN)

    def project_at(self, pr, x: Vec) -> Vec:
        """x at pr, 0 at the other primes above p (additive)."""
        x = _vmod(x, self.pN)
        if len(self.primes) == 1:
            return x
        return self.mul(self.idempotent(pr), x)

    def residue(self, pr, k: int, x: Vec) -> Vec:
        return _red(_vmod(x, self.pN), self.lat(pr, k))

    # p-adic logarithm ----------------------------------------------------

    def plog(self, pr, u: Vec, kval: int) -> Vec:
        """log of a normalized one-unit with v_P(u-1) > e/(p-1), exact
        as an element of P^j0 + p^N O known to P-valuation kval."""
        p, e = self.p, pr.e
        j0 = e // (p - 1) + 1
        w = _vmod(_vsub(u, self.one), self.pN)
        if any(w) and not self.in_lat(w, self.lat(pr, j0)):
            raise PrecisionError("log input below the convergence bound")
        imax = _log_imax(kval, j0, e, p)
        if _maxv(imax, p) + -(-kval // e) > self.N:
            raise PrecisionError("ring precision too small for requested log")
        term = self.one
        acc = [0] * self.n
        for i in range(1, imax + 1):
            term = self.mul(term, w)
            v = valuation(i, p) if i % p == 0 else 0
            unit_inv = inv_mod(i // p**v, self.pN)
            sgn = 1 if i % 2 else -1
            pv = p**v
            for t in range(self.n):
                c = term[t]
                if v:
                    if c % pv:
                        raise PrecisionError("log term coordinate not divisible")
                    c //= pv
                acc[t] = (acc[t] + sgn * unit_inv * c) % self.pN
        return tuple(acc)


def _solve_mod_pn(cols: list, b: Vec, p: int, pn: int) -> Vec:
    """Solve sum x_j cols[j] = b mod p^N (requires p-unit pivots)."""
    n = len(b)
    m = len(cols)
    a = [[cols[j][i] % pn for j in range(m)] + [b[i] % pn] for i in range(n)]
    piv_of_col = {}
    used = set()
    for j in range(m):
        piv = next((i for i in range(n) if i not in used and a[i][j] % p), None)
        if piv is None:
            continue
        used.add(piv)
        piv_of_col[j] = piv
        inv = inv_mod(a[piv][j], pn)
        a[piv] = [(v * inv) % pn for v in a[piv]]
        for i in range(n):
            if i != piv and a[i][j]:
                f = a[i][j]
                a[i] = [(v - f * w) % pn for v, w in zip(a[i], a[piv])]
    x = [0] * m
    for j, i in piv_of_col.items():
        x[j] = a[i][m]
    for i in range(n):
        if i not in used and a[i][m] % pn:
            raise PrecisionError("inconsistent linear system mod p^N")
    return tuple(x)


def make_residue_ring(F, p: int, levels, guard: int = 2) -> ResidueRing:
    return ResidueRing(F, p, dict(levels), guard)


# residue field --------------------------------------------------------------


class _ResidueField:
    """F_q = O/P with Pohlig-Hellman discrete logs."""

    BSGS_BOUND = 2**48

    def __init__(self, ring: ResidueRing, pr):
        self.r = ring
        self.pr = pr
        self.lat1 = ring.lat(pr, 1)
        self.q = pr.p**pr.f
        self.one = self.red(ring.one)
        self._fac = factorint(self.q - 1) if self.q > 2 else {}
        if self._fac and max(self._fac) > 10**14:
            raise LocalResourceError(f"q-1 = {self.q-1} not factorable at desk scale")
        self.gen = self._find_generator()

    def red(self, x: Vec) -> Vec:
        return _red(_vmod(x, self.r.pN), self.lat1)

    def mul(self, x, y):
        return self.red(self.r.mul(x, y))

    def pow(self, x, m):
        out = self.one
        x = self.red(x)
        m %= self.q - 1 if self.q > 2 else 1
        while m:
            if m & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            m >>= 1
        return out

    def _candidates(self):
        p, n = self.r.p, self.r.n
        t = 1
        while True:
            digits, v = [], t
            while v:
                digits.append(v % p)
                v //= p
            yield tuple((digits + [0] * n)[:n])
            t += 1

    def _find_generator(self) -> Vec:
        if self.q == 2:
            return self.one
        for cand in self._candidates():
            c = self.red(cand)
            if not any(c):
                continue
            if all(self.pow(c, (self.q - 1) // l) != self.one for l in self._fac):
                return c

    def dlog(self, x: Vec) -> int:
        if self.q == 2:
            return 0
        x = self.red(x)
        if not any(x):
            raise ValueError("residue dlog of a non-unit")
        nn = self.q - 1
        r_all, m_all = 0, 1
        for l, e in self._fac.items():
            le = l**e
            g_l = self.pow(self.gen, nn // le)
            x_l = self.pow(x, nn // le)
            r_l = self._dlog_pp(g_l, x_l, l, e, le)
            g, s, _ = _xgcd(m_all, le)
            r_all = (r_all + m_all * ((s * (r_l - r_all)) % le)) % (m_all * le)
            m_all *= le
        return r_all

    def _dlog_pp(self, g, x, l, e, le):
        r = 0
        gamma = self.pow(g, l ** (e - 1))
        for i in range(e):
            h = self.pow(self.mul(x, self.pow(g, le - (r % le))), l ** (e - 1 - i))
            r += self._bsgs(gamma, h, l) * l**i
        return r

    def _bsgs(self, g, h, order):
        if order > self.BSGS_BOUND:
            raise LocalResourceError(f"BSGS bound exceeded for order {order}")
        m = int(order**0.5) + 1
        table = {}
        cur = self.one
        for j in range(m):
            table.setdefault(cur, j)
            cur = self.mul(cur, g)
        step = self.pow(g, (self.q - 1) - (m % (self.q - 1)))
        cur = h
        for i in range(m + 1):
            if cur in table:
                return (i * m + table[cur]) % order
            cur = self.mul(cur, step)
        raise ValueError("bsgs: element outside the subgroup")


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


# one-unit groups -------------------------------------------------------------


class _OneUnits:
    """U^1/U^k presented on shallow layer generators and the log-deep part."""

    def __init__(self, ring: ResidueRing, pr, k: int, fq: _ResidueField):
        self.r = ring
        self.pr = pr
        self.k = k
        self.fq = fq
        p, e, f = ring.p, pr.e, pr.f
        true_j0 = e // (p - 1) + 1
        self.j0 = min(true_j0, k)
        self.has_deep = true_j0 < k
        self.latk = ring.lat(pr, k)
        r = ring
        self.pi = r.normalize_at(pr, pr.two_elt[1])
        if r.vP(pr, self.pi, cap=2) != 1:
            raise PrecisionError("two-element generator is not a uniformizer")
        basis = [r.one]
        for _ in range(f - 1):
            basis.append(r.mul(basis[-1], fq.gen))
        self.res_basis = basis
        self.shallow: list[tuple[tuple[int, int], Vec]] = []
        pij = r.one
        for j in range(1, self.j0):
            pij = r.mul(pij, self.pi)
            for t in range(f):
                g = _vmod(_vadd(r.one, r.mul(pij, basis[t])), r.pN)
                self.shallow.append(((j, t), r.normalize_at(pr, g)))
        self.deep: list[Vec] = []
        self.mlog: list[Vec] = []
        if self.has_deep:
            for w in ring.lat(pr, self.j0):
                wn = r.project_at(pr, w)
                self.deep.append(_vmod(_vadd(r.one, wn), r.pN))
            self.mlog = [r.plog(pr, g, k + e + 1) for g in self.deep]
        self.gens = [g for _, g in self.shallow] + self.deep
        self.rows = self._presentation()
        self.group = zg.group_from_relations(len(self.gens), zg.matrix(self.rows))
        want = p ** (f * (k - 1))
        if (self.group.order or 0) != want:
            raise PrecisionError(
                f"one-unit presentation order {self.group.order} != {want}"
            )

    def _layer_coords(self, x: Vec, j: int) -> list[int]:
        r = self.r
        pij = r.one
        for _ in range(j):
            pij = r.mul(pij, self.pi)
        rows = [r.mul(pij, b) for b in self.res_basis]
        sol = _coords_mod(x, rows, self.r.lat(self.pr, j + 1))
        if sol is None:
            raise PrecisionError(f"element not spanned at layer {j}")
        return [c % r.p for c in sol]

    def _peel(self, u: Vec, j_start: int) -> list[tuple[int, int]]:
        """Express a one-unit of level >= j_start over the generators."""
        r = self.r
        f = self.pr.f
        out = []
        u = r.normalize_at(self.pr, u)
        for j in range(j_start, self.j0):
            w = _vsub(u, r.one)
            if r.in_lat(w, r.lat(self.pr, j + 1)):
                continue
            for t, c in enumerate(self._layer_coords(w, j)):
                if c:
                    idx = (j - 1) * f + t
                    u = r.mul(u, r.pow(r.inv(self.gens[idx]), c))
                    out.append((idx, c))
        if self.has_deep:
            x = r.plog(self.pr, u, self.k + self.pr.e + 1)
            sol = _coords_mod(x, self.mlog, self.latk)
            if sol is None:
                raise PrecisionError("deep part outside the log lattice")
            base = len(self.shallow)
            out.extend((base + i, c) for i, c in enumerate(sol) if c)
        else:
            if not r.in_lat(_vsub(u, r.one), self.latk):
                raise PrecisionError("peel failed to exhaust the unit")
        return out

    def dlog(self, u: Vec) -> list[int]:
        out = [0] * len(self.gens)
        for idx, c in self._peel(u, 1):
            out[idx] += c
        return out

    def _presentation(self):
        rows = []
        width = len(self.gens)
        for i, ((j, t), g) in enumerate(self.shallow):
            gp = self.r.pow(g, self.r.p)
            row = [0] * width
            row[i] = self.r.p
            for idx, c in self._peel(gp, j + 1):
                row[idx] -= c
            rows.append(tuple(row))
        if self.has_deep:
            stacked = zg.matrix(list(self.mlog) + list(self.latk))
            base = len(self.shallow)
            for kr in zg.left_kernel(stacked):
                take = kr[: len(self.deep)]
                if any(take):
                    row = [0] * width
                    for idx, c in enumerate(take):
                        row[base + idx] = c
                    rows.append(tuple(row))
        return rows


@dataclass
class LocalUnitGroup:
    """(O/P^k)^x = Teichmueller part (order q-1) x one-units."""

    ring: ResidueRing
    prime: object
    k: int
    q: int
    teich_gen: Vec
    one_unit_gens: list
    structure: zg.AbGroup
    _one: _OneUnits = field(repr=False, default=None)
    _fq: _ResidueField = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return (self.q - 1) * self.q ** (self.k - 1)

    @property
    def rows(self) -> zg.Matrix:
        out = [(self.q - 1,) + (0,) * len(self.one_unit_gens)]
        out.extend((0,) + tuple(r) for r in self._one.rows)
        return zg.matrix(out)

    def dlog(self, u: Vec) -> Vec:
        r = self.ring
        un = r.normalize_at(self.prime, u)
        a = self._fq.dlog(un)
        rest = r.mul(un, r.pow(r.inv(self.teich_gen), a))
        return (a,) + tuple(self._one.dlog(rest))

    def one_unit_part_dlog(self, u: Vec) -> list[int]:
        """dlog over one-unit generators of the one-unit component of u,
        without any residue-field discrete log (used by the p-primary
        ray path: u^((q-1)s) with (q-1)s = 1 mod p^L kills the
        Teichmueller part and fixes the one-unit part)."""
        r = self.ring
        un = r.normalize_at(self.prime, u)
        L = self.prime.f * (self.k - 1) + 1
        s = inv_mod(self.q - 1, r.p**L)
        u1 = r.pow(un, (self.q - 1) * s)
        return self._one.dlog(u1)

    def recompose(self, exps) -> Vec:
        r = self.ring
        out = r.pow(self.teich_gen, exps[0])
        for g, e in zip(self.one_unit_gens, exps[1:]):
            out = r.mul(out, r.pow(g, e))
        return r.residue(self.prime, self.k, out)


def local_unit_group(ring: ResidueRing, pr, k: int) -> LocalUnitGroup:
    if k < 1:
        raise ValueError("k must be >= 1")
    fq = _ResidueField(ring, pr)
    one = _OneUnits(ring, pr, k, fq)
    q = pr.p**pr.f
    t = ring.normalize_at(pr, fq.gen)
    for _ in range(2 * k + 6):
        t2 = ring.pow(t, q)
        if ring.residue(pr, k, t2) == ring.residue(pr, k, t):
            break
        t = t2
    else:
        raise PrecisionError("Teichmueller lift did not stabilize")
    gens = [t] + one.gens
    rows = [(q - 1,) + (0,) * len(one.gens)]
    rows.extend((0,) + tuple(r) for r in one.rows)
    group = zg.group_from_relations(len(gens), zg.matrix(rows))
    lug = LocalUnitGroup(ring, pr, k, q, t, one.gens, group, one, fq)
    if group.order != lug.order:
        raise PrecisionError(f"local group order {group.order} != {lug.order}")
    return lug


def teichmueller_generator(ring: ResidueRing, pr, k: int) -> Vec:
    return local_unit_group(ring, pr, k).teich_gen


def padic_log(ring: ResidueRing, pr, u: Vec, precision: int) -> Vec:
    """log of a one-unit at pr to P-valuation `precision`.

    Inputs with 1 <= v_P(u-1) <= e/(p-1) are handled through u^(p^s);
    if the true logarithm is not integral at P the division fails loudly.
    """
    r = ring
    un = r.normalize_at(pr, u)
    w = _vsub(un, r.one)
    if not any(_vmod(w, r.pN)):
        return (0,) * r.n
    if not r.in_lat(w, r.lat(pr, 1)):
        raise ValueError("log requires v_P(u-1) >= 1")
    j0 = pr.e // (r.p - 1) + 1
    s = 0
    while not r.in_lat(_vsub(un, r.one), r.lat(pr, j0)):
        un = r.pow(un, r.p)
        s += 1
        if s > 8 * pr.e + 8:
            raise PrecisionError("one-unit did not deepen under p-powers")
    out = r.plog(pr, un, precision + s * pr.e)
    if s:
        ps = r.p**s
        lifted = []
        for c in out:
            if c % ps:
                raise PrecisionError("logarithm not integral at P")
            lifted.append(c // ps)
        out = tuple(lifted)
    return _vmod(out, r.pN)


def padic_exp(ring: ResidueRing, pr, x: Vec, precision: int) -> Vec:
    """exp of x with v_P(x) > e/(p-1), accurate to P-valuation
    `precision`."""
    r, p, e = ring, ring.p, pr.e
    j0 = e // (p - 1) + 1
    xn = r.project_at(pr, x)
    if any(xn) and not r.in_lat(xn, r.lat(pr, j0)):
        raise ValueError("exp requires v_P(x) > e/(p-1)")
    denom_gap = j0 * (p - 1) - e  # >= 1
    i_stop = -(-precision * (p - 1) // denom_gap) + 2
    fact_v = 0
    # total division by p^{v_p(i!)} must stay within precision
    vmax = (i_stop - 1) // (p - 1) + 1
    if vmax + -(-precision // e) > r.N:
        raise PrecisionError("ring precision too small for requested exp")
    acc = r.one
    term = r.one
    den_unit = 1
    for i in range(1, i_stop + 1):
        term = r.mul(term, xn)
        vi = valuation(i, p) if i % p == 0 else 0
        fact_v += vi
        den_unit = (den_unit * (i // p**vi)) % r.pN
        pv = p**fact_v
        c_inv = inv_mod(den_unit, r.pN)
        add = []
        for c in term:
            if fact_v:
                if c % pv:
                    raise PrecisionError("exp term coordinate not divisible")
                c //= pv
            add.append(c * c_inv)
        acc = _vmod(_vadd(acc, tuple(add)), r.pN)
    return acc


def dlog(group: LocalUnitGroup, u: Vec) -> Vec:
    return group.dlog(u)


@dataclass
class RingUnits:
    """(O/m)^x as a CRT product of the local groups of its primes."""

    ring: ResidueRing
    locals: list[LocalUnitGroup]
    group: zg.AbGroup
    gens: list[Vec]
    rows: zg.Matrix

    def dlog(self, u: Vec) -> Vec:
        out = []
        for lg in self.locals:
            out.extend(lg.dlog(u))
        return tuple(out)

    @property
    def order(self) -> int:
        n = 1
        for lg in self.locals:
            n *= lg.order
        return n


def ring_unit_group(ring: ResidueRing) -> RingUnits:
    locs = [
        local_unit_group(ring, pr, ring.levels[pr])
        for pr in ring.primes
        if ring.levels[pr]
    ]
    gens: list[Vec] = []
    rows = []
    total = sum(1 + len(lg.one_unit_gens) for lg in locs)
    pos = 0
    for lg in locs:
        width = 1 + len(lg.one_unit_gens)
        gens.append(lg.teich_gen)
        gens.extend(lg.one_unit_gens)
        for row in lg.rows:
            rows.append((0,) * pos + tuple(row) + (0,) * (total - pos - width))
        pos += width
    group = zg.group_from_relations(total, zg.matrix(rows))
    units = RingUnits(ring, locs, group, gens, zg.matrix(rows) if rows else ())
    if group.order != units.order:
        raise PrecisionError("CRT unit group order mismatch")
    return units
