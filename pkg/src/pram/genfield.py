"""General number field backend loaded from a verified fixture document.

A fixture carries the defining polynomial, an integral basis (as
rational polynomials in theta, first element 1), its multiplication
table, discriminant and index, a class-group presentation whose
relations come with explicit principal generators, the unit group, and
optional prime factorizations.  Nothing is trusted: the table is checked
against polynomial arithmetic, disc(P) = index^2 * disc is recomputed,
units must have norm +-1 and the stated torsion order, every class
relation is re-verified as an HNF ideal identity, and prime data must
multiply back to (p).  Rejection is loud and names the violated
invariant.

Element coordinates live on the integral basis; arithmetic goes through
the multiplication table (or a fast power-basis convolution when the
basis is 1, theta, ..., theta^(n-1)), never through the polynomial
quotient ring, so non-monogenic orders work uniformly.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import zabgroup as zg
from .backend import ClassData, Units
from .numutil import factorint, inv_mod, is_prime

Vec = tuple[int, ...]


class FixtureError(ValueError):
    """Fixture verification failure; message names the invariant."""


# -- integer / rational parsing ----------------------------------------------


def _as_int(x, what: str) -> int:
    if isinstance(x, bool):
        raise FixtureError(f"{what}: expected integer, got bool")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x, 10)
        except ValueError:
            raise FixtureError(f"{what}: bad integer literal {x!r}") from None
    raise FixtureError(f"{what}: expected decimal string, got {type(x).__name__}")


def _as_fraction(x, what: str) -> Fraction:
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            if "/" in x:
                num, den = x.split("/")
                return Fraction(int(num, 10), int(den, 10))
            return Fraction(int(x, 10))
        except (ValueError, ZeroDivisionError):
            raise FixtureError(f"{what}: bad rational literal {x!r}") from None
    raise FixtureError(f"{what}: expected rational string")


def _vec(xs, n, what) -> Vec:
    if len(xs) != n:
        raise FixtureError(f"{what}: expected {n} coordinates, got {len(xs)}")
    return tuple(_as_int(x, what) for x in xs)


# -- polynomial helpers (dense, ascending coefficients) ------------------------


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_mod_p(a, p):
    return [c % p for c in a]


def poly_divmod_p(a, b, p):
    a = a[:]
    b = _strip([c % p for c in b])
    inv = inv_mod(b[-1], p)
    q = [0] * max(1, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = (a[i + len(b) - 1] * inv) % p
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % p
    while len(a) > 1 and a[-1] % p == 0:
        a.pop()
    return q, [c % p for c in a]


def _strip(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def poly_gcd_p(a, b, p):
    a = _strip([c % p for c in a])
    b = _strip([c % p for c in b])
    while len(b) > 1 or b[0]:
        _, r = poly_divmod_p(a, b, p)
        a, b = b, _strip(r)
    if len(a) > 1 or a[0]:
        inv = inv_mod(a[-1], p)
        a = [(c * inv) % p for c in a]
    return a


def poly_pow_mod(base, e, mod, p):
    result = [1]
    base = poly_divmod_p(base, mod, p)[1]
    while e:
        if e & 1:
            result = poly_divmod_p(poly_mul(result, base), mod, p)[1]
        base = poly_divmod_p(poly_mul(base, base), mod, p)[1]
        e >>= 1
    return result


def _deg(a):
    d = len(a) - 1
    while d > 0 and a[d] == 0:
        d -= 1
    return d


def factor_poly_mod_p(poly, p, seed: int = 0x5EED) -> list[tuple[list[int], int]]:
    """Cantor-Zassenhaus factorization over F_p, deterministic seed.
    Returns (monic irreducible factor, multiplicity) pairs."""
    f = [c % p for c in poly]
    inv = inv_mod(f[-1], p)
    f = [(c * inv) % p for c in f]
    out: dict[tuple, int] = {}

    def add(g, m):
        key = tuple(g)
        out[key] = out.get(key, 0) + m

    def squarefree_split(g, mult):
        # derivative
        d = [(i * g[i]) % p for i in range(1, len(g))]
        while len(d) > 1 and d[-1] == 0:
            d.pop()
        if not any(d):
            # g = h(x^p); over F_p the p-th root just reindexes coefficients
            root = [g[i] for i in range(0, len(g), p)]
            squarefree_split(root, mult * p)
            return
        c = poly_gcd_p(g, d, p)
        w = poly_divmod_p(g, c, p)[0]
        m = 1
        while _deg(w) > 0:
            y = poly_gcd_p(w, c, p)
            z = poly_divmod_p(w, y, p)[0]
            if _deg(z) > 0:
                for fac in distinct_degree(z):
                    add(fac, m * mult)
            w = y
            c = poly_divmod_p(c, y, p)[0]
            m += 1
        if _deg(c) > 0:
            squarefree_split(c, mult * p)

    def distinct_degree(g):
        facs = []
        h = [0, 1]  # x
        d = 1
        g = g[:]
        while _deg(g) >= 2 * d:
            h = poly_pow_mod(h, p, g, p)
            sub = h[:]
            if len(sub) < 2:
                sub = sub + [0]
            sub[1] = (sub[1] - 1) % p
            gd = poly_gcd_p(g, sub, p)
            if _deg(gd) > 0:
                facs.extend(equal_degree(gd, d))
                g = poly_divmod_p(g, gd, p)[0]
                h = poly_divmod_p(h, g, p)[1] if _deg(g) else h
            d += 1
        if _deg(g) > 0:
            facs.append(g)
        return facs

    def equal_degree(g, d):
        n = _deg(g)
        if n == d:
            return [g]
        rng = random.Random(seed ^ (n << 16) ^ d ^ p)
        while True:
            a = [rng.randrange(p) for _ in range(n)] + [1]
            if p == 2:
                # trace map a + a^2 + ... + a^(2^(d-1)) splits over F_2
                acc = poly_divmod_p(a, g, p)[1]
                t = acc
                for _ in range(d - 1):
                    acc = poly_pow_mod(acc, 2, g, p)
                    t = _poly_add(t, acc, p)
                cand = poly_gcd_p(g, t, p)
            else:
                e = (p**d - 1) // 2
                t = poly_pow_mod(a, e, g, p)
                t = t[:]
                t[0] = (t[0] - 1) % p
                cand = poly_gcd_p(g, t, p)
            if 0 < _deg(cand) < n:
                return equal_degree(cand, d) + equal_degree(
                    poly_divmod_p(g, cand, p)[0], d
                )

    squarefree_split(f, 1)
    return sorted(((list(g), m) for g, m in out.items()), key=lambda t: (len(t[0]), t[0]))


def _poly_add(a, b, p):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)]


# -- the verified field -------------------------------------------------------


@dataclass(frozen=True)
class GPrime:
    p: int
    e: int
    f: int
    two_elt: tuple[int, Vec]
    hnf: zg.Matrix

    @property
    def norm(self) -> int:
        return self.p**self.f

    def __repr__(self):
        return f"GPrime(p={self.p}, e={self.e}, f={self.f})"


class GenBackend:
    """Fixture-backed field exposing the generic backend surface."""

    def __init__(self, doc: dict, source: str = "<dict>"):
        self._doc = doc
        self._source = source
        self._verify_and_build()

    # -- construction ----------------------------------------------------

    def _verify_and_build(self):
        doc = self._doc
        for key in ("poly", "degree", "signature", "disc", "index",
                    "basis_polys", "basis_mul_table", "class_group", "units",
                    "primes"):
            if key not in doc:
                raise FixtureError(f"schema violation: missing key {key!r}")
        self.poly = [_as_int(c, "poly") for c in doc["poly"]]
        n = _as_int(doc["degree"], "degree")
        if len(self.poly) != n + 1 or self.poly[-1] != 1:
            raise FixtureError("schema violation: poly must be monic of the stated degree")
        self.degree = n
        r1, r2 = (_as_int(x, "signature") for x in doc["signature"])
        if r1 + 2 * r2 != n or r1 < 0 or r2 < 0:
            raise FixtureError(f"signature ({r1},{r2}) inconsistent with degree {n}")
        self.signature = (r1, r2)
        self.disc = _as_int(doc["disc"], "disc")
        self.index = _as_int(doc["index"], "index")
        self.basis_polys = [
            [_as_fraction(c, "basis_polys") for c in row] for row in doc["basis_polys"]
        ]
        if len(self.basis_polys) != n:
            raise FixtureError("basis_polys must have n rows")
        if [c for c in self.basis_polys[0] if c] != [Fraction(1)]:
            raise FixtureError("first basis element must be 1")
        tab = doc["basis_mul_table"]
        if len(tab) != n or any(len(r) != n for r in tab):
            raise FixtureError("basis_mul_table must be n x n x n")
        self.table = tuple(
            tuple(_vec(tab[i][j], n, "mul table") for j in range(n)) for i in range(n)
        )
        self._power_basis = all(
            self.basis_polys[i] == [Fraction(0)] * i + [Fraction(1)]
            for i in range(n)
        )
        if self._power_basis:
            self._red_rows = self._power_reduction_rows()
        self._check_table()
        self._check_disc_index()
        self._build_units(doc["units"])
        self._build_class(doc["class_group"])
        self._build_primes(doc["primes"])

    def _power_reduction_rows(self):
        """coords of theta^(n+i) for i < n-1 on the power basis."""
        n = self.degree
        rows = []
        cur = [-c for c in self.poly[:-1]]  # theta^n
        rows.append(tuple(cur))
        for _ in range(n - 2):
            cur = [0] + cur
            top = cur.pop()  # coefficient of theta^n
            cur = [c - top * self.poly[i] for i, c in enumerate(cur)]
            rows.append(tuple(cur))
        return rows

    def _theta_poly_of_basis_product(self, i, j):
        """b_i * b_j as a rational polynomial in theta, reduced mod P."""
        prod = [Fraction(0)] * (2 * self.degree)
        for a, ca in enumerate(self.basis_polys[i]):
            if ca:
                for b, cb in enumerate(self.basis_polys[j]):
                    if cb:
                        prod[a + b] += ca * cb
        # reduce by monic P with rational arithmetic
        for top in range(len(prod) - 1, self.degree - 1, -1):
            c = prod[top]
            if c:
                prod[top] = Fraction(0)
                for t, pc in enumerate(self.poly[:-1]):
                    prod[top - self.degree + t] -= c * pc
        return prod[: self.degree]

    def _check_table(self):
        n = self.degree
        pairs = [(i, j) for i in range(n) for j in range(i, n)]
        if len(pairs) > 400:  # exhaustive for n <= ~27, sampled beyond
            pairs = random.Random(0xC0FFEE).sample(pairs, 400)
        for i, j in pairs:
            want = self._theta_poly_of_basis_product(i, j)
            got = [Fraction(0)] * n
            for t, c in enumerate(self.table[i][j]):
                if c:
                    for s, bc in enumerate(self.basis_polys[t]):
                        got[s] += c * bc
            if want != got:
                raise FixtureError(f"multiplication table inconsistent at ({i},{j})")
            if self.table[i][j] != self.table[j][i]:
                raise FixtureError(f"multiplication table not symmetric at ({i},{j})")

    def _check_disc_index(self):
        dp = _poly_disc(self.poly)
        if dp != self.index**2 * self.disc:
            raise FixtureError(
                f"disc(P) = {dp} != index^2 * disc = {self.index**2 * self.disc}"
            )

    def _build_units(self, u):
        n = self.degree
        fund = [_vec(v, n, "fundamental unit") for v in u["fundamental"]]
        tg = _vec(u["torsion_gen"], n, "torsion generator")
        w = _as_int(u["torsion_order"], "torsion order")
        r1, r2 = self.signature
        if len(fund) != r1 + r2 - 1:
            raise FixtureError(
                f"unit verification failed: {len(fund)} fundamental units, "
                f"signature needs {r1 + r2 - 1}"
            )
        for v in fund + [tg]:
            nv = self.norm(v)
            if abs(nv) != 1:
                raise FixtureError(f"unit verification failed: |N| = {abs(nv)} != 1")
        if w < 1 or self.pow(tg, w) != self.one:
            raise FixtureError("unit verification failed: torsion order wrong")
        for q in factorint(w):
            if self.pow(tg, w // q) == self.one:
                raise FixtureError("unit verification failed: torsion order not exact")
        self._units = Units(tg, w, tuple(fund))

    def _build_class(self, c):
        n = self.degree
        gens = [self._ideal_from_doc(h, "class generator") for h in c["gens_hnf"]]
        rels = zg.matrix([[_as_int(x, "relation") for x in row] for row in c["relations"]]) if c["relations"] else ()
        pgens = [_vec(v, n, "principal generator") for v in c["principal_gens"]]
        if rels and len(pgens) != len(rels):
            raise FixtureError("class group: one principal generator per relation required")
        if rels and (len(rels[0]) != len(gens)):
            raise FixtureError("class group: relation width != generator count")
        for row, gamma in zip(rels, pgens):
            pos = self._ideal_one()
            neg = self._ideal_one()
            for g, m in zip(gens, row):
                if m > 0:
                    pos = self._ideal_mul(pos, self._ideal_pow(g, m))
                elif m < 0:
                    neg = self._ideal_mul(neg, self._ideal_pow(g, -m))
            lhs = pos
            rhs = self._ideal_mul(self._principal_ideal(gamma), neg)
            if lhs != rhs:
                raise FixtureError(
                    "class relation verification failed: (gamma) != prod g^m"
                )
        g = zg.group_from_relations(len(gens), rels)
        if g.free_rank:
            raise FixtureError("class group presentation has free rank")
        self._class_gens = gens
        self._class_rels = rels
        self._class_pgens = pgens
        self._class_order = g.order if gens else 1

    def _build_primes(self, entries):
        n = self.degree
        self._prime_table: dict[int, tuple[GPrime, ...]] = {}
        for ent in entries:
            p = _as_int(ent["p"], "prime")
            ideals = []
            for it in ent["ideals"]:
                e = _as_int(it["e"], "e")
                f = _as_int(it["f"], "f")
                alpha = _vec(it["two_elt"], n, "two_elt")
                hnf = self._ideal_from_doc(it["hnf"], f"prime above {p}")
                ideals.append(GPrime(p, e, f, (p, alpha), hnf))
            self._verify_prime_set(p, ideals)
            self._prime_table[p] = tuple(
                sorted(ideals, key=lambda pr: (pr.f, pr.e, pr.hnf))
            )
        # class generators and principal generators must be coprime to
        # every p the fixture supports
        for p in self._prime_table:
            for g in self._class_gens:
                if _hnf_det(g) % p == 0:
                    raise FixtureError(f"class generator not coprime to p = {p}")
            for gamma in self._class_pgens:
                if self.norm(gamma) % p == 0:
                    raise FixtureError(f"principal generator not coprime to p = {p}")

    def _verify_prime_set(self, p, ideals):
        n = self.degree
        if sum(pr.e * pr.f for pr in ideals) != n:
            raise FixtureError(f"primes above {p}: sum e*f != degree")
        prod = self._ideal_one()
        for pr in ideals:
            if _hnf_det(pr.hnf) != p**pr.f:
                raise FixtureError(f"prime above {p}: norm != p^f")
            if not self._in_ideal(pr.two_elt[1], pr.hnf):
                raise FixtureError(f"prime above {p}: two-element generator outside")
            sq = self._ideal_mul(pr.hnf, pr.hnf)
            if self._in_ideal(pr.two_elt[1], sq):
                raise FixtureError(
                    f"prime above {p}: two-element generator not a uniformizer"
                )
            prod = self._ideal_mul(prod, self._ideal_pow(pr.hnf, pr.e))
        if prod != self._principal_ideal(self.int_elem(p)):
            raise FixtureError(f"primes above {p}: product of P^e != (p)")

    # -- element arithmetic ------------------------------------------------

    @property
    def one(self) -> Vec:
        return (1,) + (0,) * (self.degree - 1)

    def int_elem(self, a: int) -> Vec:
        return (a,) + (0,) * (self.degree - 1)

    def mul(self, x: Vec, y: Vec) -> Vec:
        n = self.degree
        if self._power_basis:
            conv = [0] * (2 * n - 1)
            for i, xi in enumerate(x):
                if xi:
                    for j, yj in enumerate(y):
                        if yj:
                            conv[i + j] += xi * yj
            out = list(conv[:n])
            for i in range(n, 2 * n - 1):
                c = conv[i]
                if c:
                    row = self._red_rows[i - n]
                    for t in range(n):
                        out[t] += c * row[t]
            return tuple(out)
        out = [0] * n
        for i, xi in enumerate(x):
            if xi:
                ti = self.table[i]
                for j, yj in enumerate(y):
                    if yj:
                        row = ti[j]
                        for t in range(n):
                            out[t] += xi * yj * row[t]
        return tuple(out)

    def pow(self, x: Vec, m: int) -> Vec:
        out = self.one
        while m:
            if m & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            m >>= 1
        return out

    def norm(self, x: Vec) -> int:
        cols = [self.mul(x, self._basis_vec(i)) for i in range(self.degree)]
        return zg.det(zg.matrix(cols))

    def _basis_vec(self, i) -> Vec:
        return tuple(1 if j == i else 0 for j in range(self.degree))

    # -- exact ideals -------------------------------------------------------

    def _ideal_one(self) -> zg.Matrix:
        return zg.identity(self.degree)

    def _principal_ideal(self, g: Vec) -> zg.Matrix:
        rows = [self.mul(g, self._basis_vec(i)) for i in range(self.degree)]
        h, _ = zg.hermite_normal_form(zg.matrix(rows))
        return h

    def _ideal_from_doc(self, rows, what) -> zg.Matrix:
        n = self.degree
        mat = zg.matrix([_vec(r, n, what) for r in rows])
        h, _ = zg.hermite_normal_form(mat)
        if len([r for r in h if any(r)]) != n:
            raise FixtureError(f"{what}: lattice not full rank")
        # must be closed under multiplication by every basis element
        for row in h:
            for i in range(1, n):
                if zg.solve_left(h, self.mul(row, self._basis_vec(i))) is None:
                    raise FixtureError(f"{what}: lattice is not an ideal")
        return h

    def _ideal_mul(self, a: zg.Matrix, b: zg.Matrix) -> zg.Matrix:
        rows = [self.mul(x, y) for x in a for y in b]
        h, _ = zg.hermite_normal_form(zg.matrix(rows))
        return h

    def _ideal_pow(self, a: zg.Matrix, m: int) -> zg.Matrix:
        out = self._ideal_one()
        while m:
            if m & 1:
                out = self._ideal_mul(out, a)
            a = self._ideal_mul(a, a)
            m >>= 1
        return out

    def _in_ideal(self, x: Vec, a: zg.Matrix) -> bool:
        return zg.solve_left(a, x) is not None

    # -- backend surface ----------------------------------------------------

    def describe(self) -> str:
        return f"poly={self.poly} sha256={self.content_hash()[:12]}"

    def content_hash(self) -> str:
        blob = json.dumps(self._doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def supports_prime(self, p: int) -> bool:
        return p in self._prime_table or self.index % p != 0

    @lru_cache(maxsize=None)
    def primes_above(self, p: int):
        if p in self._prime_table:
            return self._prime_table[p]
        if self.index % p == 0:
            raise FixtureError(
                f"p = {p} divides the index; factorization must be supplied in fixture"
            )
        return self._factor_by_kummer(p)

    def _factor_by_kummer(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        n = self.degree
        facs = factor_poly_mod_p(self.poly, p)
        theta = self._theta_on_basis(p)
        out = []
        for g, e in facs:
            f = _deg(g)
            # g(theta) on the integral basis, mod p
            acc = self.int_elem(g[0] % p)
            power = self.one
            for c in g[1:]:
                power = tuple(x % p for x in self.mul(power, theta))
                if c % p:
                    acc = tuple((a + (c % p) * b) % p for a, b in zip(acc, power))
            rows = [tuple(p if i == j else 0 for j in range(n)) for i in range(n)]
            rows += [self.mul(acc, self._basis_vec(i)) for i in range(n)]
            h, _ = zg.hermite_normal_form(zg.matrix(rows))
            alpha = acc
            sq = self._ideal_mul(h, h)
            if self._in_ideal(alpha, sq):
                alpha = tuple((a + b) % (p * p) for a, b in zip(alpha, self.int_elem(p)))
                if self._in_ideal(alpha, sq):
                    raise FixtureError(f"no uniformizer found above {p}")
            out.append(GPrime(p, e, f, (p, alpha), h))
        if sum(pr.e * pr.f for pr in out) != n:
            raise FixtureError(f"Kummer-Dedekind above {p}: sum e*f != degree")
        prod = self._ideal_one()
        for pr in out:
            prod = self._ideal_mul(prod, self._ideal_pow(pr.hnf, pr.e))
        if prod != self._principal_ideal(self.int_elem(p)):
            raise FixtureError(f"Kummer-Dedekind above {p}: product != (p)")
        return tuple(sorted(out, key=lambda pr: (pr.f, pr.e, pr.hnf)))

    def _theta_on_basis(self, p: int) -> Vec:
        """Coordinates of theta on the integral basis, valid mod p
        (denominators divide the index, coprime to p here)."""
        n = self.degree
        bmat = [[self.basis_polys[i][j] if j < len(self.basis_polys[i]) else Fraction(0)
                 for j in range(n)] for i in range(n)]
        # solve x * B = e_1 (theta) over Q
        target = [Fraction(1) if j == 1 else Fraction(0) for j in range(n)]
        sol = _solve_fraction(bmat, target)
        out = []
        for c in sol:
            den = c.denominator
            if den % p == 0:
                raise FixtureError("theta coordinates not p-integral")
            out.append((c.numerator * inv_mod(den, p)) % p)
        return tuple(out)

    def valuation(self, x: Vec, pr: GPrime) -> int:
        if not any(x):
            raise ValueError("valuation of zero element")
        v = 0
        power = pr.hnf
        while self._in_ideal(x, power):
            v += 1
            power = self._ideal_mul(power, pr.hnf)
        return v

    def class_data(self, avoid: int) -> ClassData:
        if avoid > 1:
            for g in self._class_gens:
                if gcd(_hnf_det(g), avoid) != 1:
                    raise FixtureError(f"class generators not coprime to {avoid}")
        return ClassData(
            len(self._class_gens),
            self._class_rels,
            tuple(self._class_pgens),
            tuple(_hnf_det(g) for g in self._class_gens),
            self._class_order,
        )

    def units(self) -> Units:
        return self._units


def _hnf_det(h: zg.Matrix) -> int:
    out = 1
    for i in range(len(h)):
        out *= h[i][i]
    return out


def _solve_fraction(a, b):
    """x with x * A = b over Q (A given by rows)."""
    n = len(a)
    # augmented system on A^T: columns of A^T are rows of A
    mt = [[a[j][i] for j in range(n)] + [b[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if mt[r][col]), None)
        if piv is None:
            raise FixtureError("basis matrix singular")
        mt[col], mt[piv] = mt[piv], mt[col]
        inv = Fraction(1) / mt[col][col]
        mt[col] = [c * inv for c in mt[col]]
        for r in range(n):
            if r != col and mt[r][col]:
                f = mt[r][col]
                mt[r] = [c - f * d for c, d in zip(mt[r], mt[col])]
    return [mt[i][n] for i in range(n)]


def _poly_disc(poly) -> int:
    """disc(P) for monic P via the resultant with P' (Sylvester/Bareiss)."""
    n = len(poly) - 1
    dp = [i * poly[i] for i in range(1, n + 1)]
    m = n + (n - 1)
    rows = []
    for i in range(n - 1):
        rows.append([0] * i + list(reversed(poly)) + [0] * (m - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + list(reversed(dp)) + [0] * (m - n - i))
    res = zg.det(zg.matrix(rows))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


def parse_fixture(doc: dict, source: str = "<dict>") -> GenBackend:
    """Verify a fixture document and return the backend; loud rejection."""
    return GenBackend(doc, source)


_cache: dict[str, GenBackend] = {}


def load_fixture(path: str) -> GenBackend:
    with open(path) as fh:
        doc = json.load(fh)
    blob = hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()
    if blob not in _cache:
        _cache[blob] = parse_fixture(doc, source=path)
    return _cache[blob]
