"""Native number-field engine: the built-in stand-in for a CAS.

Maximal orders and prime decompositions come from sympy (round_two /
prime_decomp); everything downstream is computed here: torsion units by
exact lattice enumeration, class-group relations by smooth-element
search over a factor base that is proven to generate (every prime ideal
below the Minkowski bound is explicitly eliminated into the base), units
from the relation kernel reduced on the logarithmic lattice, and the
whole (h, R) output certified against the analytic class number formula
truncated Euler product.  A certificate failure raises; nothing is
emitted on a guess.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from sympy import Poly, QQ, Rational
from sympy.abc import x as _x
from sympy.polys.numberfields.basis import round_two
from sympy.polys.numberfields.primes import prime_decomp

from pram import zabgroup as zg
from pram.numutil import factorint, is_prime, primes_in

Vec = tuple[int, ...]


class EngineError(Exception):
    pass


@dataclass(frozen=True)
class FBPrime:
    p: int
    e: int
    f: int
    alpha: Vec
    hnf: zg.Matrix

    @property
    def norm(self):
        return self.p**self.f


class NumberField:
    """Exact arithmetic over the maximal order of Q[x]/(P)."""

    def __init__(self, coeffs: list[int]):
        if coeffs[-1] != 1:
            raise EngineError("polynomial must be monic")
        self.poly = [int(c) for c in coeffs]
        self.n = len(coeffs) - 1
        T = Poly([Rational(c) for c in reversed(self.poly)], _x, domain=QQ)
        if not T.is_irreducible:
            raise EngineError("polynomial is reducible")
        self.T = T
        ZK, dK = round_two(T)
        self.disc = int(dK)
        B = ZK.QQ_matrix.to_field().rep.to_ddm()  # rows over QQ (mpq entries)
        self.basis_polys = [
            [Fraction(int(B[i][j].numerator), int(B[i][j].denominator))
             for i in range(self.n)]
            for j in range(self.n)
        ]  # column j of the matrix = basis element j on the power basis
        det = _fraction_det([[self.basis_polys[j][i] for j in range(self.n)]
                             for i in range(self.n)])
        self.index = abs(Fraction(1) / det)
        if self.index.denominator != 1:
            raise EngineError("index is not an integer")
        self.index = int(self.index)
        r1 = T.count_roots()
        self.signature = (r1, (self.n - r1) // 2)
        self.table = self._build_table()
        self._emb = None
        self._prime_cache: dict[int, tuple[FBPrime, ...]] = {}
        self._power_cache: dict = {}

    # -- construction helpers --------------------------------------------

    def _reduce_theta_poly(self, prod: list[Fraction]) -> list[Fraction]:
        n = self.n
        prod = prod + [Fraction(0)] * max(0, 2 * n - 1 - len(prod))
        for top in range(len(prod) - 1, n - 1, -1):
            c = prod[top]
            if c:
                prod[top] = Fraction(0)
                for t in range(n):
                    prod[top - n + t] -= c * self.poly[t]
        return prod[:n]

    def _coords_on_basis(self, theta_poly: list[Fraction]) -> Vec:
        sol = _fraction_solve(
            [[self.basis_polys[i][j] for j in range(self.n)] for i in range(self.n)],
            theta_poly,
        )
        out = []
        for c in sol:
            if c.denominator != 1:
                raise EngineError("element not integral on the basis")
            out.append(int(c))
        return tuple(out)

    def _build_table(self):
        n = self.n
        tab = []
        for i in range(n):
            row = []
            for j in range(n):
                if j < i:
                    row.append(tab[j][i])
                    continue
                prod = [Fraction(0)] * (2 * n - 1)
                for a, ca in enumerate(self.basis_polys[i]):
                    if ca:
                        for b, cb in enumerate(self.basis_polys[j]):
                            if cb:
                                prod[a + b] += ca * cb
                row.append(self._coords_on_basis(self._reduce_theta_poly(prod)))
            tab.append(row)
        return tuple(tuple(r) for r in tab)

    # -- arithmetic ---------------------------------------------------------

    @property
    def one(self) -> Vec:
        return (1,) + (0,) * (self.n - 1)

    def int_elem(self, a: int) -> Vec:
        return (a,) + (0,) * (self.n - 1)

    def basis_vec(self, i: int) -> Vec:
        return tuple(1 if j == i else 0 for j in range(self.n))

    def mul(self, a: Vec, b: Vec) -> Vec:
        n = self.n
        out = [0] * n
        for i, ai in enumerate(a):
            if ai:
                ti = self.table[i]
                for j, bj in enumerate(b):
                    if bj:
                        row = ti[j]
                        c = ai * bj
                        for t in range(n):
                            out[t] += c * row[t]
        return tuple(out)

    def pow(self, a: Vec, m: int) -> Vec:
        out = self.one
        while m:
            if m & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            m >>= 1
        return out

    def norm(self, a: Vec) -> int:
        cols = [self.mul(a, self.basis_vec(i)) for i in range(self.n)]
        return zg.det(zg.matrix(cols))

    # -- embeddings -----------------------------------------------------------

    def embeddings(self, prec: int = 80):
        """Rows: per basis element, the real embedding coordinates
        (complex places contribute re*sqrt2, im*sqrt2)."""
        if self._emb is None or self._emb[0] < prec:
            mpmath.mp.dps = prec
            roots = mpmath.polyroots([mpmath.mpf(c) for c in reversed(self.poly)],
                                     maxsteps=200, extraprec=120)
            reals = sorted([r.real for r in roots if abs(r.imag) < mpmath.mpf(10) ** (-prec // 2)])
            comps = [r for r in roots if r.imag > mpmath.mpf(10) ** (-prec // 2)]
            comps.sort(key=lambda z: (float(z.real), float(z.imag)))
            if len(reals) != self.signature[0] or 2 * len(comps) != 2 * self.signature[1]:
                raise EngineError("embedding classification failed")
            places = [("r", r) for r in reals] + [("c", z) for z in comps]
            rows = []
            s2 = mpmath.sqrt(2)
            for i in range(self.n):
                vals = []
                for kind, z in places:
                    v = _eval_fraction_poly(self.basis_polys[i], z)
                    if kind == "r":
                        vals.append(v.real)
                    else:
                        vals.append(v.real * s2)
                        vals.append(v.imag * s2)
                rows.append(vals)
            self._emb = (prec, places, rows)
        return self._emb[1], self._emb[2]

    def element_embeddings(self, v: Vec, prec: int = 80):
        places, rows = self.embeddings(prec)
        out = []
        idx = 0
        for kind, _ in places:
            if kind == "r":
                out.append(("r", mpmath.fsum(c * rows[i][idx] for i, c in enumerate(v) if c)))
                idx += 1
            else:
                re = mpmath.fsum(c * rows[i][idx] for i, c in enumerate(v) if c)
                im = mpmath.fsum(c * rows[i][idx + 1] for i, c in enumerate(v) if c)
                out.append(("c", mpmath.mpc(re, im) / mpmath.sqrt(2)))
                idx += 2
        return out

    def t2_gram(self, prec: int = 60):
        _, rows = self.embeddings(prec)
        g = [[mpmath.fsum(rows[i][k] * rows[j][k] for k in range(self.n))
              for j in range(self.n)] for i in range(self.n)]
        return g

    # -- primes ---------------------------------------------------------------

    def primes_above(self, p: int) -> tuple[FBPrime, ...]:
        if p not in self._prime_cache:
            decomp = prime_decomp(p, self.T)
            out = []
            for P in decomp:
                alpha = self._coords_on_basis(
                    [Fraction(int(c.numerator), int(c.denominator))
                     for c in _anp_coeffs(P.alpha, self.n)]
                )
                rows = [tuple(p if i == j else 0 for j in range(self.n))
                        for i in range(self.n)]
                rows += [self.mul(alpha, self.basis_vec(i)) for i in range(self.n)]
                h, _ = zg.hermite_normal_form(zg.matrix(rows))
                h = zg.matrix([r for r in h if any(r)])
                if _hdet(h) != p**P.f:
                    raise EngineError(f"two-element ideal above {p} has wrong norm")
                sq = self.ideal_mul(h, h)
                if self.in_ideal(alpha, sq):
                    alpha = tuple(a + b for a, b in zip(alpha, self.int_elem(p)))
                    if self.in_ideal(alpha, sq):
                        raise EngineError(f"no uniformizer above {p}")
                out.append(FBPrime(p, int(P.e), int(P.f), alpha, h))
            prod = zg.identity(self.n)
            for pr in out:
                prod = self.ideal_mul(prod, self.ideal_pow(pr.hnf, pr.e))
            if prod != self.principal_hnf(self.int_elem(p)):
                raise EngineError(f"splitting above {p} fails the product check")
            self._prime_cache[p] = tuple(sorted(out, key=lambda q: (q.f, q.e, q.hnf)))
        return self._prime_cache[p]

    def ideal_mul(self, a, b):
        rows = [self.mul(u, v) for u in a for v in b]
        h, _ = zg.hermite_normal_form(zg.matrix(rows))
        return zg.matrix([r for r in h if any(r)])

    def ideal_pow(self, a, m):
        out = zg.identity(self.n)
        while m:
            if m & 1:
                out = self.ideal_mul(out, a)
            a = self.ideal_mul(a, a)
            m >>= 1
        return out

    def principal_hnf(self, g: Vec):
        rows = [self.mul(g, self.basis_vec(i)) for i in range(self.n)]
        h, _ = zg.hermite_normal_form(zg.matrix(rows))
        return h

    def in_ideal(self, v: Vec, a) -> bool:
        return zg.solve_left(a, v) is not None

    def valuation(self, v: Vec, pr: FBPrime) -> int:
        key = pr.hnf
        powers = self._power_cache.setdefault(key, [zg.identity(self.n), pr.hnf])
        k = 0
        while True:
            if k + 1 >= len(powers):
                powers.append(self.ideal_mul(powers[-1], pr.hnf))
            if not self.in_ideal(v, powers[k + 1]):
                return k
            k += 1


def _anp_coeffs(alpha, n):
    """Coefficients (ascending) of a sympy ANP / PrimeIdeal alpha on the
    power basis."""
    from sympy.polys.polyclasses import ANP

    if isinstance(alpha, ANP):
        lst = alpha.to_list()  # descending
        lst = list(reversed(lst))
    else:
        # ModuleElement: column over the power basis with denominator
        col = alpha.QQ_col.flat()
        return [Rational(c) for c in col] + [Rational(0)] * (n - len(col))
    out = [Rational(c) for c in lst]
    return out + [Rational(0)] * (n - len(out))


def _hdet(h) -> int:
    out = 1
    for i in range(len(h)):
        out *= h[i][i]
    return out


def _fraction_det(m):
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def _fraction_solve(a_rows, b):
    """x with sum x_i a_rows[i] = b over Q."""
    n = len(a_rows)
    mt = [[a_rows[j][i] for j in range(n)] + [b[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if mt[r][col]), None)
        if piv is None:
            raise EngineError("singular system")
        mt[col], mt[piv] = mt[piv], mt[col]
        inv = Fraction(1) / mt[col][col]
        mt[col] = [c * inv for c in mt[col]]
        for r in range(n):
            if r != col and mt[r][col]:
                f = mt[r][col]
                mt[r] = [c - f * d for c, d in zip(mt[r], mt[col])]
    return [mt[i][n] for i in range(n)]


def _eval_fraction_poly(coeffs, z):
    out = mpmath.mpc(0)
    for c in reversed(coeffs):
        out = out * z + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
    return out
