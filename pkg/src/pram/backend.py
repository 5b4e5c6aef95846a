"""Unified field-backend surface consumed by the ray-class pipeline.

A backend exposes exact integral-basis arithmetic, prime splitting above a
rational prime, a class-group presentation whose generators and principal
generators are coprime to a requested prime, and the unit group.  The
quadratic backend is native; the general backend is fixture-loaded
(genfield).  Prime objects expose p, e, f, two_elt and hnf uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import quadfield as qf
from . import zabgroup as zg

Vec = tuple[int, ...]


@dataclass(frozen=True)
class ClassData:
    """Class group presentation with relations verified principal and all
    ideals/generators coprime to the requested prime."""

    num_gens: int
    relations: zg.Matrix
    principal_gens: tuple[Vec, ...]
    gen_norms: tuple[int, ...]
    order: int


@dataclass(frozen=True)
class Units:
    torsion_gen: Vec
    torsion_order: int
    fundamental: tuple[Vec, ...]


class QuadBackend:
    """Adapter presenting a QuadField through the generic surface."""

    def __init__(self, d: int):
        self.k = qf.make_quadratic_field(d)
        self.degree = 2
        self.signature = self.k.signature
        self.disc = self.k.disc
        self.one: Vec = (1, 0)

    def describe(self) -> str:
        return f"Q(sqrt({self.k.d}))"

    def mul(self, x: Vec, y: Vec) -> Vec:
        return qf.elem_mul(self.k, x, y)

    def norm(self, x: Vec) -> int:
        return qf.elem_norm(self.k, x)

    def primes_above(self, p: int):
        return qf.split_prime(self.k, p)

    def class_data(self, avoid: int) -> ClassData:
        pres = qf.class_presentation(self.k, avoid=avoid)
        h = qf.class_number(self.k)
        return ClassData(
            len(pres.gens),
            pres.relations,
            pres.principal_gens,
            tuple(pr.norm for pr in pres.gens),
            h,
        )

    def units(self) -> Units:
        tg, w, fund = qf.units_for_presentation(self.k)
        return Units(tg, w, tuple(fund))
