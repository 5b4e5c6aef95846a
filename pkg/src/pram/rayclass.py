"""Ray class groups Cl_K(m) in the ordinary sense.

Presentation: generators are the residue-ring unit generators together
with class-group generators (always chosen coprime to p); relations are
(i) the residue group's own relations, (ii) images of the torsion unit
and the fundamental units under dlog, (iii) each verified class relation
prod g^m = (delta) contributing the row (-dlog(delta) | m).  With the
full unit group and a complete class presentation this presents Cl_K(m)
exactly; the order identity #Cl(m) * #im(E) = h * #(O/m)^x is asserted
on the exact path.

The p-primary path drops every prime-to-p generator (tensoring with Z_p
kills the Teichmueller parts) and runs the Smith reduction mod p^B, so
sweeping subsets S at a fixed p costs one small SNF per subset after the
per-prime blocks are cached.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import localunits as lu
from . import zabgroup as zg
from .numutil import valuation

Vec = tuple[int, ...]


@dataclass(frozen=True)
class Modulus:
    """Formal product P -> k over primes above a single rational p."""

    p: int
    levels: tuple[tuple[object, int], ...]

    @property
    def is_empty(self) -> bool:
        return not self.levels

    def level_map(self) -> dict:
        return {pr: k for pr, k in self.levels}

    def __str__(self):
        if self.is_empty:
            return "(1)"
        return " * ".join(f"P{i}^{k}" for i, (_, k) in enumerate(self.levels))


def make_modulus(F, p: int, assignment: dict) -> Modulus:
    """Build a Modulus from {prime: exponent}; primes stay in backend order."""
    primes = F.primes_above(p)
    levels = []
    for pr in primes:
        k = assignment.get(pr, 0)
        if k < 0:
            raise ValueError("negative exponent in modulus")
        if k:
            levels.append((pr, k))
    extra = [pr for pr in assignment if pr not in primes]
    if extra:
        raise ValueError("modulus prime not above p (mixed residue characteristics)")
    return Modulus(p, tuple(levels))


@dataclass
class RayClassGroup:
    group: zg.AbGroup
    modulus: Modulus
    gen_tags: tuple[str, ...]
    order: int


def _unit_elements(F) -> list[Vec]:
    u = F.units()
    return [u.torsion_gen] + list(u.fundamental)


def ray_class_group(F, m: Modulus) -> RayClassGroup:
    """Exact ray class group (all invariant factors, not just p-parts)."""
    cd = F.class_data(avoid=m.p if not m.is_empty else 1)
    if m.is_empty:
        g = zg.group_from_relations(cd.num_gens, cd.relations)
        return RayClassGroup(g, m, tuple(f"cl{i}" for i in range(cd.num_gens)), g.order)
    ring = lu.make_residue_ring(F, m.p, m.level_map())
    units = lu.ring_unit_group(ring)
    n_res = len(units.gens)
    n_cl = cd.num_gens
    rows = []
    for row in units.rows:
        rows.append(tuple(row) + (0,) * n_cl)
    for u in _unit_elements(F):
        rows.append(tuple(units.dlog(u)) + (0,) * n_cl)
    for rel, delta in zip(cd.relations, cd.principal_gens):
        d = units.dlog(delta)
        rows.append(tuple(-x for x in d) + tuple(rel))
    bound = cd.order * units.order  # group order divides this
    invs = zg.invariant_factors_bounded(zg.matrix(rows), bound)
    group = zg.AbGroup(invs, 0)
    # exact sequence order check: #Cl(m) * #im(E) = h * #(O/m)^x
    q_rows = list(units.rows) + [tuple(units.dlog(u)) for u in _unit_elements(F)]
    quot_invs = zg.invariant_factors_bounded(zg.matrix(q_rows), units.order)
    quot_order = 1
    for d in quot_invs:
        quot_order *= d
    im_units = units.order // quot_order
    if group.order * im_units != cd.order * units.order:
        raise AssertionError(
            f"ray class order identity failed: {group.order} * {im_units} != "
            f"{cd.order} * {units.order}"
        )
    tags = []
    for i, lg in enumerate(units.locals):
        tags.append(f"P{i}:teich")
        tags.extend(f"P{i}:u{j}" for j in range(len(lg.one_unit_gens)))
    tags.extend(f"cl{i}" for i in range(n_cl))
    return RayClassGroup(group, m, tuple(tags), group.order)


def ray_rank_p(F, m: Modulus, p: int) -> int:
    """p-rank of Cl_K(m)."""
    if m.is_empty:
        cd = F.class_data(avoid=1)
        g = zg.group_from_relations(cd.num_gens, cd.relations)
        return sum(1 for d in g.invariant_factors if d % p == 0)
    if p == m.p:
        return len(PPartCalculator(F, p, m.level_map()).invariants(m.level_map()))
    g = ray_class_group(F, m).group
    return sum(1 for d in g.invariant_factors if d % p == 0)


class PPartCalculator:
    """p-primary ray class invariants with per-prime caching.

    Build once per (field, p) with the largest levels the sweep will use;
    `invariants` may then be called for any sub-levels cheaply.
    """

    def __init__(self, F, p: int, max_levels: dict, guard: int = 2):
        self.F = F
        self.p = p
        self.ring = lu.make_residue_ring(F, p, max_levels, guard=guard)
        self.cd = F.class_data(avoid=p)
        self.unit_elems = _unit_elements(F)
        self._blocks: dict = {}
        self.vp_h = valuation(self.cd.order, p) if self.cd.order % p == 0 else 0

    def class_p_part(self) -> list[int]:
        g = zg.group_from_relations(self.cd.num_gens, self.cd.relations)
        return zg.p_part_invariants(g, self.p)

    def block(self, pr, k: int):
        """(num gens, rows, unit dlog columns, delta dlog columns) for the
        one-unit part of (O/P^k)^x."""
        key = (pr, k)
        if key not in self._blocks:
            lg = lu.local_unit_group(self.ring, pr, k)
            rows = [tuple(r) for r in lg._one.rows]
            unit_cols = [lg.one_unit_part_dlog(u) for u in self.unit_elems]
            delta_cols = [lg.one_unit_part_dlog(d) for d in self.cd.principal_gens]
            self._blocks[key] = (len(lg.one_unit_gens), rows, unit_cols, delta_cols)
        return self._blocks[key]

    def invariants(self, levels: dict) -> list[int]:
        """Descending p-power invariant factors of the p-part of Cl_K(m)."""
        active = [(pr, k) for pr, k in levels.items() if k]
        if not active:
            return self.class_p_part()
        blocks = [self.block(pr, k) for pr, k in active]
        n_res = sum(b[0] for b in blocks)
        n_cl = self.cd.num_gens
        width = n_res + n_cl
        rows = []
        pos = 0
        for ngen, brows, _, _ in blocks:
            for r in brows:
                rows.append((0,) * pos + tuple(r) + (0,) * (width - pos - ngen))
            pos += ngen
        for iu in range(len(self.unit_elems)):
            row = []
            for ngen, _, ucols, _ in blocks:
                row.extend(ucols[iu])
            rows.append(tuple(row) + (0,) * n_cl)
        for irel, rel in enumerate(self.cd.relations):
            row = []
            for ngen, _, _, dcols in blocks:
                row.extend(-x for x in dcols[irel])
            rows.append(tuple(row) + tuple(rel))
        bexp = self.vp_h + sum(pr.f * (k - 1) for pr, k in active) + 1
        diag = zg.snf_diagonal_mod(zg.matrix(rows), self.p**bexp)
        out = []
        for d in diag:
            if d == self.p**bexp:
                raise AssertionError(
                    "p-part invariant hit the exponent cap; presentation defect"
                )
            if d > 1:
                out.append(d)
        out.sort(reverse=True)
        return out
