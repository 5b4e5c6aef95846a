"""Formula-based cross-checks, independent of the ray-class pipeline.

The rank formula predicts rk_p(A_{K,S}) as

    rk V_{K,S}/K^xp + sum_{P in S} [K_P:Q_p] + sum_{P in S} delta_P
        - delta_K - (r1 + r2 - 1),

where V_{K,S} is the group of S-coprime alpha with (alpha) = a^p,
subject to the local condition alpha in (K_P^x)^p for every P in S (the
reading validated against the pipeline; the bare ideal-theoretic
definition over-counts).  The V-group is realized by explicit
generators: fundamental units, the p-part of the torsion unit, and for
each independent p-torsion class a power product of verified relation
generators, so no principal-ideal search is ever needed.

Everything here is restricted to odd p; the pipeline itself fully
supports p = 2.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import localunits as lu
from . import rayclass as rc
from . import sramdriver as sd
from . import zabgroup as zg
from .numutil import valuation

Vec = tuple[int, ...]


class FormulaDefect(AssertionError):
    """A formula identity failed; carries both sides."""


@dataclass(frozen=True)
class PlaceData:
    local_degree: int
    delta_p: int


@dataclass(frozen=True)
class ShafarevichInput:
    r1: int
    r2: int
    delta_K: int
    places: tuple[PlaceData, ...]  # one entry per P in S
    v_rank: int


def shafarevich_rank(inp: ShafarevichInput) -> int:
    out = (
        inp.v_rank
        + sum(pl.local_degree for pl in inp.places)
        + sum(pl.delta_p for pl in inp.places)
        - inp.delta_K
        - (inp.r1 + inp.r2 - 1)
    )
    if out < 0:
        raise FormulaDefect(f"rank formula returned {out} < 0; inputs misused")
    return out


def delta_K(F, p: int) -> int:
    """1 iff mu_p is in K (odd p, quadratic backend: only Q(sqrt-3), p=3)."""
    u = F.units()
    return 1 if u.torsion_order % p == 0 else 0


def delta_place(F, p: int, pr) -> int:
    """1 iff mu_p is in K_P; odd p, quadratic completions only."""
    if p == 2:
        raise ValueError("delta_place table is for odd p")
    if p != 3 or pr.e != 2:
        return 0
    # K_P = Q_3(sqrt(d)); ramified means v_3(d) = 1; equals Q_3(sqrt(-3))
    # iff the unit part of d / (-3) is a square mod 3
    d = F.k.d
    m = d // 3
    return 1 if (-m) % 3 == 1 else 0


# -- V-group generators -------------------------------------------------------


class PowerProduct:
    """prod base_i^exp_i without expansion; only residues are ever taken."""

    def __init__(self, factors):
        self.factors = [(b, e) for b, e in factors if e]

    def one_unit_dlog(self, lg: lu.LocalUnitGroup) -> list[int]:
        out = None
        for b, e in self.factors:
            d = lg.one_unit_part_dlog(b)
            if out is None:
                out = [e * x for x in d]
            else:
                out = [a + e * x for a, x in zip(out, d)]
        return out if out is not None else [0] * len(lg.one_unit_gens)


def _class_p_torsion_products(F, p: int):
    """One PowerProduct per independent p-torsion class: the principal
    generator of a^p for an ideal class a of order exactly p, expressed
    through the verified relation generators."""
    cd = F.class_data(avoid=p)
    if cd.num_gens == 0:
        return []
    dmat, umat, vmat = zg.smith_normal_form(cd.relations)
    k = cd.num_gens
    # row j of V^-1 expresses the j-th SNF generator over the ideal gens
    vinv = _unimodular_inverse(vmat)
    nr = len(cd.relations)
    out = []
    for j in range(min(len(dmat), k)):
        dj = dmat[j][j] if j < len(dmat) and j < len(dmat[j]) else 0
        if dj <= 1 or dj % p:
            continue
        w = vinv[j]
        vvec = tuple(x * (dj // p) for x in w)
        target = tuple(x * p for x in vvec)  # = dj * w, in the relation lattice
        coeffs = zg.solve_left(cd.relations, target)
        if coeffs is None:
            raise FormulaDefect("SNF p-torsion vector not in the relation lattice")
        out.append(PowerProduct(list(zip(cd.principal_gens, coeffs))))
    return out


def _unimodular_inverse(v: zg.Matrix) -> zg.Matrix:
    n = len(v)
    cols = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        x = zg.solve_left(v, e)
        if x is None:
            raise FormulaDefect("failed to invert unimodular matrix")
        cols.append(x)
    # x_i * v = e_i, so stacking x_i as rows gives v^-1
    return zg.matrix(cols)


def _v_group_generators(F, p: int):
    """Generators spanning V_{K,S}/K^xp before local conditions,
    independent classes by construction."""
    u = F.units()
    gens: list = []
    for f in u.fundamental:
        gens.append(PowerProduct([(f, 1)]))
    if u.torsion_order % p == 0:
        # the class of zeta_w in K^x/K^xp equals that of zeta_p (odd p)
        gens.append(PowerProduct([(u.torsion_gen, 1)]))
    gens.extend(_class_p_torsion_products(F, p))
    return gens


def _pth_power_conditions(F, p: int, S) -> tuple[list, int]:
    """Local-condition evaluator: returns (list of (local group, SNF data)
    per place, total condition count)."""
    conds = []
    total = 0
    for pr in S:
        kstar = (pr.e * p) // (p - 1) + 1
        ring = lu.make_residue_ring(F, p, {pr: kstar})
        lg = lu.local_unit_group(ring, pr, kstar)
        rows = zg.matrix([tuple(r) for r in lg._one.rows])
        dmat, _, vmat = zg.smith_normal_form(rows)
        dd = [dmat[i][i] for i in range(min(len(dmat), len(lg.one_unit_gens)))]
        cols = [j for j, dj in enumerate(dd) if dj > 1]
        conds.append((lg, vmat, cols))
        total += len(cols)
    return conds, total


def v_group_rank(F, p: int, S) -> int:
    """dim_{F_p} V_{K,S} / K^xp with p-th-power conditions at every P in S."""
    if p == 2:
        raise ValueError("V-group rank check restricted to odd p")
    gens = _v_group_generators(F, p)
    if not gens:
        return 0
    conds, total = _pth_power_conditions(F, p, S)
    if total == 0:
        return len(gens)
    rows = []
    for g in gens:
        row = []
        for lg, vmat, cols in conds:
            y = g.one_unit_dlog(lg)
            ysnf = zg.vec_mat(tuple(y), vmat)
            row.extend(ysnf[j] % p for j in cols)
        rows.append(row)
    return len(gens) - _rank_mod_p(rows, p)


def _rank_mod_p(rows, p) -> int:
    a = [[x % p for x in r] for r in rows]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = pow(a[row][col], -1, p)
        a[row] = [(x * inv) % p for x in a[row]]
        for i in range(len(a)):
            if i != row and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[row])]
        row += 1
        rank += 1
        if row == len(a):
            break
    return rank


def build_shafarevich_input(F, p: int, S) -> ShafarevichInput:
    r1, r2 = F.signature
    places = tuple(PlaceData(pr.e * pr.f, delta_place(F, p, pr)) for pr in S)
    return ShafarevichInput(r1, r2, delta_K(F, p), places, v_group_rank(F, p, S))


def predicted_rank(F, p: int, S) -> int:
    """Rank-formula prediction of rk_p(A_{K,S})."""
    return shafarevich_rank(build_shafarevich_input(F, p, S))


def predicted_torsion_rank_P(F, p: int) -> int:
    """Torsion-rank prediction at S = P (the S = P collapse of the rank
    formula): rk_p(T) = rk V_{K,P} + sum delta_P - delta_K."""
    S = F.primes_above(p)
    inp = build_shafarevich_input(F, p, S)
    out = inp.v_rank + sum(pl.delta_p for pl in inp.places) - inp.delta_K
    if out < 0:
        raise FormulaDefect(f"torsion-rank formula returned {out} < 0")
    return out


# -- W group ------------------------------------------------------------------


def local_torsion_valuation(F, p: int, pr, k1: int = None, k2: int = None) -> int:
    """v_p(#mu(K_P)): stable invariants of the one-unit group as the level
    grows are exactly the Z_p-torsion, i.e. the p-part of mu(K_P)."""
    j0 = pr.e // (p - 1) + 1
    k1 = k1 or (j0 + 2 * pr.e + 2)
    k2 = k2 or (k1 + 2 * pr.e + 2)
    ring = lu.make_residue_ring(F, p, {pr: k2})
    inv1 = _one_unit_invariants(ring, pr, k1, p)
    inv2 = _one_unit_invariants(ring, pr, k2, p)
    _, torsion, stable, _ = sd.classify(inv1, inv2, p)
    if not stable:
        raise FormulaDefect("local torsion measurement did not stabilize")
    return sum(valuation(t, p) for t in torsion)


def _one_unit_invariants(ring, pr, k, p):
    lg = lu.local_unit_group(ring, pr, k)
    g = lg._one.group
    return zg.p_part_invariants(g, p)


def w_group_order(F, p: int, S) -> int:
    """v_p(#W_{K,S}) = sum of local mu valuations minus the global
    torsion image (for S = P by the closure lemma; for strict subsets
    this is the lower-bound convention with iota_S(mu_K))."""
    if not S:
        return 0
    total = sum(local_torsion_valuation(F, p, pr) for pr in S)
    u = F.units()
    total -= valuation(u.torsion_order, p) if u.torsion_order % p == 0 else 0
    if total < 0:
        raise FormulaDefect("W valuation went negative")
    return total


# -- normalized regulator -----------------------------------------------------


def normalized_regulator_valuation(F, p: int, extra: int = 5, max_escalations: int = 3) -> int:
    """v_p(#R_{K,P}) for a real quadratic field and odd p: the index of
    the line Z_p log(eps) inside its saturation in log(U_{K,P})."""
    if p == 2:
        raise ValueError("regulator valuation restricted to odd p")
    r1, _ = F.signature
    if r1 == 0:
        return 0  # imaginary: log of the unit closure is 0, quotient is free
    eps = F.units().fundamental[0]
    primes = F.primes_above(p)
    cap = extra
    for _ in range(max_escalations + 1):
        k = {pr: (pr.e // (p - 1) + 1) + pr.e * cap for pr in primes}
        ring = lu.make_residue_ring(F, p, k)
        # the block lattice L = sum of log(U^1_P); v(#R) is the largest t
        # with log(eps) in p^t L (everything read modulo the level caps)
        blocks = []
        sat_bound = []
        for pr in primes:
            lg = lu.local_unit_group(ring, pr, k[pr])
            one = lg._one
            logs = [lu.padic_log(ring, pr, g, k[pr] + pr.e + 1) for g in one.gens]
            u1 = _one_unit_component(ring, lg, eps)
            x = lu.padic_log(ring, pr, u1, k[pr] + pr.e + 1)
            blocks.append((logs, list(one.latk), x))
            # p^t L falls inside the cap once t*e + j0 >= k
            sat_bound.append((k[pr] - (pr.e // (p - 1) + 1)) // pr.e - 2)
        bound = min(sat_bound)
        t = 0
        while t + 2 <= bound and _in_scaled_lattice(blocks, p, t + 1):
            t += 1
        if t + 2 <= bound:
            return t
        cap *= 2
    raise FormulaDefect("regulator valuation did not separate within the cap")


def _in_scaled_lattice(blocks, p: int, t: int) -> bool:
    """Is every block's log vector in p^t * (log lattice) + cap lattice?"""
    pt = p**t
    for logs, capins, x in blocks:
        rows = [tuple(pt * v for v in row) for row in logs] + capins
        if zg.solve_left(zg.matrix(rows), tuple(x)) is None:
            return False
    return True


def _one_unit_component(ring, lg, x):
    q = lg.q
    L = lg.prime.f * (lg.k - 1) + 1
    s = pow(q - 1, -1, ring.p**L)
    return ring.pow(ring.normalize_at(lg.prime, x), (q - 1) * s)


# -- the torsion decomposition ------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    p: int
    v_torsion: int
    v_regulator: int
    v_w: int
    v_class_term: int
    v_h: int

    @property
    def consistent(self) -> bool:
        return 0 <= self.v_class_term <= self.v_h


def check_decomposition(F, p: int, cfg: sd.SweepConfig = None) -> DecompositionReport:
    """#T = #Cl-tilde * #R * #W at S = P, all valuations independently
    computed; inconsistency raises with both sides."""
    if p == 2:
        raise ValueError("decomposition check restricted to odd p")
    cfg = cfg or sd.SweepConfig()
    primes = F.primes_above(p)
    reports = sd.sweep_prime(F, p, cfg)
    full = next(r for r in reports if all(r.mask))
    if full.error:
        raise FormulaDefect(f"pipeline failed at S=P: {full.error}")
    v_t = sum(valuation(t, p) for t in full.torsion)
    v_w = w_group_order(F, p, primes)
    v_r = normalized_regulator_valuation(F, p)
    cd = F.class_data(avoid=p)
    v_h = valuation(cd.order, p) if cd.order % p == 0 else 0
    rep = DecompositionReport(p, v_t, v_r, v_w, v_t - v_r - v_w, v_h)
    if not rep.consistent:
        raise FormulaDefect(
            f"decomposition inconsistent: v(T)={v_t}, v(R)={v_r}, v(W)={v_w}, "
            f"class term {rep.v_class_term} not in [0, {v_h}]"
        )
    return rep


def log_dimension(F, p: int, S) -> int:
    """Measured dim_{Q_p} of the span of unit logs over S (0 or 1 for
    quadratic fields), at working precision."""
    u = F.units()
    if not u.fundamental or not S:
        return 0
    eps = u.fundamental[0]
    for pr in S:
        k = (pr.e // (p - 1) + 1) + 6 * pr.e
        ring = lu.make_residue_ring(F, p, {pr: k})
        lg = lu.local_unit_group(ring, pr, k)
        u1 = _one_unit_component(ring, lg, eps)
        x = lu.padic_log(ring, pr, u1, k)
        if any(ring.residue(pr, k, x)):
            return 1
    return 0


def predicted_rtilde(F, p: int, S) -> int:
    """Z_p-rank via the log-dimension identity (finite precision)."""
    return sum(pr.e * pr.f for pr in S) - log_dimension(F, p, S)
