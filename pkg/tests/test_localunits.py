"""Local unit group tests against brute-force enumeration.

For N(P^k) <= 2^16 the whole residue ring is enumerated and the unit
group order and exponent structure are checked directly; dlog round-trips
are exercised on deterministic pseudo-random elements.
"""

import itertools
import random

import pytest

from pram import localunits as lu
from pram import zabgroup as zg
from pram.backend import QuadBackend


def ring_for(d, p, k_by_index):
    F = QuadBackend(d)
    primes = F.primes_above(p)
    levels = {primes[i]: k for i, k in k_by_index.items()}
    return F, lu.make_residue_ring(F, p, levels), primes


def brute_unit_count(ring, pr, k):
    """Count units of O/P^k by full enumeration (small cases only)."""
    lat = ring.lat(pr, k)
    lat1 = ring.lat(pr, 1)
    reps = []
    ranges = [range(lat[i][i]) for i in range(ring.n)]
    for tup in itertools.product(*ranges):
        # residue classes mod P^k: canonical coords bounded by the diagonal
        x = lu._red(tup, lat)
        reps.append(x)
    reps = set(reps)
    units = [x for x in reps if any(lu._red(x, lat1))]
    return len(reps), len(units)


class TestOrders:
    @pytest.mark.parametrize(
        "d,p,idx,k",
        [
            (-1, 2, 0, 6),   # Q(i), (1+i)^6: order 32
            (-1, 5, 0, 2),
            (-1, 3, 0, 2),
            (2, 7, 0, 2),    # deg-1 prime: (Z/49)* = C42
            (2, 5, 0, 1),    # inert: F_25^*
            (-5, 2, 0, 4),   # ramified 2
            (5, 2, 0, 2),    # inert 2: F_4 levels
            (-3, 3, 0, 3),   # ramified 3
        ],
    )
    def test_group_order_vs_enumeration(self, d, p, idx, k):
        F, ring, primes = ring_for(d, p, {idx: k})
        pr = primes[idx]
        g = lu.local_unit_group(ring, pr, k)
        n_reps, n_units = brute_unit_count(ring, pr, k)
        assert n_reps == pr.norm**k
        assert g.order == n_units
        assert g.structure.order == n_units

    def test_spec_values(self):
        F, ring, primes = ring_for(-1, 2, {0: 6})
        g = lu.local_unit_group(ring, primes[0], 6)
        assert g.order == 32
        F, ring, primes = ring_for(2, 7, {0: 2})
        g = lu.local_unit_group(ring, primes[0], 2)
        assert g.structure.invariant_factors == (42,)  # C6 x C7 = C42
        F, ring, primes = ring_for(2, 5, {0: 1})
        g = lu.local_unit_group(ring, primes[0], 1)
        assert g.structure.invariant_factors == (24,)  # F_25^* cyclic


class TestTeichmueller:
    def test_q2_trivial(self):
        F, ring, primes = ring_for(-1, 2, {0: 4})
        t = lu.teichmueller_generator(ring, primes[0], 4)
        assert ring.residue(primes[0], 4, t) == ring.residue(primes[0], 4, ring.one)

    def test_split5_order4(self):
        F, ring, primes = ring_for(-1, 5, {0: 2})
        pr = primes[0]
        t = lu.teichmueller_generator(ring, pr, 2)
        r4 = ring.residue(pr, 2, ring.pow(t, 4))
        assert r4 == ring.residue(pr, 2, ring.one)
        assert ring.residue(pr, 2, ring.pow(t, 2)) != ring.residue(pr, 2, ring.one)

    def test_inert5_order24(self):
        F, ring, primes = ring_for(2, 5, {0: 1})
        pr = primes[0]
        t = lu.teichmueller_generator(ring, pr, 1)
        for m in (8, 12):
            assert ring.residue(pr, 1, ring.pow(t, m)) != ring.residue(pr, 1, ring.one)
        assert ring.residue(pr, 1, ring.pow(t, 24)) == ring.residue(pr, 1, ring.one)


class TestDlogRoundtrip:
    @pytest.mark.parametrize(
        "d,p,idx,k",
        [(-1, 2, 0, 8), (-1, 5, 0, 3), (2, 7, 0, 3), (2, 5, 0, 2), (-5, 2, 0, 6), (-3, 3, 0, 4), (5, 5, 0, 3)],
    )
    def test_roundtrip(self, d, p, idx, k):
        F, ring, primes = ring_for(d, p, {idx: k})
        pr = primes[idx]
        g = lu.local_unit_group(ring, pr, k)
        rng = random.Random(1234)
        lat1 = ring.lat(pr, 1)
        n_checked = 0
        while n_checked < 40:
            x = tuple(rng.randrange(ring.pN) for _ in range(ring.n))
            if not any(lu._red(x, lat1)):
                continue
            exps = g.dlog(x)
            back = g.recompose(exps)
            assert back == ring.residue(pr, k, x)
            n_checked += 1

    def test_generator_unit_vectors(self):
        F, ring, primes = ring_for(-1, 2, {0: 6})
        pr = primes[0]
        g = lu.local_unit_group(ring, pr, 6)
        exps = g.dlog(g.teich_gen)
        # recomposition must reproduce even if coordinates are not unit
        assert g.recompose(exps) == ring.residue(pr, 6, g.teich_gen)
        one = g.dlog(ring.one)
        assert g.recompose(one) == ring.residue(pr, 6, ring.one)


class TestLogExp:
    def test_log_one(self):
        F, ring, primes = ring_for(-1, 3, {0: 3})
        assert not any(lu.padic_log(ring, primes[0], ring.one, 6))

    def test_homomorphism(self):
        F, ring, primes = ring_for(2, 7, {0: 4})
        pr = primes[0]
        u = (1 + 7, 7)  # one-unit
        v = (1 + 2 * 49, 7 * 3)
        lu_uv = lu.padic_log(ring, pr, ring.mul(u, v), 4)
        s = tuple(
            (a + b) % ring.pN
            for a, b in zip(lu.padic_log(ring, pr, u, 4), lu.padic_log(ring, pr, v, 4))
        )
        assert ring.residue(pr, 4, lu._vsub(lu_uv, s)) == (0, 0)

    def test_exp_log_inverse(self):
        F = QuadBackend(-1)
        primes = F.primes_above(5)
        pr = primes[0]
        ring = lu.make_residue_ring(F, 5, {pr: 4}, guard=6)
        u = (1 + 5, 5)
        x = lu.padic_log(ring, pr, u, 5)
        back = lu.padic_exp(ring, pr, x, 5)
        assert ring.residue(pr, 4, back) == ring.residue(pr, 4, u)

    def test_exp_small_ring_raises(self):
        F, ring, primes = ring_for(-1, 5, {0: 4})
        pr = primes[0]
        u = (1 + 5, 5)
        x = lu.padic_log(ring, pr, u, 5)
        with pytest.raises(lu.PrecisionError):
            lu.padic_exp(ring, pr, x, 5)

    def test_log_power_identity(self):
        # log((1+p)^p) = p log(1+p)
        F, ring, primes = ring_for(2, 3, {0: 4})
        pr = primes[0]
        u = (4, 0)  # 1 + 3
        lhs = lu.padic_log(ring, pr, ring.pow(u, 3), 5)
        rhs = tuple((3 * c) % ring.pN for c in lu.padic_log(ring, pr, u, 5))
        assert ring.residue(pr, 4, lu._vsub(lhs, rhs)) == (0, 0)

    def test_exp_precondition(self):
        F, ring, primes = ring_for(-1, 2, {0: 6})
        pr = primes[0]
        with pytest.raises(ValueError):
            lu.padic_exp(ring, pr, pr.two_elt[1], 4)  # v = 1 <= e/(p-1) = 2


class TestRingUnits:
    def test_single_factor(self):
        F, ring, primes = ring_for(-1, 2, {0: 6})
        units = lu.ring_unit_group(ring)
        assert units.order == 32

    def test_crt_split(self):
        F, ring, primes = ring_for(-1, 5, {0: 1, 1: 1})
        units = lu.ring_unit_group(ring)
        assert units.order == 16
        assert units.group.invariant_factors == (4, 4)

    def test_crt_dlog_roundtrip(self):
        F, ring, primes = ring_for(-1, 5, {0: 2, 1: 2})
        units = lu.ring_unit_group(ring)
        rng = random.Random(7)
        done = 0
        while done < 20:
            x = tuple(rng.randrange(ring.pN) for _ in range(2))
            try:
                exps = units.dlog(x)
            except ValueError:
                continue
            # recompose blockwise
            out = ring.one
            pos = 0
            for lg in units.locals:
                width = 1 + len(lg.one_unit_gens)
                sub = exps[pos : pos + width]
                out = ring.mul(out, ring.pow(lg.teich_gen, sub[0]))
                for g, e in zip(lg.one_unit_gens, sub[1:]):
                    out = ring.mul(out, ring.pow(g, e))
                pos += width
            for lg in units.locals:
                pr = lg.prime
                assert ring.residue(pr, lg.k, out) == ring.residue(pr, lg.k, x)
            done += 1


class TestOneUnitPartDlog:
    def test_matches_full_dlog(self):
        F, ring, primes = ring_for(2, 7, {0: 3})
        pr = primes[0]
        g = lu.local_unit_group(ring, pr, 3)
        rng = random.Random(99)
        lat1 = ring.lat(pr, 1)
        done = 0
        while done < 15:
            x = tuple(rng.randrange(ring.pN) for _ in range(2))
            if not any(lu._red(x, lat1)):
                continue
            full = g.dlog(x)
            part = g.one_unit_part_dlog(x)
            # the one-unit coordinates agree modulo each generator's p-order
            recomposed_full = g.recompose((0,) + tuple(full[1:]))
            recomposed_part = g.recompose((0,) + tuple(part))
            assert recomposed_full == recomposed_part
            done += 1
