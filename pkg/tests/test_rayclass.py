"""Ray class group tests: frozen small cases (verified by coset counting
by hand), the exact-sequence order identity, functoriality, p-rank
monotonicity, and agreement between the exact and p-primary paths."""

import pytest

from pram import rayclass as rc
from pram import zabgroup as zg
from pram.backend import QuadBackend


def modulus(F, p, ks):
    primes = F.primes_above(p)
    return rc.make_modulus(F, p, {primes[i]: k for i, k in ks.items()})


class TestBasics:
    def test_trivial_modulus_is_class_group(self):
        F = QuadBackend(-23)
        g = rc.ray_class_group(F, modulus(F, 3, {}))
        assert g.group.invariant_factors == (3,)

    def test_gaussian_9(self):
        # Q(i), m = (3)^2: 72 residue units / <i> of order 4, h = 1 -> 18
        F = QuadBackend(-1)
        g = rc.ray_class_group(F, modulus(F, 3, {0: 2}))
        assert g.order == 18

    def test_d23_p2_trivial_residue(self):
        # (O/P2)^x is trivial (norm 2), so Cl(m) = Cl = Z/3
        F = QuadBackend(-23)
        g = rc.ray_class_group(F, modulus(F, 2, {0: 1}))
        assert g.group.invariant_factors == (3,)

    def test_rank_p_examples(self):
        F = QuadBackend(-23)
        assert rc.ray_rank_p(F, modulus(F, 3, {}), 3) == 1
        F2 = QuadBackend(-1)
        m = modulus(F2, 7, {0: 1})
        assert rc.ray_rank_p(F2, m, 5) == 0


class TestPPartAgreement:
    @pytest.mark.parametrize(
        "d,p,ks",
        [
            (-1, 2, {0: 6}),
            (-1, 5, {0: 2, 1: 2}),
            (-5, 2, {0: 4}),
            (-23, 3, {0: 2}),
            (-23, 2, {0: 2, 1: 3}),
            (2, 7, {0: 2, 1: 2}),
            (5, 5, {0: 3}),
            (10, 2, {0: 5}),
            (79, 3, {0: 2, 1: 1}),
        ],
    )
    def test_exact_vs_p_primary(self, d, p, ks):
        F = QuadBackend(d)
        m = modulus(F, p, ks)
        exact = rc.ray_class_group(F, m)
        want = zg.p_part_invariants(exact.group, p)
        calc = rc.PPartCalculator(F, p, m.level_map())
        got = calc.invariants(m.level_map())
        assert got == want


class TestOrderAndFunctoriality:
    @pytest.mark.parametrize("d,p,k", [(-1, 2, 5), (-5, 3, 2), (2, 7, 2), (-23, 2, 3)])
    def test_surjection_onto_smaller_modulus(self, d, p, k):
        F = QuadBackend(d)
        primes = F.primes_above(p)
        big = rc.ray_class_group(F, modulus(F, p, {0: k}))
        small = rc.ray_class_group(F, modulus(F, p, {0: k - 1}))
        assert big.order % small.order == 0
        # elementwise divisibility after right-padding with 1
        bi = list(big.group.invariant_factors)
        si = list(small.group.invariant_factors)
        si = [1] * (len(bi) - len(si)) + si
        assert all(b % s == 0 for b, s in zip(bi, si))

    @pytest.mark.parametrize("d,p", [(-1, 2), (-5, 2), (-23, 3), (2, 7), (5, 3)])
    def test_rank_monotone_in_exponent(self, d, p):
        F = QuadBackend(d)
        primes = F.primes_above(p)
        lift = {pr: 1 for pr in primes}
        calc = rc.PPartCalculator(F, p, {pr: 8 for pr in primes})
        prev = 0
        for n in range(1, 8):
            r = len(calc.invariants({pr: n for pr in primes}))
            assert r >= prev
            prev = r

    def test_rank_monotone_in_s(self):
        F = QuadBackend(-1)
        primes = F.primes_above(5)
        calc = rc.PPartCalculator(F, 5, {pr: 4 for pr in primes})
        r_single = len(calc.invariants({primes[0]: 4}))
        r_both = len(calc.invariants({pr: 4 for pr in primes}))
        assert r_single <= r_both


class TestModulus:
    def test_rejects_foreign_prime(self):
        F = QuadBackend(-1)
        other = QuadBackend(-1).primes_above(3)[0]
        with pytest.raises(ValueError):
            rc.make_modulus(F, 5, {other: 1})
