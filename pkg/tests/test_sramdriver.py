"""Sweep driver tests on the native quadratic backend.

Expected values are pinned by independent arguments: S = {} rows equal
the p-class group; for imaginary quadratics the unit log image is 0, so
rtilde equals the local degree for every S; Leopoldt (proven for abelian
fields) forces rtilde = r2 + 1 at S = P; the d = 2 suspects p = 13, 31
carry torsion Z/13, Z/31 while p = 7 is 7-rational (the fundamental-unit
Fermat quotient is a non-unit mod 49, checked by hand: (1+sqrt2)^8 = 38
+ 16 sqrt2 mod 49).
"""

import pytest

from pram import sramdriver as sd
from pram.backend import QuadBackend


def reports_by_mask(F, p, cfg=None):
    cfg = cfg or sd.SweepConfig()
    return {r.mask: r for r in sd.sweep_prime(F, p, cfg)}


class TestClassify:
    def test_paper_growth_pattern(self):
        r, t, stable, amb = sd.classify([5**13, 5**8], [5**17, 5**8], 5)
        assert (r, t, stable) == (1, [5**8], True)

    def test_identical_lists(self):
        r, t, stable, amb = sd.classify([9, 3], [9, 3], 3)
        assert (r, t, stable) == (0, [9, 3], True)

    def test_empty(self):
        assert sd.classify([], [], 2) == (0, [], True, False)

    def test_growth_must_reach_factor_p(self):
        r, t, stable, amb = sd.classify([8], [16], 2)
        assert stable and r == 1
        r, t, stable, amb = sd.classify([8], [32], 2)
        assert stable and r == 1

    def test_ambiguity_flag(self):
        r, t, stable, amb = sd.classify([16, 4], [16, 8], 2)
        assert amb and r == 1 and t == [16]


class TestModulusFor:
    def test_exponents(self):
        F = QuadBackend(-1)
        (pr,) = F.primes_above(2)
        m = sd.modulus_for(F, [pr], 3)
        assert m.levels[0][1] == 6  # e = 2

    def test_empty(self):
        F = QuadBackend(-1)
        assert sd.modulus_for(F, [], 5).is_empty

    def test_mixed_p_rejected(self):
        F = QuadBackend(-1)
        a = F.primes_above(5)[0]
        b = F.primes_above(13)[0]
        with pytest.raises(ValueError):
            sd.modulus_for(F, [a, b], 4)


class TestGaussianSweep:
    def test_p5_block(self):
        F = QuadBackend(-1)
        rep = reports_by_mask(F, 5)
        assert rep[(0, 0)].rank == 0 and rep[(0, 0)].torsion == []
        for mask in ((0, 1), (1, 0)):
            assert rep[mask].rtilde == 1  # no unit logs to kill the local degree
            assert rep[mask].torsion == []
        assert rep[(1, 1)].rtilde == 2  # r2 + 1 under Leopoldt
        assert rep[(1, 1)].torsion == []
        assert all(r.stable for r in rep.values())

    def test_p2_full(self):
        F = QuadBackend(-1)
        rep = reports_by_mask(F, 2)
        assert rep[(1,)].rtilde == 2
        assert rep[(0,)].rank == 0


class TestRealQuadratic:
    def test_d2_p7_rational(self):
        F = QuadBackend(2)
        rep = reports_by_mask(F, 7)
        assert rep[(0, 0)].torsion == []
        assert rep[(0, 1)].torsion == [] and rep[(0, 1)].rtilde == 0
        assert rep[(1, 0)].torsion == [] and rep[(1, 0)].rtilde == 0
        assert rep[(1, 1)].rtilde == 1 and rep[(1, 1)].torsion == []

    def test_d2_p13_exception(self):
        F = QuadBackend(2)
        rep = reports_by_mask(F, 13)
        full = rep[(1,)]
        assert full.rtilde == 1
        assert full.torsion == [13]
        assert full.stable

    def test_d2_p31_exception(self):
        F = QuadBackend(2)
        rep = reports_by_mask(F, 31)
        assert rep[(1, 1)].torsion and all(t % 31 == 0 for t in rep[(1, 1)].torsion)

    def test_d5_p7(self):
        F = QuadBackend(5)
        rep = reports_by_mask(F, 7)
        full_mask = max(rep)
        assert rep[full_mask].rtilde == 1
        assert rep[full_mask].torsion == []


class TestClassGroupRows:
    def test_s_empty_is_class_p_part(self):
        F = QuadBackend(-5)
        rep = reports_by_mask(F, 2)
        empty = rep[min(rep)]
        assert empty.torsion == [2] and empty.rtilde == 0
        F = QuadBackend(-23)
        rep = reports_by_mask(F, 3)
        empty = rep[min(rep)]
        assert empty.torsion == [3]

    def test_monotone_rank_in_s(self):
        F = QuadBackend(-23)
        rep = reports_by_mask(F, 3)
        full = max(rep)
        for mask in rep:
            assert rep[mask].rank <= rep[full].rank


class TestComputeAKS:
    def test_floor_enforced(self):
        F = QuadBackend(-1)
        (pr,) = F.primes_above(2)
        with pytest.raises(ValueError):
            sd.compute_AKS(F, 2, [pr], 2)

    def test_matches_sweep(self):
        F = QuadBackend(2)
        primes = F.primes_above(7)
        inv = sd.compute_AKS(F, 7, primes, 10)
        rep = reports_by_mask(F, 7)
        assert inv == rep[(1, 1)].invariants_n
