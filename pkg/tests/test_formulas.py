"""Formula cross-checks against the ray-class pipeline.

The rank formula's prediction must equal the measured p-rank for every
subset S; the torsion-rank and decomposition identities are checked at
S = P.  A modest (d, p) sample runs here; the exhaustive suite is in the
acceptance tests.
"""

import pytest

from pram import formulas as fm
from pram import sramdriver as sd
from pram.backend import QuadBackend
from pram.numutil import squarefree_part_known

SAMPLE = [
    (-1, 5), (-1, 3), (-1, 7), (-5, 3), (-23, 3), (-23, 5), (-3, 3), (-3, 5),
    (2, 7), (2, 13), (2, 3), (5, 7), (5, 3), (10, 3), (79, 3), (-14, 3),
    (3, 3), (6, 3), (-6, 5), (13, 13),
]


def pipeline_ranks(F, p):
    cfg = sd.SweepConfig()
    return {r.mask: r for r in sd.sweep_prime(F, p, cfg)}


class TestShafarevichRank:
    def test_s_empty_collapse(self):
        # v_rank(S={}) = rk_p(Cl) + (r1+r2-1) + delta_K, formula gives rk_p(Cl)
        F = QuadBackend(-23)
        assert fm.v_group_rank(F, 3, []) == 1 + 0 + 0
        assert fm.predicted_rank(F, 3, []) == 1
        F2 = QuadBackend(2)
        assert fm.v_group_rank(F2, 5, []) == 0 + 1 + 0
        assert fm.predicted_rank(F2, 5, []) == 0

    def test_gaussian_p5_full(self):
        F = QuadBackend(-1)
        S = F.primes_above(5)
        assert fm.predicted_rank(F, 5, S) == 2

    @pytest.mark.parametrize("d,p", SAMPLE)
    def test_prediction_matches_pipeline(self, d, p):
        F = QuadBackend(d)
        primes = F.primes_above(p)
        reports = pipeline_ranks(F, p)
        for mask, rep in reports.items():
            assert rep.error is None
            S = [pr for pr, b in zip(primes, mask) if b]
            assert fm.predicted_rank(F, p, S) == rep.rank, (d, p, mask)

    @pytest.mark.parametrize("d,p", SAMPLE)
    def test_torsion_rank_eq5(self, d, p):
        F = QuadBackend(d)
        reports = pipeline_ranks(F, p)
        full = reports[max(reports)]
        assert fm.predicted_torsion_rank_P(F, p) == len(full.torsion), (d, p)


class TestDeltas:
    def test_delta_k(self):
        assert fm.delta_K(QuadBackend(-3), 3) == 1
        assert fm.delta_K(QuadBackend(-3), 5) == 0
        assert fm.delta_K(QuadBackend(-1), 3) == 0

    def test_delta_place_q3_sqrt_minus3(self):
        F = QuadBackend(-3)
        (pr,) = F.primes_above(3)
        assert fm.delta_place(F, 3, pr) == 1
        F2 = QuadBackend(3)
        (pr2,) = F2.primes_above(3)
        assert fm.delta_place(F2, 3, pr2) == 0  # Q_3(sqrt 3) != Q_3(sqrt -3)
        F3 = QuadBackend(6)
        (pr3,) = F3.primes_above(3)
        assert fm.delta_place(F3, 3, pr3) == 1  # 6 = -3 * (-2), -2 = 1 mod 3


class TestWGroup:
    def test_no_p_torsion(self):
        F = QuadBackend(2)
        assert fm.w_group_order(F, 5, F.primes_above(5)) == 0

    def test_sqrt_minus3_cancel(self):
        F = QuadBackend(-3)
        assert fm.w_group_order(F, 3, F.primes_above(3)) == 0

    def test_local_torsion_table_agreement(self):
        # measured local mu valuation equals the delta table for odd p
        for d in (-3, 3, 6, -6, 2, -1):
            F = QuadBackend(d)
            for p in (3, 5):
                for pr in F.primes_above(p):
                    assert fm.local_torsion_valuation(F, p, pr) == fm.delta_place(F, p, pr), (d, p)

    def test_p2_ramified_sqrt_minus5(self):
        # spec example: d = -5, 2 ramified: v2(#mu(K_P)) with {+-1} inside
        F = QuadBackend(-5)
        (pr,) = F.primes_above(2)
        v = fm.local_torsion_valuation(F, 2, pr)
        assert v >= 1  # contains -1


class TestRegulator:
    def test_d2_p7_zero(self):
        assert fm.normalized_regulator_valuation(QuadBackend(2), 7) == 0

    def test_d2_p13_positive(self):
        assert fm.normalized_regulator_valuation(QuadBackend(2), 13) >= 1

    def test_d5_p7_zero(self):
        assert fm.normalized_regulator_valuation(QuadBackend(5), 7) == 0

    def test_imaginary_zero(self):
        assert fm.normalized_regulator_valuation(QuadBackend(-5), 5) == 0


class TestDecomposition:
    def test_d2_p13(self):
        rep = fm.check_decomposition(QuadBackend(2), 13)
        assert rep.v_torsion == rep.v_regulator and rep.v_class_term == 0

    def test_trivial_torsion_all_zero(self):
        rep = fm.check_decomposition(QuadBackend(2), 7)
        assert rep.v_torsion == rep.v_regulator == rep.v_w == 0

    def test_d23_p3_class_bound(self):
        rep = fm.check_decomposition(QuadBackend(-23), 3)
        assert 0 <= rep.v_class_term <= 1

    @pytest.mark.parametrize("d,p", [(2, 13), (2, 31), (5, 5), (10, 3), (-23, 3), (79, 3)])
    def test_consistency_sample(self, d, p):
        rep = fm.check_decomposition(QuadBackend(d), p)
        assert rep.consistent


class TestEq4:
    @pytest.mark.parametrize("d,p", [(2, 7), (2, 13), (5, 7), (-1, 5), (-23, 3), (10, 3)])
    def test_rtilde_via_log_dimension(self, d, p):
        F = QuadBackend(d)
        primes = F.primes_above(p)
        reports = pipeline_ranks(F, p)
        for mask, rep in reports.items():
            S = [pr for pr, b in zip(primes, mask) if b]
            if not rep.stable:
                continue
            assert fm.predicted_rtilde(F, p, S) == rep.rtilde, (d, p, mask)
