"""Scanner tests: filter verdicts on pinned primes, filter/pipeline
agreement on small ranges, and the d = 2 exceptional set up to 2000."""

import pytest

from pram import scan as sc
from pram import sramdriver as sd
from pram.backend import QuadBackend
from pram.numutil import primes_in, squarefree_part_known


class TestFilter:
    def test_d2_p13_suspect(self):
        assert sc.fermat_quotient_filter(2, 13) == "suspect"

    def test_d2_p31_suspect(self):
        assert sc.fermat_quotient_filter(2, 31) == "suspect"

    def test_d2_p7_pass(self):
        assert sc.fermat_quotient_filter(2, 7) == "pass"

    def test_d5_p3_pass(self):
        assert sc.fermat_quotient_filter(5, 3) == "pass"

    def test_excluded_ramified(self):
        verdict = sc.fermat_quotient_filter(5, 5)
        assert verdict[0] == "excluded"

    def test_imaginary_rejected(self):
        with pytest.raises(ValueError):
            sc.fermat_quotient_filter(-5, 7)


class TestAgreement:
    """Filter verdict must match pipeline T-triviality exactly for
    p coprime to 2 D h (a release-blocking property)."""

    @pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10, 11, 13])
    def test_small_range(self, d):
        F = QuadBackend(d)
        cfg = sd.SweepConfig()
        import pram.quadfield as qf

        k = qf.make_quadratic_field(d)
        h = qf.class_number(k)
        for p in primes_in(3, 60):
            if (2 * k.disc * h) % p == 0:
                continue
            verdict = sc.fermat_quotient_filter(d, p)
            torsion = sc._verify_prime(F, p, cfg)
            if verdict == "pass":
                assert not torsion, (d, p)
            else:
                assert torsion, (d, p)


class TestScanRange:
    def test_d2_up_to_2000(self):
        res = sc.scan_range(2, 3, 2000)
        assert res.confirmed == (13, 31)
        assert all(reason for _, reason in res.skipped)

    def test_d5_no_exceptions_small(self):
        res = sc.scan_range(5, 3, 500)
        assert res.confirmed == ()
        # ramified 5 was pipeline-verified, not filtered
        assert any(p == 5 for p, _ in res.skipped)

    def test_jobs_deterministic(self):
        a = sc.scan_range(2, 3, 1200, jobs=1)
        b = sc.scan_range(2, 3, 1200, jobs=2)
        assert a == b
