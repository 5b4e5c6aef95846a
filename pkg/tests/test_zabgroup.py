"""Integer linear algebra tests against independent oracles.

The Smith-form oracle is the determinantal-divisor characterization:
d_1 * ... * d_k equals the gcd of all k x k minors, which shares no code
with the reduction in the module.
"""

import itertools
from math import gcd, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pram import zabgroup as zg


def minor_gcd(m, k):
    nr, nc = zg.dims(m)
    g = 0
    for rows in itertools.combinations(range(nr), k):
        for cols in itertools.combinations(range(nc), k):
            sub = tuple(tuple(m[i][j] for j in cols) for i in rows)
            g = gcd(g, zg.det(sub))
    return abs(g)


def snf_oracle(m):
    """Invariant diagonal via determinantal divisors."""
    nr, nc = zg.dims(m)
    out = []
    prev = 1
    for k in range(1, min(nr, nc) + 1):
        dk = minor_gcd(m, k)
        if dk == 0:
            break
        out.append(dk // prev)
        prev = dk
    return out


small_entries = st.integers(min_value=-30, max_value=30)


def small_matrices(max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(small_entries, min_size=c, max_size=c),
                min_size=r,
                max_size=r,
            ).map(zg.matrix)
        )
    )


class TestHNF:
    def test_identity(self):
        m = zg.identity(2)
        h, u = zg.hermite_normal_form(m)
        assert h == m and u == m

    def test_gcd_pivot(self):
        h, u = zg.hermite_normal_form(zg.matrix([[4], [6]]))
        assert h == ((2,), (0,))
        assert zg.mat_mul(u, zg.matrix([[4], [6]])) == h

    def test_det_preserved(self):
        m = zg.matrix([[2, 4], [6, 8]])
        h, u = zg.hermite_normal_form(m)
        assert abs(zg.det(h)) == 8
        assert abs(zg.det(u)) == 1

    def test_empty(self):
        h, u = zg.hermite_normal_form(())
        assert h == () and u == ()

    @given(small_matrices())
    @settings(max_examples=150, deadline=None)
    def test_transform_and_shape(self, m):
        h, u = zg.hermite_normal_form(m)
        assert zg.mat_mul(u, m) == h
        assert abs(zg.det(u)) == 1
        # Echelon shape with positive pivots, reduced entries above.
        last = -1
        for row in h:
            j = next((k for k, x in enumerate(row) if x), None)
            if j is None:
                continue
            assert j > last
            last = j
            assert row[j] > 0

    @given(small_matrices())
    @settings(max_examples=80, deadline=None)
    def test_row_lattice_equal(self, m):
        h, _ = zg.hermite_normal_form(m)
        for row in m:
            assert zg.solve_left(h, row) is not None
        for row in h:
            assert zg.solve_left(m, row) is not None


class TestHNFMod:
    @given(small_matrices(3), st.integers(2, 64))
    @settings(max_examples=100, deadline=None)
    def test_matches_stacked_hnf(self, m, mod):
        nc = zg.dims(m)[1]
        stacked = zg.matrix(
            list(m) + [[mod if i == j else 0 for j in range(nc)] for i in range(nc)]
        )
        h_ref, _ = zg.hermite_normal_form(stacked)
        h_ref = zg.matrix(h_ref[:nc])
        assert zg.hnf_mod(m, mod) == h_ref


class TestSNF:
    def test_coprime_merge(self):
        d, u, v = zg.smith_normal_form(zg.matrix([[2, 0], [0, 3]]))
        assert [d[0][0], d[1][1]] == [1, 6]

    def test_zero(self):
        d, _, _ = zg.smith_normal_form(zg.zeros(2, 2))
        assert d == zg.zeros(2, 2)

    def test_2468(self):
        m = zg.matrix([[2, 4], [6, 8]])
        d, u, v = zg.smith_normal_form(m)
        assert [d[0][0], d[1][1]] == [2, 4]
        assert zg.mat_mul(zg.mat_mul(u, m), v) == d

    @given(small_matrices())
    @settings(max_examples=120, deadline=None)
    def test_properties_and_oracle(self, m):
        d, u, v = zg.smith_normal_form(m)
        assert zg.mat_mul(zg.mat_mul(u, m), v) == d
        assert abs(zg.det(u)) == 1 and abs(zg.det(v)) == 1
        nr, nc = zg.dims(d)
        diag = [d[i][i] for i in range(min(nr, nc))]
        for i in range(nr):
            for j in range(nc):
                if i != j:
                    assert d[i][j] == 0
        nz = [x for x in diag if x]
        assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
        assert nz == snf_oracle(m)


class TestGroups:
    def test_z2_x_z3(self):
        g = zg.group_from_relations(2, zg.matrix([[2, 0], [0, 3]]))
        assert g.invariant_factors == (6,) and g.free_rank == 0

    def test_free(self):
        g = zg.group_from_relations(3, ())
        assert g.free_rank == 3 and g.invariant_factors == ()

    def test_coprime_relations_trivial(self):
        g = zg.group_from_relations(1, zg.matrix([[5], [7]]))
        assert g.is_trivial

    @given(small_matrices())
    @settings(max_examples=60, deadline=None)
    def test_order_equals_det(self, m):
        nr, nc = zg.dims(m)
        if nr != nc:
            return
        dt = abs(zg.det(m))
        if dt == 0:
            return
        g = zg.group_from_relations(nc, m)
        assert g.order == dt

    def test_p_part(self):
        g = zg.AbGroup((2, 12))
        assert zg.p_part_invariants(g, 2) == [4, 2]
        assert zg.p_part_invariants(zg.AbGroup((18,)), 3) == [9]
        assert zg.p_part_invariants(zg.AbGroup((15,)), 2) == []

    def test_invalid_chain_rejected(self):
        with pytest.raises(ValueError):
            zg.AbGroup((4, 6))
        with pytest.raises(ValueError):
            zg.AbGroup((1, 2))


class TestSNFDiagonalMod:
    @given(small_matrices(3), st.sampled_from([2, 3, 5]), st.integers(1, 5))
    @settings(max_examples=100, deadline=None)
    def test_p_part_agreement(self, m, p, b):
        nc = zg.dims(m)[1]
        g = zg.group_from_relations(nc, m)
        mod = p**b
        diag = zg.snf_diagonal_mod(m, mod)
        # Oracle: p-parts of the true invariants, capped at p^b, plus p^b
        # for every free generator.
        want = sorted(
            [min(p ** max(0, _pval(d, p)), mod) for d in g.invariant_factors]
            + [mod] * g.free_rank
        )
        got = sorted(gcd(x, mod) for x in diag)
        assert [x for x in got if x > 1] == [x for x in want if x > 1]


def _pval(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class TestSolvers:
    @given(small_matrices(), st.lists(small_entries, min_size=1, max_size=4))
    @settings(max_examples=80, deadline=None)
    def test_solve_roundtrip(self, m, coeffs):
        nr = zg.dims(m)[0]
        x = tuple((coeffs * nr)[:nr])
        b = zg.vec_mat(x, m)
        y = zg.solve_left(m, b)
        assert y is not None
        assert zg.vec_mat(y, m) == b

    @given(small_matrices())
    @settings(max_examples=60, deadline=None)
    def test_kernel(self, m):
        k = zg.left_kernel(m)
        for row in k:
            assert not any(zg.vec_mat(row, m))
