import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pvarpath import (
    BudgetError,
    ValidationError,
    ancestor_index,
    build_homeomorphism,
    digits,
    power_table,
    qadic_grid,
    qadic_table,
    random_refining_table,
    validate_refining,
)
from pvarpath.partition import PartitionGrid, RefiningTable, digits_matrix


class TestQadicGrid:
    def test_endpoints_only(self):
        assert qadic_grid(2, 0).points.tolist() == [0.0, 1.0]

    def test_quarters(self):
        assert qadic_grid(2, 2).points.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_thirds(self):
        np.testing.assert_array_equal(
            qadic_grid(3, 1).points, np.array([0.0, 1.0, 2.0, 3.0]) / 3.0
        )

    def test_count(self):
        g = qadic_grid(3, 4)
        assert g.points.size == 3 ** 4 + 1
        assert g.mesh == pytest.approx(3.0 ** -4)

    def test_budget_guard(self, monkeypatch):
        monkeypatch.setenv("PVAR_MAX_INTERVALS", "1024")
        with pytest.raises(BudgetError):
            qadic_grid(2, 11)
        qadic_grid(2, 10)  # exactly at budget is fine

    def test_bad_args(self):
        with pytest.raises(ValidationError):
            qadic_grid(1, 3)
        with pytest.raises(ValidationError):
            qadic_grid(2, -1)


class TestDigits:
    def test_ternary_71(self):
        # 71 = 2 + 2*3 + 1*9 + 2*27 + 0*81
        assert digits(71, 5, 3).digits == (2, 2, 1, 2, 0)

    def test_zero_index(self):
        assert digits(0, 4, 5).digits == (0, 0, 0, 0)

    def test_binary_5(self):
        assert digits(5, 3, 2).digits == (1, 0, 1)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            digits(8, 3, 2)
        with pytest.raises(ValidationError):
            digits(-1, 3, 2)

    @given(q=st.integers(2, 5), n=st.integers(0, 8), data=st.data())
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, q, n, data):
        k = data.draw(st.integers(0, q ** n - 1)) if n > 0 else 0
        dv = digits(k, n, q)
        assert dv.index == k
        assert len(dv) == n

    def test_matrix_agrees_with_scalar(self):
        mat = digits_matrix(5, 3)
        for k in (0, 1, 71, 242):
            assert tuple(mat[k]) == digits(k, 5, 3).digits


class TestAncestor:
    def test_ternary_levels(self):
        assert ancestor_index(4, 5, 71, 3) == 23
        assert ancestor_index(3, 5, 71, 3) == 7
        assert ancestor_index(2, 5, 71, 3) == 2

    def test_root(self):
        assert ancestor_index(0, 6, 17, 2) == 0

    def test_level_order(self):
        with pytest.raises(ValidationError):
            ancestor_index(5, 5, 0, 2)

    @given(q=st.integers(2, 5), n=st.integers(2, 7), data=st.data())
    @settings(max_examples=200, deadline=None)
    def test_child_index_relation(self, q, n, data):
        # descending one level multiplies by q and adds the digit d_{n-m}(k)
        k = data.draw(st.integers(0, q ** n - 1))
        m = data.draw(st.integers(0, n - 2))
        d = digits(k, n, q).digits
        assert ancestor_index(m + 1, n, k, q) == q * ancestor_index(m, n, k, q) + d[n - m - 1]


class TestRefining:
    def test_qadic_table_passes(self):
        report = validate_refining(qadic_table(2, 6))
        assert report.passed
        assert report.mesh == pytest.approx(2.0 ** -6)

    def test_square_table_passes(self):
        # (q i / q**(n+1))**2 == (i / q**n)**2 — nesting survives the square
        report = validate_refining(power_table(3, 5, 2.0))
        assert report.passed

    def test_perturbed_point_fails_at_location(self):
        table = qadic_table(2, 4)
        pts = table.levels[3].points.copy()
        pts[5] += 1e-9
        bad = PartitionGrid(q=2, level=3, points=pts, generator="table")
        levels = list(table.levels)
        levels[3] = bad
        report = validate_refining(RefiningTable(q=2, levels=tuple(levels)))
        assert not report.passed
        # the corrupted level-3 point no longer matches its level-4 copy
        assert report.violations == ((3, 5),)

    def test_mesh_threshold_report(self):
        report = validate_refining(qadic_table(2, 3), mesh_threshold=0.2)
        assert report.mesh_ok
        report = validate_refining(qadic_table(2, 1), mesh_threshold=0.2)
        assert not report.mesh_ok

    def test_random_table_is_refining(self):
        report = validate_refining(random_refining_table(3, 6, seed=9))
        assert report.passed


class TestHomeomorphism:
    def test_identity_on_qadic(self):
        table = build_homeomorphism(qadic_table(2, 8))
        pts = table.s_points
        np.testing.assert_array_equal(table.forward(pts), pts)

    def test_square_root_map(self):
        table = build_homeomorphism(power_table(2, 8, 2.0))
        # table abscissae are squares, so forward recovers the square root
        np.testing.assert_array_equal(table.forward(table.s_points), table.u_points)
        np.testing.assert_allclose(
            table.forward(table.s_points), np.sqrt(table.s_points), atol=1e-15
        )

    def test_round_trip_on_random_table_points(self):
        table = build_homeomorphism(random_refining_table(2, 10, seed=4))
        rng = np.random.default_rng(0)
        idx = rng.integers(0, table.s_points.size, size=1000)
        s = table.s_points[idx]
        np.testing.assert_array_equal(table.inverse(table.forward(s)), s)

    def test_monotone_and_fixed_endpoints(self):
        table = build_homeomorphism(random_refining_table(3, 6, seed=2))
        fwd = table.forward(table.s_points)
        assert np.all(np.diff(fwd) > 0)
        assert fwd[0] == 0.0 and fwd[-1] == 1.0

    def test_rejects_broken_table(self):
        table = qadic_table(2, 4)
        pts = table.levels[4].points.copy()
        pts[3] = pts[2]  # duplicates break strict monotonicity
        with pytest.raises(ValidationError):
            PartitionGrid(q=2, level=4, points=pts, generator="table")
