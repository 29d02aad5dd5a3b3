import numpy as np

from claims_reserving.exceptions import TriangleFormatError, ValidationError, WrongKindError
from claims_reserving.tests.utils import TestCase, random_runoff, runoff_triangle
from claims_reserving.triangle import (
    Triangle,
    TriangleKind,
    cumulate,
    cumulative_from_ratios,
    decumulate,
    dev_ratios,
    reserve_sum,
    triangle_from_json,
    triangle_to_json,
    validate_runoff,
)


class TestTriangle(TestCase):
    def test_default_labels_and_mask(self):
        t = Triangle(values=[[100, 50], [120, np.nan]])

        self.assertEqual(t.origin_labels, ("1", "2"))
        self.assertEqual(t.dev_labels, ("0", "1"))
        self.assertEqual(t.n_observed, 3)
        self.assertTrue(t.unobserved[1, 1])
        self.assertEqual(t.kind, TriangleKind.INCREMENTAL)

    def test_arrays_are_frozen(self):
        t = Triangle(values=[[1.0, 2.0], [3.0, np.nan]])
        with self.assertRaises(ValueError):
            t.values[0, 0] = 5.0

    def test_observed_cell_without_value_is_rejected(self):
        with self.assertRaises(TriangleFormatError):
            Triangle(values=[[1.0, np.nan]], observed=[[True, True]])

    def test_negative_epsilon_shift_is_rejected(self):
        with self.assertRaises(ValidationError):
            Triangle(values=[[1.0]], epsilon_shift=-1.0)

    def test_cumulate_row(self):
        t = Triangle(values=[[100, 50, 25], [100, np.nan, np.nan]])
        c = cumulate(t)

        self.assertEqual(c.kind, TriangleKind.CUMULATIVE)
        self.assertArrayClose(c.values[0], [100, 150, 175])
        self.assertEqual(c.values[1, 0], 100)
        self.assertTrue(np.isnan(c.values[1, 1:]).all())
        np.testing.assert_array_equal(c.observed, t.observed)

    def test_decumulate_row(self):
        c = Triangle(values=[[100, 150, 175], [100, 100, np.nan]], kind=TriangleKind.CUMULATIVE)
        x = decumulate(c)

        self.assertArrayClose(x.values[0], [100, 50, 25])
        self.assertArrayClose(x.values[1, :2], [100, 0])

    def test_cumulate_round_trip(self):
        rng = np.random.default_rng(7)
        for n in range(1, 8):
            t = random_runoff(rng, n)
            back = decumulate(cumulate(t))
            np.testing.assert_allclose(back.observed_values, t.observed_values, rtol=1e-12)

    def test_wrong_kind(self):
        t = Triangle(values=[[1.0, 2.0]])
        with self.assertRaises(WrongKindError):
            decumulate(t)
        with self.assertRaises(WrongKindError):
            dev_ratios(t)
        with self.assertRaises(WrongKindError):
            cumulate(cumulate(t))

    def test_dev_ratios(self):
        c = Triangle(values=[[100, 150, 175], [80, 80, 80]], kind=TriangleKind.CUMULATIVE)
        ratios = dev_ratios(c)

        self.assertArrayClose(ratios[0], [100, 1.5, 175 / 150])
        self.assertArrayClose(ratios[1], [80, 1, 1])

    def test_dev_ratios_zero_denominator(self):
        c = Triangle(values=[[0, 10]], kind=TriangleKind.CUMULATIVE)
        with self.assertRaises(ValidationError):
            dev_ratios(c)

    def test_ratios_round_trip(self):
        rng = np.random.default_rng(11)
        t = cumulate(random_runoff(rng, 6))
        rebuilt = cumulative_from_ratios(np.where(t.observed, dev_ratios(t), 1.0))
        np.testing.assert_allclose(rebuilt[t.observed], t.values[t.observed], rtol=1e-12)

    def test_reserve_sum(self):
        full = Triangle(values=[[100, 50], [120, 27.5]], observed=[[True, True], [True, False]])
        self.assertEqual(reserve_sum(full), 27.5)

        zero = Triangle(values=[[100, 0], [120, 0]], observed=[[True, True], [True, False]])
        self.assertEqual(reserve_sum(zero), 0.0)

        two_cells = Triangle(
            values=[[100, 50, 25], [110, 55, 27.5], [120, 60, 30]],
            observed=[[True, True, True], [True, True, False], [True, False, False]],
        )
        self.assertEqual(reserve_sum(two_cells, np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=bool)), 27.5)

    def test_reserve_sum_missing_value(self):
        t = Triangle(values=[[1.0, 2.0], [3.0, np.nan]])
        with self.assertRaises(ValidationError):
            reserve_sum(t)

    def test_json_round_trip_keeps_nulls(self):
        t = Triangle(values=[[1.0, 2.0], [3.0, np.nan]], origin_labels=("a", "b"))
        data = triangle_to_json(t)

        self.assertIsNone(data["values"][1][1])
        back = triangle_from_json(data)
        self.assertEqual(back.origin_labels, ("a", "b"))
        np.testing.assert_array_equal(back.observed, t.observed)

    def test_json_ragged_rows(self):
        with self.assertRaises(TriangleFormatError):
            triangle_from_json({"values": [[1, 2], [3]]})


class TestValidateRunoff(TestCase):
    def test_regular_shape(self):
        report = validate_runoff(runoff_triangle(np.ones((4, 4))))
        self.assertTrue(report.is_regular)
        self.assertTrue(report.ok)
        self.assertEqual(report.issues, [])

    def test_interior_gap_is_reported_not_raised(self):
        values = np.array([[1.0, np.nan, 3.0], [1.0, 2.0, np.nan], [1.0, np.nan, np.nan]])
        report = validate_runoff(Triangle(values=values))

        self.assertFalse(report.is_justified)
        self.assertEqual(report.gaps, [(0, 1)])
        self.assertIn("Row 1 has a gap at column 2", report.issues)

    def test_longer_younger_row(self):
        values = np.array([[1.0, np.nan], [1.0, 2.0]])
        report = validate_runoff(Triangle(values=values))
        self.assertFalse(report.is_justified)
        self.assertFalse(report.is_regular)

    def test_taylor_ashe_counts(self):
        t = self.load_triangle("taylor_ashe")
        self.assertEqual(t.n_observed, 55)
        self.assertEqual(t.n_unobserved, 45)
        self.assertTrue(validate_runoff(t).is_regular)
