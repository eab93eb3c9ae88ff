import math

from django.test import SimpleTestCase
import numpy as np

from Sensing.analytic import p1_local_ad, p1_local_pd
from Sensing.channels import NoiseKind
from Sensing.circuits import Detection
from Sensing.fitters import (
    FitKind,
    extrapolate,
    fit_ensemble,
    fit_exponential,
    fit_informed,
    fit_informed_ad,
    fit_informed_pd,
    fit_linear,
    fit_noise_model,
    fit_ramsey_fringes,
    fit_richardson,
    fringe_time_grid,
)

FIELDS = (0.1, 0.5, 1.0)
RATES = (0.01, 0.05, 0.1)
CLOSED_FORMS = {
    NoiseKind.PHASE_DAMPING: lambda rate, field, m, detection: p1_local_pd(rate, field, 1.0, m, detection),
    NoiseKind.AMPLITUDE_DAMPING: lambda rate, field, m, detection: p1_local_ad(rate, field, 1.0, m, m, detection),
}


class ExtrapolationTests(SimpleTestCase):
    def test_linear_intercept(self):
        result = fit_linear([(1, 0.9), (3, 0.7), (5, 0.5)])
        self.assertAlmostEqual(result.value_at_zero, 1.0, places=12)
        self.assertAlmostEqual(result.params['slope'], -0.1, places=12)
        self.assertTrue(result.converged)

    def test_linear_least_squares(self):
        result = fit_linear([(1, 1.0), (3, 0.5), (5, 0.4)])
        # Closed-form least squares for three equally spaced points
        self.assertAlmostEqual(result.value_at_zero, (1.0 + 0.5 + 0.4) / 3 - 3 * (0.4 - 1.0) / 4, places=12)

    def test_richardson_is_exact_for_quadratics(self):
        points = [(x, 2.0 - 0.3 * x + 0.05 * x * x) for x in (1, 3, 5)]
        self.assertAlmostEqual(fit_richardson(points).value_at_zero, 2.0, places=12)

    def test_exponential_recovers_model(self):
        points = [(x, 0.2 + 0.8 * math.exp(-0.3 * x)) for x in (1, 3, 5)]
        result = fit_exponential(points)
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.value_at_zero, 1.0, places=8)
        self.assertAlmostEqual(result.params['c'], 0.3, places=6)

    def test_richardson_is_exact_for_each_node_count(self):
        for nodes in ((1, 3), (1, 3, 5, 7), (1, 3, 5, 7, 9)):
            coefficients = [1.5, -0.2, 0.03, -0.004, 0.0005][:len(nodes)]
            points = [(x, sum(c * x ** k for k, c in enumerate(coefficients))) for x in nodes]
            self.assertAlmostEqual(fit_richardson(points).value_at_zero, 1.5, places=9, msg=nodes)

    def test_linear_and_richardson_agree_on_two_points(self):
        points = [(1, 0.83), (3, 0.61)]
        self.assertAlmostEqual(fit_linear(points).value_at_zero, fit_richardson(points).value_at_zero, places=12)

    def test_exponential_on_constant_data(self):
        result = fit_exponential([(1, 0.7), (3, 0.7), (5, 0.7)])
        self.assertAlmostEqual(result.value_at_zero, 0.7, places=9)
        self.assertAlmostEqual(result.params['b'], 0.0, places=9)

    def test_exponential_on_nearly_collinear_data(self):
        # Three-point guess puts c near 0 and b near 4e10
        result = fit_exponential([(1, 1.0), (3, 0.8), (5, 0.6 + 1e-12)])
        self.assertTrue(math.isfinite(result.value_at_zero))
        self.assertLess(abs(result.value_at_zero - 1.1), 1e-3)

    def test_exponential_needs_three_points(self):
        with self.assertRaises(ValueError):
            fit_exponential([(1, 1.0), (3, 0.5)])

    def test_duplicate_abscissae(self):
        with self.assertRaises(ValueError):
            fit_linear([(1, 1.0), (1, 0.9)])
        with self.assertRaises(ValueError):
            fit_richardson([(1, 1.0), (3, 0.9), (3, 0.8)])

    def test_dispatch(self):
        points = [(1, 0.9), (3, 0.7), (5, 0.5)]
        self.assertAlmostEqual(extrapolate(points, FitKind.LINEAR), 1.0, places=12)
        self.assertAlmostEqual(extrapolate(points, FitKind.RICHARDSON), 1.0, places=12)
        with self.assertRaises(ValueError):
            fit_ensemble(points, FitKind.INFORMED_PD)


class InformedFitTests(SimpleTestCase):
    def test_recovers_field_and_rate(self):
        for kind, closed_form in CLOSED_FORMS.items():
            for detection in Detection.values:
                for field in FIELDS:
                    for rate in RATES:
                        data = [(m, closed_form(rate, field, m, detection)) for m in (0, 1, 2)]
                        result = fit_informed(data, 1.0, (0.99 * field, 0.99 * rate), kind, detection)
                        label = (kind, detection, field, rate)
                        self.assertTrue(result.converged, label)
                        self.assertLess(abs(result.params['field'] - field), 1e-6, label)
                        self.assertLess(abs(result.params['rate'] - rate), 1e-6, label)

    def test_zero_field_is_degenerate(self):
        data = [(m, p1_local_pd(0.1, 0.0, 1.0, m)) for m in (0, 1, 2)]
        result = fit_informed_pd(data, 1.0, (0.0, 0.1))
        self.assertTrue(result.degenerate)
        self.assertFalse(result.converged)

    def test_quarter_turn_is_degenerate(self):
        # cos(Bt) = 0 under variance detection leaves lambda unobservable
        duration = math.pi / 2
        data = [(m, p1_local_pd(0.1, 1.0, duration, m)) for m in (0, 1, 2)]
        result = fit_informed_pd(data, duration, (0.99, 0.099))
        self.assertTrue(result.degenerate)
        self.assertFalse(result.converged)

    def test_full_decay_is_degenerate(self):
        data = [(m, p1_local_ad(1.0, 0.5, 1.0, m)) for m in (0, 1, 2)]
        result = fit_informed_ad(data, 1.0, (0.5, 0.99))
        self.assertTrue(result.degenerate)
        self.assertFalse(result.converged)

    def test_needs_distinct_fold_counts(self):
        with self.assertRaises(ValueError):
            fit_informed_pd([(1, 0.3), (1, 0.31)], 1.0, (1.0, 0.1))


class FringeFitTests(SimpleTestCase):
    def test_time_grid_spends_equal_total_time(self):
        times = fringe_time_grid(3, 1.0)
        np.testing.assert_allclose(times, [0.5, 1.0, 1.5])
        self.assertAlmostEqual(sum(times), 3.0)
        with self.assertRaises(ValueError):
            fringe_time_grid(0, 1.0)

    def test_recovers_field_and_rate_from_fringes(self):
        times = fringe_time_grid(3, 1.0)
        for kind in NoiseKind.values:
            if kind == NoiseKind.PHASE_DAMPING:
                data = [(t, p1_local_pd(0.05, 0.5, t, 0)) for t in times]
            else:
                data = [(t, p1_local_ad(0.05, 0.5, t, 0)) for t in times]
            result = fit_ramsey_fringes(data, kind, (0.495, 0.0495))
            self.assertTrue(result.converged)
            self.assertLess(abs(result.value_at_zero - 0.5), 1e-6)
            self.assertLess(abs(result.params['rate'] - 0.05), 1e-6)


class NoiseModelDispatchTests(SimpleTestCase):
    def test_informed_kinds_route_by_channel(self):
        for kind, fit_kind in ((NoiseKind.PHASE_DAMPING, FitKind.INFORMED_PD), (NoiseKind.AMPLITUDE_DAMPING, FitKind.INFORMED_AD)):
            data = [(m, CLOSED_FORMS[kind](0.05, 0.5, m, Detection.SLOPE)) for m in (0, 1, 2)]
            routed = fit_noise_model(data, fit_kind, (0.495, 0.0495), 1.0, Detection.SLOPE)
            direct = fit_informed(data, 1.0, (0.495, 0.0495), kind, Detection.SLOPE)
            self.assertEqual(routed, direct)
            self.assertLess(abs(routed.value_at_zero - 0.5), 1e-6)

    def test_fringe_kinds_route_by_channel(self):
        times = fringe_time_grid(3, 1.0)
        data = [(t, p1_local_ad(0.05, 0.5, t, 0)) for t in times]
        routed = fit_noise_model(data, FitKind.RAMSEY_FRINGE_AD, (0.495, 0.0495))
        self.assertEqual(routed, fit_ramsey_fringes(data, NoiseKind.AMPLITUDE_DAMPING, (0.495, 0.0495)))
        self.assertLess(abs(routed.params['rate'] - 0.05), 1e-6)

    def test_informed_kinds_need_duration(self):
        with self.assertRaises(ValueError):
            fit_noise_model([(0, 0.4), (1, 0.45)], FitKind.INFORMED_PD, (1.0, 0.1))

    def test_extrapolation_kinds_are_rejected(self):
        for kind in (FitKind.LINEAR, FitKind.RICHARDSON, FitKind.EXPONENTIAL):
            with self.assertRaises(ValueError):
                fit_noise_model([(0, 0.4), (1, 0.45), (2, 0.5)], kind, (1.0, 0.1), 1.0)
