import math

from django.test import SimpleTestCase
import numpy as np

from Sensing.analytic import (
    GROUND,
    BlochVector,
    LindbladParams,
    alt_p1,
    amplitude_damping_coefficients,
    bloch_local_p1,
    bloch_step,
    closed_form_table,
    coupling_matrix,
    decay_probability,
    decay_rate_from_probability,
    dephasing_probability,
    p1_local_ad,
    p1_local_pd,
    phase_rate_from_probability,
    shift_vector,
)
from Sensing.cache_utils import clear_simulation_cache
from Sensing.channels import NoiseKind
from Sensing.circuits import Detection
from Sensing.experiments import AltCheck, alt_check_rows


class PhaseDampingClosedFormTests(SimpleTestCase):
    def test_known_value(self):
        expected = 0.5 * (1 - 0.9 ** 1.5 * math.cos(1.0))
        self.assertAlmostEqual(p1_local_pd(0.1, 1.0, 1.0, 1), expected, places=15)

    def test_vectorizes_over_folds(self):
        values = p1_local_pd(0.1, 1.0, 1.0, np.arange(3))
        self.assertEqual(values.shape, (3,))
        self.assertAlmostEqual(values[2], p1_local_pd(0.1, 1.0, 1.0, 2), places=15)

    def test_slope_convention(self):
        self.assertAlmostEqual(
            p1_local_pd(0.2, 0.5, 1.0, 0, Detection.SLOPE),
            0.5 * (1 + math.sqrt(0.8) * math.sin(0.5)),
            places=15,
        )


class AmplitudeDampingClosedFormTests(SimpleTestCase):
    def test_single_block(self):
        gamma = 0.2
        offset, contrast = amplitude_damping_coefficients(gamma, 0, 0)
        self.assertAlmostEqual(float(offset), gamma, places=15)
        self.assertAlmostEqual(float(contrast), (1 - gamma) ** 1.5, places=15)

    def test_noiseless_limit(self):
        for m in range(4):
            self.assertAlmostEqual(p1_local_ad(0.0, 1.0, 0.8, m), 0.5 * (1 - math.cos(0.8)), places=15)

    def test_full_damping_reads_ground(self):
        self.assertEqual(p1_local_ad(1.0, 1.0, 0.8, 2), 0.0)

    def test_rate_range(self):
        with self.assertRaises(ValueError):
            p1_local_ad(1.5, 1.0, 1.0, 0)

    def test_unbalanced_folds(self):
        gamma, field = 0.1, 0.6
        r = (1 - gamma) ** 1.5
        g1 = (1 - r) / (1 - r)
        g2 = (1 - r ** 2) / (1 - r)
        vz = gamma * (r ** 2 + g2) + r ** 3 * (r - gamma * g1) * math.cos(field)
        self.assertAlmostEqual(p1_local_ad(gamma, field, 1.0, 1, 2), 0.5 * (1 - vz), places=14)


class BlochEquationTests(SimpleTestCase):
    def test_matches_closed_forms(self):
        for detection in Detection.values:
            for rate in (0.0, 0.05, 0.2):
                for n, m in ((0, 0), (1, 1), (2, 2), (0, 2), (2, 1)):
                    pd = bloch_local_p1(NoiseKind.PHASE_DAMPING, rate, 1.0, 0.9, n, m, detection)
                    ad = bloch_local_p1(NoiseKind.AMPLITUDE_DAMPING, rate, 1.0, 0.9, n, m, detection)
                    self.assertAlmostEqual(ad, p1_local_ad(rate, 1.0, 0.9, n, m, detection), places=10)
                    if n == m:
                        self.assertAlmostEqual(pd, p1_local_pd(rate, 1.0, 0.9, n, detection), places=10)

    def test_free_decay(self):
        decay = 0.4
        v = bloch_step(BlochVector(0.0, 0.0, -1.0), coupling_matrix(decay_rate=decay), shift_vector(decay), 2.0)
        self.assertAlmostEqual(v.z, 1 - 2 * math.exp(-decay * 2.0), places=13)

    def test_singular_generator_with_shift(self):
        with self.assertRaises(np.linalg.LinAlgError):
            bloch_step(GROUND, np.zeros((3, 3)), shift_vector(0.1), 1.0)

    def test_rate_must_be_below_one(self):
        with self.assertRaises(ValueError):
            bloch_local_p1(NoiseKind.PHASE_DAMPING, 1.0, 1.0, 1.0, 0)


class RateMappingTests(SimpleTestCase):
    def test_inverse_pairs(self):
        dt = 0.0157
        self.assertAlmostEqual(phase_rate_from_probability(dephasing_probability(0.05, dt), dt), 0.05, places=12)
        self.assertAlmostEqual(decay_rate_from_probability(decay_probability(0.01, dt), dt), 0.01, places=12)

    def test_dephasing_matches_coherence_decay(self):
        # sqrt(1 - lambda) = exp(-Lambda dt)
        self.assertAlmostEqual(math.sqrt(1 - dephasing_probability(0.3, 0.5)), math.exp(-0.15), places=15)


class ClosedFormTableTests(SimpleTestCase):
    def setUp(self):
        clear_simulation_cache()

    def test_rows(self):
        rows = closed_form_table(NoiseKind.PHASE_DAMPING, [0.0, 0.1], 1.0, math.pi / 4, [0, 2])
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0][0], 0.0)
        self.assertAlmostEqual(rows[1][2], p1_local_pd(0.1, 1.0, math.pi / 4, 2), places=15)
        self.assertEqual(closed_form_table(NoiseKind.PHASE_DAMPING, [0.0, 0.1], 1.0, math.pi / 4, [0, 2]), rows)


class AverageLiouvillianTests(SimpleTestCase):
    def setUp(self):
        segment = math.pi / 10
        self.alt = AltCheck(phase_rate=0.05, decay_rate=0.01, field=1.0, segment_time=segment, gate_time=0.05 * segment)
        self.rows = alt_check_rows(self.alt, range(11))

    def test_noiseless_unit_is_exact(self):
        params = LindbladParams(field=1.0, segment_time=0.3)
        for k in range(4):
            self.assertAlmostEqual(alt_p1(params, k), 0.5 * (1 - math.cos(0.3 * (k + 1))), places=12)

    def test_phase_damping_first_order(self):
        worst = max(abs(sim - alt) for _, sim, alt, *_ in self.rows)
        self.assertLess(worst, 0.01)

    def test_amplitude_damping_second_order(self):
        worst = max(abs(row[3] - row[5]) for row in self.rows)
        self.assertLess(worst, 0.02)
        last = self.rows[-1]
        self.assertEqual(last[0], 10)
        self.assertLess(abs(last[3] - last[5]), abs(last[3] - last[4]))

    def test_order_validation(self):
        with self.assertRaises(ValueError):
            alt_p1(LindbladParams(field=1.0, segment_time=0.3), 0, order=3)
        with self.assertRaises(ValueError):
            LindbladParams(phase_rate=-1.0)
