import math
from dataclasses import replace

from django.test import SimpleTestCase

from Sensing.cache_utils import clear_simulation_cache
from Sensing.channels import NoiseKind, NoiseSpec
from Sensing.circuits import Detection, ProtocolSpec
from Sensing.experiments import (
    ExperimentConfig,
    ExperimentKind,
    Method,
    MetricRow,
    ResourcePolicy,
    SweepVariable,
    TrialOutcome,
    TrialRunner,
    build_plan,
    crossover_field,
    find_crossover,
    find_sensitivity,
    fold_trace,
    infinite_shot_compare,
    metric_row,
    ramsey_resources,
    relative_error_sweep,
    run_experiment,
    run_trial,
    run_zne_trial,
    success_count,
    success_probability,
)
from Sensing.fitters import FitKind

FIELD_GRID = tuple(round(0.05 * k, 12) for k in range(1, 21))


def config(kind=ExperimentKind.RELATIVE_ERROR, detection=Detection.VARIANCE, noise_kind=NoiseKind.PHASE_DAMPING,
           rate=0.0, field=1.0, duration=1.0, n_qubits=1, **kwargs):
    protocol = ProtocolSpec(detection, NoiseSpec(noise_kind, rate), field, duration, n_qubits=n_qubits)
    return ExperimentConfig(name='test', kind=kind, protocol=protocol, **kwargs)


class ResourceAccountingTests(SimpleTestCase):
    def test_policies(self):
        self.assertEqual(ramsey_resources(ResourcePolicy.NONE, 1000, 1.0, 3), (1000, 1.0))
        self.assertEqual(ramsey_resources(ResourcePolicy.EQUAL_SHOTS, 1000, 1.0, 3), (3000, 1.0))
        self.assertEqual(ramsey_resources(ResourcePolicy.EQUAL_TIME, 1000, 1.0, 3), (1000, 3.0))
        self.assertEqual(ramsey_resources(ResourcePolicy.EQUAL_BOTH, 1000, 1.0, 3), (3000, 3.0))

    def test_plan_uses_circuit_count(self):
        cfg = config(rate=0.1, fold_counts=(0, 1, 2, 3), n_s=500)
        plan = build_plan(cfg, (Method.RAMSEY_EQUAL_SHOTS, Method.RAMSEY_EQUAL_TIME))
        (_, _, shots, duration), (_, _, time_shots, time_duration) = plan.baselines
        self.assertEqual((shots, duration), (2000, 1.0))
        self.assertEqual((time_shots, time_duration), (500, 4.0))


class TrialTests(SimpleTestCase):
    def setUp(self):
        clear_simulation_cache()

    def test_noiseless_exact_trial_returns_truth(self):
        zne, unmitigated = run_zne_trial(config(exact_p=True), 0.8, 0)
        self.assertAlmostEqual(zne, 0.8, places=12)
        self.assertAlmostEqual(unmitigated, 0.8, places=12)

    def test_exact_linear_extrapolation_helps(self):
        zne, unmitigated = run_zne_trial(config(rate=0.1, exact_p=True, fit=FitKind.LINEAR), 0.5, 0)
        self.assertLess(abs(zne - 0.5), abs(unmitigated - 0.5))

    def test_shot_trials_are_reproducible(self):
        cfg = config(rate=0.1, n_s=1000, seed=2024)
        self.assertEqual(run_zne_trial(cfg, 0.5, 17), run_zne_trial(cfg, 0.5, 17))
        self.assertNotEqual(run_zne_trial(cfg, 0.5, 17), run_zne_trial(cfg, 0.5, 18))

    def test_trial_methods(self):
        cfg = config(detection=Detection.SLOPE, rate=0.1, field=0.5, exact_p=True)
        methods = (Method.ZNE_LINEAR, Method.ZNE_RICHARDSON, Method.ZNE_EXPONENTIAL, Method.RAMSEY, Method.ZNE_INFORMED_SLOPE)
        outcome = run_trial(build_plan(cfg, methods), 0)
        self.assertEqual(set(outcome.estimates), set(methods))
        self.assertAlmostEqual(outcome.estimates[Method.ZNE_INFORMED_SLOPE], 0.5, places=6)
        self.assertAlmostEqual(outcome.estimates[Method.RAMSEY], outcome.unmitigated, places=12)


class SuccessProbabilityTests(SimpleTestCase):
    def test_strict_comparison(self):
        better = [TrialOutcome(i, zne=1.0, unmitigated=1.1) for i in range(4)]
        tied = [TrialOutcome(i, zne=1.25, unmitigated=0.75) for i in range(4)]
        self.assertEqual(success_count(better, 1.0), 4)
        self.assertEqual(success_count(tied, 1.0), 0)

    def test_dip_at_quarter_turn(self):
        results = {}
        for rate in (0.05, 0.15):
            for duration in (math.pi / 4, math.pi / 2):
                cfg = config(kind=ExperimentKind.SUCCESS_PROBABILITY, rate=rate, duration=duration, n_s=10_000, n_t=500)
                results[rate, duration] = success_probability(cfg)
        for rate in (0.05, 0.15):
            self.assertLess(results[rate, math.pi / 2], 0.55)
        self.assertGreaterEqual(results[0.15, math.pi / 4] - results[0.15, math.pi / 2], 0.1)


class RelativeErrorTests(SimpleTestCase):
    def setUp(self):
        clear_simulation_cache()
        self.cfg = config(
            detection=Detection.SLOPE, rate=0.1, n_s=10_000, n_t=500,
            sweep_variable=SweepVariable.FIELD, sweep_values=FIELD_GRID,
        )

    def test_noiseless_exact_errors_vanish(self):
        cfg = config(exact_p=True, sweep_variable=SweepVariable.FIELD, sweep_values=(0.5, 1.0))
        methods = (Method.ZNE_LINEAR, Method.RAMSEY, Method.RAMSEY_EQUAL_BOTH)
        for row in relative_error_sweep(cfg, methods):
            self.assertEqual(row.samples, 1)
            for method in methods:
                self.assertAlmostEqual(row.errors[method], 0.0, places=12)

    def test_finite_shot_crossover(self):
        rows = relative_error_sweep(self.cfg, (Method.ZNE_LINEAR, Method.ZNE_RICHARDSON, Method.RAMSEY_EQUAL_SHOTS))
        first, last = rows[0], rows[-1]
        self.assertLess(first.errors[Method.RAMSEY_EQUAL_SHOTS], first.errors[Method.ZNE_LINEAR])
        self.assertLess(last.errors[Method.ZNE_LINEAR], last.errors[Method.RAMSEY_EQUAL_SHOTS])
        for row in rows[:2]:
            self.assertGreater(row.errors[Method.ZNE_RICHARDSON], row.errors[Method.ZNE_LINEAR])

    def test_crossover_moves_down_with_shots(self):
        few = crossover_field(replace(self.cfg, n_s=1000), FIELD_GRID)
        many = crossover_field(self.cfg, FIELD_GRID)
        self.assertIsNotNone(few)
        self.assertIsNotNone(many)
        self.assertGreaterEqual(few, many)

    def test_infinite_shot_superiority(self):
        for row in infinite_shot_compare(self.cfg, FIELD_GRID):
            self.assertLess(row.errors[Method.ZNE_LINEAR], row.errors[Method.RAMSEY], row.x)

    def test_sensitivity_ordering_on_low_field_grid(self):
        grid = tuple(round(0.002 * k, 12) for k in range(1, 26))
        cfg = replace(self.cfg, n_t=200, sweep_values=grid)
        zne = (Method.ZNE_LINEAR, Method.ZNE_RICHARDSON)
        equalized = (Method.RAMSEY_EQUAL_SHOTS, Method.RAMSEY_EQUAL_TIME, Method.RAMSEY_EQUAL_BOTH)
        rows = relative_error_sweep(cfg, (*zne, Method.RAMSEY, *equalized))
        found = {method: find_sensitivity(rows, method) for method in (*zne, Method.RAMSEY, *equalized)}
        self.assertNotIn(None, found.values(), found)
        for method in equalized:
            self.assertLess(found[method], min(found[m] for m in zne), method)
        self.assertLess(found[Method.RAMSEY], found[Method.ZNE_RICHARDSON])
        self.assertLess(found[Method.RAMSEY_EQUAL_TIME], found[Method.RAMSEY_EQUAL_SHOTS])

    def test_infinite_shot_superiority_under_amplitude_damping(self):
        cfg = config(detection=Detection.SLOPE, noise_kind=NoiseKind.AMPLITUDE_DAMPING, rate=0.01)
        for row in infinite_shot_compare(cfg, FIELD_GRID):
            self.assertLess(row.errors[Method.ZNE_LINEAR], row.errors[Method.RAMSEY], row.x)

    def test_ghz_ordering(self):
        cfg = config(
            detection=Detection.SLOPE, rate=0.005, n_qubits=4, n_s=10_000, n_t=300,
            sweep_variable=SweepVariable.FIELD, sweep_values=(0.01, 0.3),
        )
        zne = (Method.ZNE_LINEAR, Method.ZNE_RICHARDSON)
        small, large = relative_error_sweep(cfg, (*zne, Method.RAMSEY_EQUAL_BOTH))
        self.assertLess(small.errors[Method.RAMSEY_EQUAL_BOTH], min(small.errors[m] for m in zne))
        self.assertLess(min(large.errors[m] for m in zne), large.errors[Method.RAMSEY_EQUAL_BOTH])

    def test_worker_count_does_not_change_results(self):
        cfg = replace(self.cfg, n_t=40, sweep_values=(0.2, 0.6))
        methods = (Method.ZNE_LINEAR, Method.RAMSEY_EQUAL_SHOTS)
        serial = relative_error_sweep(cfg, methods)
        with TrialRunner(2) as runner:
            parallel = relative_error_sweep(cfg, methods, runner)
        self.assertEqual(serial, parallel)

    def test_aggregation_ignores_trial_order(self):
        outcomes = [
            TrialOutcome(i, zne=1.0 + 0.01 * i, unmitigated=0.9, estimates={Method.RAMSEY: 0.9 + 0.003 * i})
            for i in range(25)
        ]
        forward = metric_row(1.0, outcomes, 1.0, (Method.RAMSEY,), with_nu=True)
        backward = metric_row(1.0, list(reversed(outcomes)), 1.0, (Method.RAMSEY,), with_nu=True)
        self.assertEqual(forward, backward)


def rows_from(errors_by_method, grid=(0.1, 0.2, 0.4, 0.5)):
    return [
        MetricRow(x=x, errors={method: values[i] for method, values in errors_by_method.items()})
        for i, x in enumerate(grid)
    ]


class CrossoverTests(SimpleTestCase):
    def test_never_better(self):
        rows = rows_from({Method.ZNE_LINEAR: [2, 2, 2, 2], Method.RAMSEY_EQUAL_SHOTS: [1, 1, 1, 1]})
        self.assertIsNone(find_crossover(rows))

    def test_always_better(self):
        rows = rows_from({Method.ZNE_LINEAR: [1, 1, 1, 1], Method.RAMSEY_EQUAL_SHOTS: [2, 2, 2, 2]})
        self.assertEqual(find_crossover(rows), 0.1)

    def test_must_stay_below(self):
        rows = rows_from({Method.ZNE_LINEAR: [1, 3, 1, 1], Method.RAMSEY_EQUAL_SHOTS: [2, 2, 2, 2]})
        self.assertEqual(find_crossover(rows), 0.4)


class SensitivityTests(SimpleTestCase):
    def test_zero_error_gives_smallest_grid_value(self):
        self.assertEqual(find_sensitivity(rows_from({Method.RAMSEY: [0, 0, 0, 0]}), Method.RAMSEY), 0.1)

    def test_unit_absolute_error_never_crosses(self):
        grid = (0.1, 0.2, 0.4, 0.5)
        rows = rows_from({Method.RAMSEY: [1 / x for x in grid]}, grid)
        self.assertIsNone(find_sensitivity(rows, Method.RAMSEY))

    def test_interpolates_crossing(self):
        grid = (0.1, 0.2, 0.4, 0.5)
        rows = rows_from({Method.RAMSEY: [0.3 / x for x in grid]}, grid)
        self.assertAlmostEqual(find_sensitivity(rows, Method.RAMSEY), 0.3, places=12)


class ExperimentTableTests(SimpleTestCase):
    def setUp(self):
        clear_simulation_cache()

    def test_noiseless_fold_trace_is_flat(self):
        trace = fold_trace(config(field=0.7, exact_p=True))
        self.assertEqual([eta for eta, _ in trace], [0, 1, 3, 5])
        for _, value in trace:
            self.assertAlmostEqual(value, 0.7, places=12)

    def test_closed_form_table_matches_circuits(self):
        cfg = config(
            kind=ExperimentKind.CLOSED_FORM, noise_kind=NoiseKind.AMPLITUDE_DAMPING, duration=math.pi / 4,
            fold_counts=(0, 1, 2), sweep_variable=SweepVariable.RATE, sweep_values=(0.0, 0.1, 0.2),
        )
        (table,) = run_experiment(cfg)
        self.assertEqual(table.headers, ('rate', 'p1[m=0]', 'p1[m=1]', 'p1[m=2]', 'max_circuit_deviation'))
        self.assertEqual(len(table.rows), 3)
        for row in table.rows:
            self.assertLess(row[-1], 1e-12)

    def test_success_table_has_series_columns(self):
        cfg = config(
            kind=ExperimentKind.SUCCESS_PROBABILITY, rate=0.1, n_t=20,
            sweep_variable=SweepVariable.DURATION, sweep_values=(0.5, 1.0),
            series_variable=SweepVariable.RATE, series_values=(0.05, 0.15),
        )
        (table,) = run_experiment(cfg)
        self.assertEqual(table.headers, ('duration', 'nu[rate=0.05]', 'nu[rate=0.15]'))
        for row in table.rows:
            self.assertTrue(all(0.0 <= nu <= 1.0 for nu in row[1:]))

    def test_relative_error_tables(self):
        cfg = config(
            rate=0.1, n_t=10, sweep_variable=SweepVariable.FIELD, sweep_values=(0.5, 1.0),
            methods=(Method.ZNE_LINEAR, Method.RAMSEY),
        )
        table, sensitivity = run_experiment(cfg)
        self.assertEqual(table.headers[:3], ('field', 'zne-linear', 'ramsey'))
        self.assertEqual(sensitivity.headers, ('method', 'sensitivity'))
        self.assertEqual(dict(table.metadata)['n_t'], 10)
