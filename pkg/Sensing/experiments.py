"""
Monte-Carlo experiment orchestration.

For every grid point the exact probabilities of all circuits a trial needs
are computed once (and cached) in the parent process and frozen into a
``TrialPlan``. Trials then only draw shots, invert and fit, so they can run
on a process pool without touching the circuit engine. Trial ``i`` of grid
point ``j`` always uses the RNG stream (seed, j * n_t + i) and results are
reduced in trial order with ``math.fsum``, which makes every table
independent of the worker count.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
import logging
import math
import time

from django.db import models
import numpy as np

from .analytic import (
    alt_p1_global_ad,
    alt_p1_global_pd,
    closed_form_table,
    decay_probability,
    dephasing_probability,
)
from .channels import NoiseKind, NoiseSpec
from .circuits import (
    Detection,
    ProtocolSpec,
    build_repeated_ramsey,
    execute,
    protocol_probability,
)
from .fitters import FitKind, fit_ensemble, fit_informed, fit_ramsey_fringes, fringe_time_grid
from .sampling import RngStream, draw_ensemble, fold_probabilities, invert, measure

logger = logging.getLogger(__name__)


class ExperimentKind(models.TextChoices):
    SUCCESS_PROBABILITY = 'success_probability', 'ZNE success probability'
    FOLD_TRACES = 'fold_traces', 'Mean estimate per noise scale'
    RELATIVE_ERROR = 'relative_error', 'Relative error sweep'
    CROSSOVER = 'crossover', 'Crossover field vs shots'
    INFINITE_SHOT = 'infinite_shot', 'Infinite-shot comparison'
    CLOSED_FORM = 'closed_form', 'Closed-form p1 vs rate'
    INFORMED_FIT = 'informed_fit', 'Noise-informed fitting'
    ALT_CHECK = 'alt_check', 'Average Liouvillian check'


class Method(models.TextChoices):
    ZNE_LINEAR = 'zne-linear', 'ZNE (linear)'
    ZNE_RICHARDSON = 'zne-richardson', 'ZNE (Richardson)'
    ZNE_EXPONENTIAL = 'zne-exponential', 'ZNE (exponential)'
    RAMSEY = 'ramsey', 'Ramsey'
    RAMSEY_EQUAL_SHOTS = 'ramsey-equal-shots', 'Ramsey, equal shots'
    RAMSEY_EQUAL_TIME = 'ramsey-equal-time', 'Ramsey, equal time'
    RAMSEY_EQUAL_BOTH = 'ramsey-equal-both', 'Ramsey, equal shots and time'
    ZNE_INFORMED_SLOPE = 'zne-informed-slope', 'Noise-informed ZNE (slope)'
    ZNE_INFORMED_VARIANCE = 'zne-informed-variance', 'Noise-informed ZNE (variance)'
    RAMSEY_FRINGE_SLOPE = 'ramsey-fringe-slope', 'Ramsey fringe fit (slope)'
    RAMSEY_FRINGE_VARIANCE = 'ramsey-fringe-variance', 'Ramsey fringe fit (variance)'


class ResourcePolicy(models.TextChoices):
    NONE = 'none', 'No equalization'
    EQUAL_SHOTS = 'equal_shots', 'Equal shots'
    EQUAL_TIME = 'equal_time', 'Equal sensing time'
    EQUAL_BOTH = 'equal_both', 'Equal shots and sensing time'


class SweepVariable(models.TextChoices):
    FIELD = 'field', 'Field strength B'
    DURATION = 'duration', 'Sensing time t'
    RATE = 'rate', 'Damping rate'
    SHOTS = 'shots', 'Shots per circuit'
    QUBITS = 'qubits', 'Register size'
    FOLDS = 'folds', 'Global fold count k'


ZNE_METHODS = {
    Method.ZNE_LINEAR: FitKind.LINEAR,
    Method.ZNE_RICHARDSON: FitKind.RICHARDSON,
    Method.ZNE_EXPONENTIAL: FitKind.EXPONENTIAL,
}

RAMSEY_POLICIES = {
    Method.RAMSEY: ResourcePolicy.NONE,
    Method.RAMSEY_EQUAL_SHOTS: ResourcePolicy.EQUAL_SHOTS,
    Method.RAMSEY_EQUAL_TIME: ResourcePolicy.EQUAL_TIME,
    Method.RAMSEY_EQUAL_BOTH: ResourcePolicy.EQUAL_BOTH,
}

INFORMED_METHODS = {
    Method.ZNE_INFORMED_SLOPE: Detection.SLOPE,
    Method.ZNE_INFORMED_VARIANCE: Detection.VARIANCE,
}

FRINGE_METHODS = {
    Method.RAMSEY_FRINGE_SLOPE: Detection.SLOPE,
    Method.RAMSEY_FRINGE_VARIANCE: Detection.VARIANCE,
}


def ramsey_resources(policy, n_s, duration, n_circuits):
    """(shots, sensing time) of a Ramsey baseline matched to ``n_circuits`` ZNE circuits."""
    shots = n_s * n_circuits if policy in (ResourcePolicy.EQUAL_SHOTS, ResourcePolicy.EQUAL_BOTH) else n_s
    sensing = duration * n_circuits if policy in (ResourcePolicy.EQUAL_TIME, ResourcePolicy.EQUAL_BOTH) else duration
    return shots, sensing


# -----------------------------
# CONFIGURATION TYPES
# -----------------------------
@dataclass(frozen=True)
class AltCheck:
    phase_rate: float
    decay_rate: float
    field: float
    segment_time: float
    gate_time: float


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: str
    protocol: ProtocolSpec
    fit: str = FitKind.LINEAR
    fold_counts: tuple = (0, 1, 2)
    n_s: int = 10_000
    n_t: int = 500
    seed: int = 42
    exact_p: bool = False
    sweep_variable: str = SweepVariable.FIELD
    sweep_values: tuple = ()
    series_variable: str | None = None
    series_values: tuple = ()
    methods: tuple = ()
    field_grid: tuple = ()
    alt: AltCheck | None = None

    @property
    def n_circuits(self):
        return len(self.fold_counts)

    @property
    def effective_trials(self):
        # Exact-p trials are identical, one is enough
        return 1 if self.exact_p else self.n_t

    @property
    def shots(self):
        return None if self.exact_p else self.n_s


def at_point(cfg, variable, value):
    """Copy of ``cfg`` with one sweep/series variable pinned to ``value``."""
    protocol = cfg.protocol
    if variable == SweepVariable.FIELD:
        return replace(cfg, protocol=protocol.with_field(value))
    if variable == SweepVariable.DURATION:
        return replace(cfg, protocol=protocol.with_duration(value))
    if variable == SweepVariable.RATE:
        return replace(cfg, protocol=protocol.with_noise(protocol.noise.with_rate(value)))
    if variable == SweepVariable.SHOTS:
        return replace(cfg, n_s=int(value))
    if variable == SweepVariable.QUBITS:
        return replace(cfg, protocol=replace(protocol, n_qubits=int(value)))
    raise ValueError(f"Cannot pin sweep variable {variable!r}")


@dataclass(frozen=True)
class MetricRow:
    x: float
    nu: float | None = None
    errors: dict = field(default_factory=dict)
    samples: int = 0
    unstable: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MetricTable:
    name: str
    headers: tuple
    rows: tuple
    metadata: tuple = ()


# -----------------------------
# TRIALS
# -----------------------------
@dataclass(frozen=True)
class TrialPlan:
    """Exact probabilities for everything one trial at one grid point samples."""

    seed: int
    n_s: int | None
    field: float
    rate: float
    duration: float
    detection: str
    n_qubits: int
    noise_kind: str
    fit: str
    methods: tuple
    fold_probabilities: tuple = ()
    baselines: tuple = ()
    informed: tuple = ()
    fringes: tuple = ()


@dataclass(frozen=True)
class TrialOutcome:
    stream_index: int
    ensemble: tuple = ()
    zne: float | None = None
    unmitigated: float | None = None
    estimates: dict = field(default_factory=dict)
    unstable: frozenset = frozenset()


def run_trial(plan, stream_index):
    """One Monte-Carlo trial; consumes the stream in a fixed order."""
    rng = RngStream(plan.seed, stream_index)
    estimates = {}
    unstable = set()
    ensemble = ()
    zne = unmitigated = None

    if plan.fold_probabilities:
        ensemble = tuple(draw_ensemble(
            plan.fold_probabilities, plan.n_s, rng, plan.detection, plan.duration, plan.n_qubits
        ))
        unmitigated = ensemble[0][1]
        zne = fit_ensemble(ensemble, plan.fit).value_at_zero
        for method, kind in ZNE_METHODS.items():
            if method in plan.methods:
                result = fit_ensemble(ensemble, kind)
                estimates[method] = result.value_at_zero
                if not result.converged:
                    unstable.add(method)

    for method, p, shots, duration in plan.baselines:
        estimate = measure(p, shots, rng)
        estimates[method] = invert(estimate.p_hat, duration, plan.detection, plan.n_qubits)

    init = (0.99 * plan.field, 0.99 * plan.rate)
    for method, detection, data in plan.informed:
        sampled = [(m, measure(p, plan.n_s, rng).p_hat) for m, p in data]
        result = fit_informed(sampled, plan.duration, init, plan.noise_kind, detection)
        estimates[method] = result.value_at_zero
        if not result.converged:
            unstable.add(method)

    for method, detection, data in plan.fringes:
        sampled = [(t, measure(p, plan.n_s, rng).p_hat) for t, p in data]
        result = fit_ramsey_fringes(sampled, plan.noise_kind, init, detection)
        estimates[method] = result.value_at_zero
        if not result.converged:
            unstable.add(method)

    return TrialOutcome(
        stream_index=stream_index,
        ensemble=ensemble,
        zne=zne,
        unmitigated=unmitigated,
        estimates=estimates,
        unstable=frozenset(unstable),
    )


def _worker_init():
    import django
    django.setup()


class TrialRunner:
    """Runs trials in-process or on a process pool; always returns them in index order."""

    def __init__(self, workers=1):
        self.workers = max(1, int(workers))
        self._executor = None

    def __enter__(self):
        if self.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=self.workers, initializer=_worker_init)
        return self

    def __exit__(self, *exc):
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None
        return False

    def run(self, plan, stream_indices):
        stream_indices = list(stream_indices)
        if self._executor is None or len(stream_indices) < 2:
            return [run_trial(plan, index) for index in stream_indices]
        chunksize = max(1, len(stream_indices) // (4 * self.workers))
        return list(self._executor.map(run_trial, repeat(plan), stream_indices, chunksize=chunksize))


def _ensure_runner(runner):
    return runner if runner is not None else TrialRunner(1)


def _stream_indices(cfg, point_index):
    base = point_index * cfg.n_t
    return range(base, base + cfg.effective_trials)


def build_plan(cfg, methods=(), with_ensemble=True):
    """Freeze the exact probabilities needed by ``methods`` at ``cfg``'s point."""
    spec = cfg.protocol
    n_circuits = cfg.n_circuits
    needs_ensemble = with_ensemble or any(method in ZNE_METHODS for method in methods)

    baselines = []
    informed = []
    fringes = []
    for method in methods:
        if method in RAMSEY_POLICIES:
            shots, duration = ramsey_resources(RAMSEY_POLICIES[method], cfg.n_s, spec.duration, n_circuits)
            p = protocol_probability(spec.with_folds(0).with_duration(duration))
            baselines.append((method, p, None if cfg.exact_p else shots, duration))
        elif method in INFORMED_METHODS:
            detected = replace(spec, detection=INFORMED_METHODS[method])
            informed.append((method, detected.detection, tuple(fold_probabilities(detected, cfg.fold_counts))))
        elif method in FRINGE_METHODS:
            detected = replace(spec, detection=FRINGE_METHODS[method], folds=0)
            times = fringe_time_grid(n_circuits, spec.duration)
            data = tuple((t, protocol_probability(detected.with_duration(t))) for t in times)
            fringes.append((method, detected.detection, data))

    return TrialPlan(
        seed=cfg.seed,
        n_s=cfg.shots,
        field=spec.field,
        rate=spec.noise.rate,
        duration=spec.duration,
        detection=spec.detection,
        n_qubits=spec.n_qubits,
        noise_kind=spec.noise.kind,
        fit=cfg.fit,
        methods=tuple(methods),
        fold_probabilities=tuple(fold_probabilities(spec, cfg.fold_counts)) if needs_ensemble else (),
        baselines=tuple(baselines),
        informed=tuple(informed),
        fringes=tuple(fringes),
    )


def _mean(values):
    values = list(values)
    return math.fsum(values) / len(values)


# -----------------------------
# METRICS
# -----------------------------
def run_zne_trial(cfg, field_value, trial_index, point_index=0):
    """(B_zne, B_unmitigated) of one trial at field ``field_value``."""
    point = at_point(cfg, SweepVariable.FIELD, field_value)
    outcome = run_trial(build_plan(point), point_index * cfg.n_t + trial_index)
    return outcome.zne, outcome.unmitigated


def success_count(outcomes, field_value):
    """Trials where ZNE lands strictly closer to the truth; ties fail."""
    return sum(
        1 for outcome in outcomes
        if abs(outcome.zne - field_value) < abs(outcome.unmitigated - field_value)
    )


def success_probability(cfg, field_value=None, runner=None, point_index=0):
    """Fraction of trials where the extrapolated estimate beats the unfolded one."""
    point = cfg if field_value is None else at_point(cfg, SweepVariable.FIELD, field_value)
    runner = _ensure_runner(runner)
    outcomes = runner.run(build_plan(point), _stream_indices(point, point_index))
    return success_count(outcomes, point.protocol.field) / len(outcomes)


def _relative_error(estimate, truth):
    return abs(estimate - truth) / abs(truth)


def metric_row(x, outcomes, truth, methods, with_nu=False):
    errors = {
        method: _mean(_relative_error(outcome.estimates[method], truth) for outcome in outcomes)
        for method in methods
    }
    unstable = {
        method: sum(1 for outcome in outcomes if method in outcome.unstable)
        for method in methods
    }
    nu = success_count(outcomes, truth) / len(outcomes) if with_nu else None
    return MetricRow(x=float(x), nu=nu, errors=errors, samples=len(outcomes), unstable=unstable)


def relative_error_sweep(cfg, methods=None, runner=None):
    """Mean relative error per method at every value of the sweep."""
    methods = tuple(methods if methods is not None else cfg.methods)
    runner = _ensure_runner(runner)
    with_ensemble = any(method in ZNE_METHODS for method in methods)
    rows = []
    for point_index, value in enumerate(cfg.sweep_values):
        point = at_point(cfg, cfg.sweep_variable, value)
        plan = build_plan(point, methods, with_ensemble=with_ensemble)
        outcomes = runner.run(plan, _stream_indices(point, point_index))
        rows.append(metric_row(value, outcomes, point.protocol.field, methods, with_nu=with_ensemble))
        logger.debug(f"{cfg.name}: {cfg.sweep_variable}={value:g} done ({len(outcomes)} trials)")
    return rows


def find_crossover(rows, method=Method.ZNE_LINEAR, baseline=Method.RAMSEY_EQUAL_SHOTS):
    """First grid x from which ``method`` stays strictly below ``baseline``."""
    crossover = None
    for row in reversed(rows):
        if row.errors[method] < row.errors[baseline]:
            crossover = row.x
        else:
            break
    return crossover


def crossover_field(cfg, field_grid=None, runner=None):
    grid = tuple(field_grid if field_grid is not None else cfg.field_grid)
    sweep = replace(cfg, sweep_variable=SweepVariable.FIELD, sweep_values=grid)
    rows = relative_error_sweep(sweep, (Method.ZNE_LINEAR, Method.RAMSEY_EQUAL_SHOTS), runner)
    return find_crossover(rows)


def find_sensitivity(rows, method):
    """
    Field where the mean absolute error crosses B, linearly interpolated.

    Returns the smallest grid value when the error is already below B there
    and None when it never drops below B on the grid.
    """
    gaps = [(row.x, row.errors[method] * abs(row.x) - row.x) for row in rows]
    if not gaps:
        return None
    if gaps[0][1] < 0:
        return gaps[0][0]
    for (x0, d0), (x1, d1) in zip(gaps, gaps[1:]):
        if d0 >= 0 > d1:
            return x0 + d0 * (x1 - x0) / (d0 - d1)
    return None


def sensitivity(cfg, method, runner=None, rows=None):
    if rows is None:
        rows = relative_error_sweep(replace(cfg, sweep_variable=SweepVariable.FIELD), (method,), runner)
    return find_sensitivity(rows, method)


def infinite_shot_compare(cfg, field_grid=None, runner=None):
    """Deterministic ZNE-linear vs unmitigated Ramsey in the infinite-shot limit."""
    grid = tuple(field_grid if field_grid is not None else (cfg.field_grid or cfg.sweep_values))
    exact = replace(cfg, exact_p=True, fit=FitKind.LINEAR, sweep_variable=SweepVariable.FIELD, sweep_values=grid)
    return relative_error_sweep(exact, (Method.ZNE_LINEAR, Method.RAMSEY), runner)


def fold_trace(cfg, runner=None, point_index=0):
    """Mean estimate at every eta plus the mean extrapolated value at eta = 0."""
    runner = _ensure_runner(runner)
    outcomes = runner.run(build_plan(cfg), _stream_indices(cfg, point_index))
    etas = [eta for eta, _ in outcomes[0].ensemble]
    trace = [(0, _mean(outcome.zne for outcome in outcomes))]
    for position, eta in enumerate(etas):
        trace.append((eta, _mean(outcome.ensemble[position][1] for outcome in outcomes)))
    return trace


def alt_check_rows(alt, folds):
    """(k, simulated and averaged-Liouvillian p1) for both channels."""
    dt = alt.gate_time
    pd_spec = ProtocolSpec(
        Detection.VARIANCE, NoiseSpec(NoiseKind.PHASE_DAMPING, dephasing_probability(alt.phase_rate, dt)),
        alt.field, alt.segment_time,
    )
    ad_spec = ProtocolSpec(
        Detection.VARIANCE, NoiseSpec(NoiseKind.AMPLITUDE_DAMPING, decay_probability(alt.decay_rate, dt)),
        alt.field, alt.segment_time,
    )
    rows = []
    for k in folds:
        k = int(k)
        rows.append((
            k,
            execute(build_repeated_ramsey(pd_spec, k + 1, alt.segment_time)),
            alt_p1_global_pd(alt.phase_rate, alt.field, alt.segment_time, dt, k, order=1),
            execute(build_repeated_ramsey(ad_spec, k + 1, alt.segment_time)),
            alt_p1_global_ad(alt.decay_rate, alt.field, alt.segment_time, dt, k, order=1),
            alt_p1_global_ad(alt.decay_rate, alt.field, alt.segment_time, dt, k, order=2),
        ))
    return rows


# -----------------------------
# EXPERIMENT DISPATCH
# -----------------------------
def _label(variable, value):
    return f"{variable}={value:g}"


def table_metadata(cfg):
    spec = cfg.protocol
    return (
        ('experiment', cfg.name),
        ('kind', str(cfg.kind)),
        ('seed', cfg.seed),
        ('n_t', cfg.effective_trials),
        ('n_s', 'exact' if cfg.exact_p else cfg.n_s),
        ('noise', str(spec.noise.kind)),
        ('rate', spec.noise.rate),
        ('detection', str(spec.detection)),
        ('folding', str(spec.folding)),
        ('n_qubits', spec.n_qubits),
        ('field', spec.field),
        ('duration', spec.duration),
        ('fit', str(cfg.fit)),
        ('fold_counts', ' '.join(str(m) for m in cfg.fold_counts)),
    )


def _series(cfg):
    if cfg.series_variable:
        return [(_label(cfg.series_variable, value), at_point(cfg, cfg.series_variable, value)) for value in cfg.series_values]
    return [(None, cfg)]


def _success_table(cfg, runner):
    series = _series(cfg)
    columns = [f"nu[{label}]" if label else 'nu' for label, _ in series]
    rows = []
    for point_index, value in enumerate(cfg.sweep_values):
        row = [float(value)]
        for series_index, (_, series_cfg) in enumerate(series):
            point = at_point(series_cfg, cfg.sweep_variable, value)
            row.append(success_probability(point, runner=runner, point_index=point_index * len(series) + series_index))
        rows.append(tuple(row))
    return [MetricTable(cfg.name, (str(cfg.sweep_variable), *columns), tuple(rows), table_metadata(cfg))]


def _trace_table(cfg, runner):
    series = _series(cfg)
    traces = [fold_trace(series_cfg, runner, point_index=index) for index, (_, series_cfg) in enumerate(series)]
    columns = [f"mean_field[{label}]" if label else 'mean_field' for label, _ in series]
    rows = tuple(
        (float(traces[0][position][0]), *(trace[position][1] for trace in traces))
        for position in range(len(traces[0]))
    )
    return [MetricTable(cfg.name, ('eta', *columns), rows, table_metadata(cfg))]


def _error_tables(cfg, rows, methods, name=None):
    name = name or cfg.name
    headers = [str(cfg.sweep_variable), *[str(m) for m in methods]]
    unstable_methods = [m for m in methods if any(row.unstable.get(m) for row in rows)]
    headers += [f"unstable[{m}]" for m in unstable_methods]
    body = tuple(
        (row.x, *(row.errors[m] for m in methods), *(row.unstable[m] for m in unstable_methods))
        for row in rows
    )
    tables = [MetricTable(name, tuple(headers), body, table_metadata(cfg))]
    if cfg.sweep_variable == SweepVariable.FIELD and len(rows) > 1:
        sensitivities = tuple((str(m), find_sensitivity(rows, m)) for m in methods)
        tables.append(MetricTable(f"{name}-sensitivity", ('method', 'sensitivity'), sensitivities, table_metadata(cfg)))
    return tables


def _crossover_table(cfg, runner):
    rows = []
    for shots in cfg.sweep_values:
        shot_cfg = at_point(cfg, SweepVariable.SHOTS, shots)
        rows.append((int(shots), crossover_field(shot_cfg, cfg.field_grid, runner)))
    return [MetricTable(cfg.name, ('shots', 'crossover_field'), tuple(rows), table_metadata(cfg))]


def _closed_form_table(cfg):
    spec = cfg.protocol
    analytic_rows = closed_form_table(
        spec.noise.kind, cfg.sweep_values, spec.field, spec.duration, cfg.fold_counts, spec.detection
    )
    rows = []
    for rate, *values in analytic_rows:
        rated = spec.with_noise(spec.noise.with_rate(rate))
        deviation = max(
            abs(protocol_probability(rated.with_folds(m)) - value)
            for m, value in zip(cfg.fold_counts, values)
        )
        rows.append((rate, *values, deviation))
    headers = ('rate', *(f"p1[m={m}]" for m in cfg.fold_counts), 'max_circuit_deviation')
    return [MetricTable(cfg.name, headers, tuple(rows), table_metadata(cfg))]


def _alt_table(cfg):
    headers = ('k', 'p1_sim_pd', 'p1_alt1_pd', 'p1_sim_ad', 'p1_alt1_ad', 'p1_alt2_ad')
    return [MetricTable(cfg.name, headers, tuple(alt_check_rows(cfg.alt, cfg.sweep_values)), table_metadata(cfg))]


def run_experiment(cfg, workers=1):
    """Execute ``cfg`` and return its tables."""
    start = time.time()
    logger.info(f"Running {cfg.name} ({cfg.kind}, seed={cfg.seed}, n_t={cfg.effective_trials}, workers={workers})")
    with TrialRunner(workers) as runner:
        if cfg.kind == ExperimentKind.SUCCESS_PROBABILITY:
            tables = _success_table(cfg, runner)
        elif cfg.kind == ExperimentKind.FOLD_TRACES:
            tables = _trace_table(cfg, runner)
        elif cfg.kind in (ExperimentKind.RELATIVE_ERROR, ExperimentKind.INFORMED_FIT):
            tables = _error_tables(cfg, relative_error_sweep(cfg, cfg.methods, runner), cfg.methods)
        elif cfg.kind == ExperimentKind.INFINITE_SHOT:
            methods = (Method.ZNE_LINEAR, Method.RAMSEY)
            exact = replace(cfg, exact_p=True, sweep_variable=SweepVariable.FIELD)
            tables = _error_tables(exact, infinite_shot_compare(cfg, runner=runner), methods)
        elif cfg.kind == ExperimentKind.CROSSOVER:
            tables = _crossover_table(cfg, runner)
        elif cfg.kind == ExperimentKind.CLOSED_FORM:
            tables = _closed_form_table(cfg)
        elif cfg.kind == ExperimentKind.ALT_CHECK:
            tables = _alt_table(cfg)
        else:
            raise ValueError(f"Unknown experiment kind {cfg.kind!r}")
    logger.info(f"Finished {cfg.name} in {time.time() - start:.2f}s ({len(tables)} table(s))")
    return tables
