"""
Named experiment configs for the standard figure runs, at desk scale.

Every preset is a plain config dict that validates against
``ExperimentConfigSerializer``; ``materialize`` returns a fresh copy with
``--set`` overrides applied.
"""

import copy
import json
import math

from .channels import NoiseKind
from .circuits import Detection, FoldingStyle
from .experiments import ExperimentKind, Method, SweepVariable
from .fitters import FitKind


class PresetError(ValueError):
    pass


def _grid(start, stop, count):
    step = (stop - start) / (count - 1)
    return [round(start + step * i, 12) for i in range(count)]


def _protocol(detection, kind, rate, field=1.0, duration=1.0, n_qubits=1, folding=FoldingStyle.LOCAL):
    return {
        'detection': detection,
        'noise': {'kind': kind, 'rate': rate},
        'field': field,
        'duration': duration,
        'n_qubits': n_qubits,
        'folding': folding,
    }


FIELD_GRID = _grid(0.05, 1.0, 20)
DURATION_GRID = [math.pi * k / 12 for k in range(1, 13)]
ZNE_AND_RAMSEY = [
    Method.ZNE_LINEAR,
    Method.ZNE_RICHARDSON,
    Method.ZNE_EXPONENTIAL,
    Method.RAMSEY,
    Method.RAMSEY_EQUAL_SHOTS,
    Method.RAMSEY_EQUAL_TIME,
    Method.RAMSEY_EQUAL_BOTH,
]
INFORMED = [
    Method.ZNE_LINEAR,
    Method.ZNE_INFORMED_SLOPE,
    Method.ZNE_INFORMED_VARIANCE,
    Method.RAMSEY_FRINGE_SLOPE,
    Method.RAMSEY_FRINGE_VARIANCE,
]


def _success(name, kind, rates):
    return {
        'name': name,
        'kind': ExperimentKind.SUCCESS_PROBABILITY,
        'protocol': _protocol(Detection.VARIANCE, kind, rates[0]),
        'fit': FitKind.LINEAR,
        'sweep': {'variable': SweepVariable.DURATION, 'values': DURATION_GRID},
        'series': {'variable': SweepVariable.RATE, 'values': rates},
    }


def _relative_error(name, kind, rate, **protocol):
    return {
        'name': name,
        'kind': ExperimentKind.RELATIVE_ERROR,
        'protocol': _protocol(Detection.SLOPE, kind, rate, **protocol),
        'sweep': {'variable': SweepVariable.FIELD, 'values': FIELD_GRID},
        'methods': ZNE_AND_RAMSEY,
    }


def _closed_form(name, kind):
    return {
        'name': name,
        'kind': ExperimentKind.CLOSED_FORM,
        'protocol': _protocol(Detection.VARIANCE, kind, 0.0, duration=math.pi / 4),
        'fold_counts': [0, 1, 2, 3, 4],
        'sweep': {'variable': SweepVariable.RATE, 'values': _grid(0.0, 0.3, 31)},
    }


def _informed(name, kind, rate):
    return {
        'name': name,
        'kind': ExperimentKind.INFORMED_FIT,
        'protocol': _protocol(Detection.VARIANCE, kind, rate),
        'sweep': {'variable': SweepVariable.FIELD, 'values': _grid(0.1, 1.0, 10)},
        'methods': INFORMED,
    }


def _ghz(name, kind):
    return {
        'name': name,
        'kind': ExperimentKind.RELATIVE_ERROR,
        'protocol': _protocol(Detection.SLOPE, kind, 0.005, n_qubits=4),
        'n_t': 300,
        'sweep': {'variable': SweepVariable.FIELD, 'values': _grid(0.01, 0.3, 30)},
        'methods': [Method.ZNE_LINEAR, Method.ZNE_RICHARDSON, Method.RAMSEY, Method.RAMSEY_EQUAL_BOTH],
    }


def _global(name, kind, rate):
    preset = _relative_error(name, kind, rate, folding=FoldingStyle.GLOBAL)
    preset['methods'] = [Method.ZNE_LINEAR, Method.ZNE_RICHARDSON, Method.ZNE_EXPONENTIAL, Method.RAMSEY, Method.RAMSEY_EQUAL_SHOTS]
    return preset


PRESETS = {
    'fig2-success-dip': _success('fig2-success-dip', NoiseKind.PHASE_DAMPING, [0.05, 0.15]),
    'fig3-traces': {
        'name': 'fig3-traces',
        'kind': ExperimentKind.FOLD_TRACES,
        'protocol': _protocol(Detection.VARIANCE, NoiseKind.PHASE_DAMPING, 0.1),
        'fold_counts': [0, 1, 2, 3],
        'series': {'variable': SweepVariable.DURATION, 'values': [math.pi / 4, math.pi / 2, 3 * math.pi / 4]},
    },
    'fig4a-relerr': _relative_error('fig4a-relerr', NoiseKind.PHASE_DAMPING, 0.1),
    'fig4b-crossover': {
        'name': 'fig4b-crossover',
        'kind': ExperimentKind.CROSSOVER,
        'protocol': _protocol(Detection.SLOPE, NoiseKind.PHASE_DAMPING, 0.1),
        'sweep': {'variable': SweepVariable.SHOTS, 'values': [1000, 10000, 100000]},
        'field_grid': FIELD_GRID,
    },
    'fig5-closedform': _closed_form('fig5-closedform', NoiseKind.PHASE_DAMPING),
    'fig6-informed-pd': _informed('fig6-informed-pd', NoiseKind.PHASE_DAMPING, 0.1),
    'ad-success': _success('ad-success', NoiseKind.AMPLITUDE_DAMPING, [0.01, 0.05]),
    'ad-relerr': _relative_error('ad-relerr', NoiseKind.AMPLITUDE_DAMPING, 0.01),
    'ad-informed': _informed('ad-informed', NoiseKind.AMPLITUDE_DAMPING, 0.05),
    'ad-closedform': _closed_form('ad-closedform', NoiseKind.AMPLITUDE_DAMPING),
    'ghz-pd': _ghz('ghz-pd', NoiseKind.PHASE_DAMPING),
    'ghz-ad': _ghz('ghz-ad', NoiseKind.AMPLITUDE_DAMPING),
    'globalfold-pd': _global('globalfold-pd', NoiseKind.PHASE_DAMPING, 0.1),
    'globalfold-ad': _global('globalfold-ad', NoiseKind.AMPLITUDE_DAMPING, 0.01),
    'alt-check': {
        'name': 'alt-check',
        'kind': ExperimentKind.ALT_CHECK,
        'sweep': {'variable': SweepVariable.FOLDS, 'values': list(range(11))},
        'alt': {
            'phase_rate': 0.05,
            'decay_rate': 0.01,
            'field': 1.0,
            'segment_time': math.pi / 10,
            'gate_time': None,
        },
    },
}


def available():
    return sorted(PRESETS)


def parse_value(raw):
    """JSON literal if it parses, otherwise the raw string."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(data, assignment):
    """Apply one ``dotted.path=value`` assignment to ``data`` in place."""
    path, sep, raw = assignment.partition('=')
    if not sep or not path.strip():
        raise PresetError(f"Override {assignment!r} is not of the form key=value")
    keys = path.strip().split('.')
    target = data
    for key in keys[:-1]:
        if isinstance(target, list):
            target = target[_index(target, key, assignment)]
            continue
        if target.get(key) is None:
            target[key] = {}
        target = target[key]
        if not isinstance(target, (dict, list)):
            raise PresetError(f"Cannot descend into {key!r} in override {assignment!r}")
    last = keys[-1]
    if isinstance(target, list):
        target[_index(target, last, assignment)] = parse_value(raw)
    else:
        target[last] = parse_value(raw)
    return data


def _index(target, key, assignment):
    if not key.isdigit() or int(key) >= len(target):
        raise PresetError(f"Index {key!r} out of range in override {assignment!r}")
    return int(key)


def materialize(name, overrides=()):
    """Deep copy of preset ``name`` with ``overrides`` applied, JSON-clean."""
    if name not in PRESETS:
        raise PresetError(f"Unknown preset {name!r}. Available presets: {', '.join(available())}")
    # Round-trip through JSON so choices become plain strings
    data = json.loads(json.dumps(copy.deepcopy(PRESETS[name])))
    for assignment in overrides:
        apply_override(data, assignment)
    return data
