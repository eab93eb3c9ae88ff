from django.conf import settings
from rest_framework import serializers

from .analytic import LindbladParams
from .channels import NoiseKind, NoiseSpec
from .circuits import Detection, FoldingStyle, ProtocolSpec
from .densmat import MAX_QUBITS
from .experiments import (
    FRINGE_METHODS,
    INFORMED_METHODS,
    ZNE_METHODS,
    AltCheck,
    ExperimentConfig,
    ExperimentKind,
    Method,
    SweepVariable,
)
from .fitters import EXTRAPOLATION_KINDS, FitKind
from .sampling import MAX_SEED


class ConfigError(ValueError):
    """Experiment config failed validation; ``messages`` holds dotted-path errors."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__('; '.join(self.messages))


def flatten_errors(errors, prefix=''):
    """Turn nested DRF errors into ``['protocol.noise.rate: ...', ...]``."""
    messages = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            path = prefix if key == 'non_field_errors' else (f"{prefix}.{key}" if prefix else str(key))
            messages += flatten_errors(value, path)
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                if value:
                    messages += flatten_errors(value, f"{prefix}.{index}" if prefix else str(index))
            else:
                messages.append(f"{prefix or 'config'}: {value}")
    else:
        messages.append(f"{prefix or 'config'}: {errors}")
    return messages


def _strictly_ascending(values):
    return all(a < b for a, b in zip(values, values[1:]))


# -----------------------------
# PROTOCOL SERIALIZERS
# -----------------------------
class NoiseSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=NoiseKind.choices, default=NoiseKind.PHASE_DAMPING)
    rate = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.0)


class ProtocolSerializer(serializers.Serializer):
    detection = serializers.ChoiceField(choices=Detection.choices, default=Detection.VARIANCE)
    noise = NoiseSerializer(default=lambda: {'kind': NoiseKind.PHASE_DAMPING, 'rate': 0.0})
    field = serializers.FloatField(default=1.0)
    duration = serializers.FloatField(min_value=0.0, default=1.0)
    n_qubits = serializers.IntegerField(min_value=1, max_value=MAX_QUBITS, default=1)
    folding = serializers.ChoiceField(choices=FoldingStyle.choices, default=FoldingStyle.LOCAL)

    def validate_duration(self, value):
        if value <= 0:
            raise serializers.ValidationError("Sensing time must be positive.")
        return value

    def validate(self, attrs):
        if attrs.get('folding') == FoldingStyle.GLOBAL and attrs.get('n_qubits', 1) != 1:
            raise serializers.ValidationError({'folding': "Global folding is only defined for a single qubit."})
        return attrs


class SweepSerializer(serializers.Serializer):
    variable = serializers.ChoiceField(choices=SweepVariable.choices)
    values = serializers.ListField(child=serializers.FloatField(), min_length=1)

    def validate(self, attrs):
        values = attrs['values']
        if not _strictly_ascending(values):
            raise serializers.ValidationError({'values': "Grid must be sorted in strictly ascending order."})
        variable = attrs['variable']
        if variable == SweepVariable.RATE and not all(0.0 <= v <= 1.0 for v in values):
            raise serializers.ValidationError({'values': "Rates must lie in [0, 1]."})
        if variable == SweepVariable.DURATION and values[0] <= 0:
            raise serializers.ValidationError({'values': "Sensing times must be positive."})
        if variable in (SweepVariable.SHOTS, SweepVariable.QUBITS, SweepVariable.FOLDS):
            if not all(float(v).is_integer() for v in values):
                raise serializers.ValidationError({'values': f"{variable} values must be integers."})
            floor = 0 if variable == SweepVariable.FOLDS else 1
            if values[0] < floor:
                raise serializers.ValidationError({'values': f"{variable} values must be at least {floor}."})
        if variable == SweepVariable.QUBITS and values[-1] > MAX_QUBITS:
            raise serializers.ValidationError({'values': f"At most {MAX_QUBITS} qubits are supported."})
        return attrs


class AltCheckSerializer(serializers.Serializer):
    phase_rate = serializers.FloatField(min_value=0.0)
    decay_rate = serializers.FloatField(min_value=0.0)
    field = serializers.FloatField(min_value=0.0)
    segment_time = serializers.FloatField(min_value=0.0)
    gate_time = serializers.FloatField(min_value=0.0, allow_null=True, default=None)

    def validate_segment_time(self, value):
        if value <= 0:
            raise serializers.ValidationError("Segment time must be positive.")
        return value


# -----------------------------
# EXPERIMENT CONFIG
# -----------------------------
SWEEP_KINDS = {
    ExperimentKind.SUCCESS_PROBABILITY: (SweepVariable.FIELD, SweepVariable.DURATION, SweepVariable.RATE, SweepVariable.SHOTS),
    ExperimentKind.RELATIVE_ERROR: (SweepVariable.FIELD, SweepVariable.DURATION, SweepVariable.RATE, SweepVariable.SHOTS, SweepVariable.QUBITS),
    ExperimentKind.INFORMED_FIT: (SweepVariable.FIELD, SweepVariable.DURATION, SweepVariable.RATE, SweepVariable.SHOTS),
    ExperimentKind.CROSSOVER: (SweepVariable.SHOTS,),
    ExperimentKind.CLOSED_FORM: (SweepVariable.RATE,),
    ExperimentKind.ALT_CHECK: (SweepVariable.FOLDS,),
}
SERIES_KINDS = (ExperimentKind.SUCCESS_PROBABILITY, ExperimentKind.FOLD_TRACES)
METHOD_KINDS = (ExperimentKind.RELATIVE_ERROR, ExperimentKind.INFORMED_FIT)


def _uses_folds(kind, methods):
    if kind == ExperimentKind.ALT_CHECK:
        return False
    if kind in METHOD_KINDS:
        return any(m in ZNE_METHODS or m in INFORMED_METHODS for m in methods)
    return True


class ExperimentConfigSerializer(serializers.Serializer):
    name = serializers.RegexField(r'^[A-Za-z0-9][A-Za-z0-9_.-]*$', max_length=100)
    kind = serializers.ChoiceField(choices=ExperimentKind.choices)
    protocol = ProtocolSerializer(default=lambda: {
        'detection': Detection.VARIANCE,
        'noise': {'kind': NoiseKind.PHASE_DAMPING, 'rate': 0.0},
        'field': 1.0,
        'duration': 1.0,
        'n_qubits': 1,
        'folding': FoldingStyle.LOCAL,
    })
    fit = serializers.ChoiceField(choices=[(k.value, k.label) for k in EXTRAPOLATION_KINDS], default=FitKind.LINEAR)
    fold_counts = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=2, default=lambda: [0, 1, 2])
    n_s = serializers.IntegerField(min_value=1, default=settings.ZNE_DEFAULT_SHOTS)
    n_t = serializers.IntegerField(min_value=1, default=settings.ZNE_DESK_TRIALS)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=settings.ZNE_DEFAULT_SEED)
    exact_p = serializers.BooleanField(default=False)
    sweep = SweepSerializer(required=False, allow_null=True, default=None)
    series = SweepSerializer(required=False, allow_null=True, default=None)
    methods = serializers.ListField(child=serializers.ChoiceField(choices=Method.choices), default=list)
    field_grid = serializers.ListField(child=serializers.FloatField(), default=list)
    alt = AltCheckSerializer(required=False, allow_null=True, default=None)

    def validate_fold_counts(self, value):
        if not _strictly_ascending(value):
            raise serializers.ValidationError("Fold counts must be sorted in strictly ascending order.")
        return value

    def validate_field_grid(self, value):
        if value and not _strictly_ascending(value):
            raise serializers.ValidationError("Grid must be sorted in strictly ascending order.")
        if any(v == 0 for v in value):
            raise serializers.ValidationError("Relative errors are undefined at zero field.")
        return value

    def validate(self, attrs):
        kind = attrs['kind']
        protocol = attrs['protocol']
        sweep = attrs.get('sweep')
        series = attrs.get('series')
        methods = attrs.get('methods', [])
        errors = {}

        if kind in SWEEP_KINDS:
            if not sweep:
                errors['sweep'] = f"A sweep is required for {kind} experiments."
            elif sweep['variable'] not in SWEEP_KINDS[kind]:
                allowed = ', '.join(SWEEP_KINDS[kind])
                errors['sweep'] = f"{kind} experiments sweep one of: {allowed}."
        if series and kind not in SERIES_KINDS:
            errors['series'] = f"A series is only supported for {', '.join(SERIES_KINDS)} experiments."
        if series and sweep and series['variable'] == sweep['variable']:
            errors['series'] = "Series and sweep must vary different quantities."

        if kind in METHOD_KINDS and not methods:
            errors['methods'] = f"{kind} experiments need at least one method."
        if len(set(methods)) != len(methods):
            errors['methods'] = "Methods must be unique."
        if any(m in INFORMED_METHODS or m in FRINGE_METHODS for m in methods):
            if protocol['n_qubits'] != 1 or protocol['folding'] == FoldingStyle.GLOBAL:
                errors['methods'] = "Noise-informed and fringe fits need a single qubit with local folding."

        if protocol['folding'] == FoldingStyle.NONE and _uses_folds(kind, methods):
            errors['protocol.folding'] = "Fold ensembles need local or global folding."

        if kind in (ExperimentKind.CROSSOVER, ExperimentKind.INFINITE_SHOT) and not attrs.get('field_grid'):
            errors['field_grid'] = f"A field grid is required for {kind} experiments."

        if kind in (ExperimentKind.SUCCESS_PROBABILITY, *METHOD_KINDS):
            sweeps_field = bool(sweep) and sweep['variable'] == SweepVariable.FIELD
            if sweeps_field and 0.0 in sweep['values']:
                errors['sweep.values'] = "Estimation errors are measured relative to a nonzero field."
            elif not sweeps_field and protocol['field'] == 0:
                errors['protocol.field'] = "Estimation errors are measured relative to a nonzero field."

        if kind == ExperimentKind.CLOSED_FORM and (protocol['n_qubits'] != 1 or protocol['folding'] == FoldingStyle.GLOBAL):
            errors['protocol'] = "Closed forms cover single-qubit local folding only."
        if kind == ExperimentKind.ALT_CHECK and not attrs.get('alt'):
            errors['alt'] = "alt_check experiments need an 'alt' block."
        exponential = attrs['fit'] == FitKind.EXPONENTIAL or Method.ZNE_EXPONENTIAL in methods
        if exponential and len(attrs['fold_counts']) < 3:
            errors['fold_counts'] = "Exponential extrapolation needs at least three fold counts."

        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class RunManifestSerializer(serializers.Serializer):
    schema = serializers.CharField()
    experiment = serializers.CharField()
    config_path = serializers.CharField(allow_null=True)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED)
    output_dir = serializers.CharField()
    artifacts = serializers.ListField(child=serializers.CharField())
    duration_seconds = serializers.FloatField(min_value=0.0)


def validate_config(data):
    """Validated data of an experiment config, or ``ConfigError``."""
    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError(flatten_errors(serializer.errors))
    return serializer


def _grid(block):
    return (block['variable'], tuple(block['values'])) if block else (None, ())


def config_from_data(data):
    """Validate ``data`` and build the ExperimentConfig it describes."""
    return config_from_validated(validate_config(data).validated_data)


def config_from_validated(validated):
    protocol_data = validated['protocol']
    noise_data = protocol_data['noise']
    protocol = ProtocolSpec(
        detection=protocol_data['detection'],
        noise=NoiseSpec(noise_data['kind'], noise_data['rate']),
        field=protocol_data['field'],
        duration=protocol_data['duration'],
        n_qubits=protocol_data['n_qubits'],
        folding=protocol_data['folding'],
    )

    alt = None
    if validated.get('alt'):
        alt_data = validated['alt']
        gate_time = alt_data['gate_time']
        if gate_time is None:
            gate_time = settings.ZNE_GATE_TIME_FRACTION * alt_data['segment_time']
        # Reuses the Lindblad parameter checks
        LindbladParams(alt_data['phase_rate'], alt_data['decay_rate'], alt_data['field'], alt_data['segment_time'], gate_time)
        alt = AltCheck(alt_data['phase_rate'], alt_data['decay_rate'], alt_data['field'], alt_data['segment_time'], gate_time)

    sweep_variable, sweep_values = _grid(validated.get('sweep'))
    series_variable, series_values = _grid(validated.get('series'))
    return ExperimentConfig(
        name=validated['name'],
        kind=ExperimentKind(validated['kind']),
        protocol=protocol,
        fit=FitKind(validated['fit']),
        fold_counts=tuple(validated['fold_counts']),
        n_s=validated['n_s'],
        n_t=validated['n_t'],
        seed=validated['seed'],
        exact_p=validated['exact_p'],
        sweep_variable=sweep_variable or SweepVariable.FIELD,
        sweep_values=sweep_values,
        series_variable=series_variable,
        series_values=series_values,
        methods=tuple(Method(m) for m in validated['methods']),
        field_grid=tuple(validated['field_grid']),
        alt=alt,
    )
