"""
Ramsey, folded-Ramsey and GHZ sensing circuits.

A circuit is an explicit, immutable list of elements: gates, noise
insertions after gates, and noiseless sensing periods. Builders only
describe the program; ``execute`` runs it on the density-matrix engine.
"""

from dataclasses import dataclass, replace
import logging
import math

from django.conf import settings
from django.db import models
import numpy as np

from .cache_utils import digest_key, get_cache_key, get_or_set_cache
from .channels import NoiseSpec, apply_local_noise
from .densmat import GateMatrix, apply_unitary, init_ground, prob_one

logger = logging.getLogger(__name__)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class Detection(models.TextChoices):
    SLOPE = 'slope', 'Slope detection'
    VARIANCE = 'variance', 'Variance detection'


class FoldingStyle(models.TextChoices):
    NONE = 'none', 'No folding'
    LOCAL = 'local', 'Local (gate/block) folding'
    GLOBAL = 'global', 'Global (whole sequence) folding'


# -----------------------------
# GATES
# -----------------------------
def sqrt_y(qubit):
    return GateMatrix(_SQRT_HALF * np.array([[1, -1], [1, 1]]), (qubit,))


def sqrt_y_dagger(qubit):
    return GateMatrix(_SQRT_HALF * np.array([[1, 1], [-1, 1]]), (qubit,))


def sqrt_x_dagger(qubit):
    return GateMatrix(_SQRT_HALF * np.array([[1, 1j], [1j, 1]]), (qubit,))


def cnot(control, target):
    matrix = np.array([
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ])
    return GateMatrix(matrix, (control, target))


def rz(angle, qubit):
    return GateMatrix(np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)]), (qubit,))


# -----------------------------
# CIRCUIT ELEMENTS
# -----------------------------
@dataclass(frozen=True)
class Gate:
    gate: GateMatrix
    label: str

    def dagger(self):
        label = self.label[:-1] if self.label.endswith('†') else f'{self.label}†'
        return Gate(self.gate.dagger(), label)


@dataclass(frozen=True)
class Noise:
    spec: NoiseSpec
    qubits: tuple


@dataclass(frozen=True)
class Sense:
    """Noiseless free evolution exp(-i (B/2) sum_j sigma_z^j t)."""

    field: float
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"Sensing duration must be non-negative, got {self.duration}")


@dataclass(frozen=True)
class SensingCircuit:
    n_qubits: int
    elements: tuple
    measured_qubit: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'elements', tuple(self.elements))
        if not 0 <= self.measured_qubit < self.n_qubits:
            raise ValueError(f"Measured qubit {self.measured_qubit} outside register of {self.n_qubits}")
        for element in self.elements:
            if isinstance(element, Gate):
                qubits = element.gate.targets
            elif isinstance(element, Noise):
                qubits = element.qubits
            elif isinstance(element, Sense):
                continue
            else:
                raise ValueError(f"Unknown circuit element {element!r}")
            if any(not 0 <= q < self.n_qubits for q in qubits):
                raise ValueError(f"{element!r} addresses a qubit outside the register")

    @property
    def gate_count(self):
        return sum(1 for element in self.elements if isinstance(element, Gate))

    @property
    def sensing_time(self):
        return sum(element.duration for element in self.elements if isinstance(element, Sense))


@dataclass(frozen=True)
class ProtocolSpec:
    """Everything needed to build one sensing circuit."""

    detection: str
    noise: NoiseSpec
    field: float
    duration: float
    n_qubits: int = 1
    folding: str = FoldingStyle.LOCAL
    folds: int = 0

    def __post_init__(self):
        if self.detection not in Detection.values:
            raise ValueError(f"Unknown detection {self.detection!r}")
        if self.folding not in FoldingStyle.values:
            raise ValueError(f"Unknown folding style {self.folding!r}")
        if self.folds < 0:
            raise ValueError(f"Fold count must be non-negative, got {self.folds}")
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be at least 1, got {self.n_qubits}")
        if self.duration < 0:
            raise ValueError(f"Sensing duration must be non-negative, got {self.duration}")
        if self.folding == FoldingStyle.GLOBAL and self.n_qubits != 1:
            raise ValueError("Global folding is only defined for a single qubit")
        if self.folding == FoldingStyle.NONE and self.folds:
            raise ValueError(f"Unfolded protocols cannot carry folds, got {self.folds}")
        object.__setattr__(self, 'detection', Detection(self.detection))
        object.__setattr__(self, 'folding', FoldingStyle(self.folding))
        object.__setattr__(self, 'field', float(self.field))
        object.__setattr__(self, 'duration', float(self.duration))
        object.__setattr__(self, 'folds', int(self.folds))
        object.__setattr__(self, 'n_qubits', int(self.n_qubits))

    @property
    def scale_factor(self):
        return 2 * self.folds + 1

    def with_folds(self, folds):
        return replace(self, folds=folds)

    def with_field(self, field):
        return replace(self, field=field)

    def with_duration(self, duration):
        return replace(self, duration=duration)

    def with_noise(self, noise):
        return replace(self, noise=noise)


def _final_gate(detection, qubit=0):
    if detection == Detection.SLOPE:
        return Gate(sqrt_x_dagger(qubit), '√X†')
    return Gate(sqrt_y_dagger(qubit), '√Y†')


def _noisy(gates, noise):
    elements = []
    for gate in gates:
        elements.append(gate)
        elements.append(Noise(noise, gate.gate.targets))
    return elements


def _folded_block(block, noise, folds):
    """block, then ``folds`` repetitions of (block, block†), noise after every gate."""
    if folds < 0:
        raise ValueError(f"Fold count must be non-negative, got {folds}")
    inverse = [gate.dagger() for gate in reversed(block)]
    elements = _noisy(block, noise)
    for _ in range(folds):
        elements += _noisy(block, noise)
        elements += _noisy(inverse, noise)
    return elements


def build_ramsey(spec):
    """Unfolded single-qubit Ramsey sequence."""
    if spec.n_qubits != 1:
        raise ValueError(f"Ramsey circuits are single-qubit; got n_qubits={spec.n_qubits}")
    return build_local_folded(spec.with_folds(0))


def build_local_folded(spec):
    if spec.n_qubits != 1:
        return build_ghz(spec)
    preparation = [Gate(sqrt_y(0), '√Y')]
    inversion = [_final_gate(spec.detection)]
    elements = (
        _folded_block(preparation, spec.noise, spec.folds)
        + [Sense(spec.field, spec.duration)]
        + _folded_block(inversion, spec.noise, spec.folds)
    )
    return SensingCircuit(1, elements)


def _ramsey_unit(spec, segment_time, inverted):
    preparation = Gate(sqrt_y(0), '√Y')
    inversion = _final_gate(spec.detection)
    if inverted:
        # Sensing is not reversed, only the control gates are.
        first, second = inversion.dagger(), preparation.dagger()
    else:
        first, second = preparation, inversion
    return (
        _noisy([first], spec.noise)
        + [Sense(spec.field, segment_time)]
        + _noisy([second], spec.noise)
    )


def build_repeated_ramsey(spec, repetitions, segment_time):
    """Alternate U, U†, U, ... ``repetitions`` times, each with sensing time ``segment_time``."""
    if spec.n_qubits != 1:
        raise ValueError("Repeated Ramsey sequences are single-qubit")
    if repetitions < 1:
        raise ValueError(f"Need at least one repetition, got {repetitions}")
    elements = []
    for index in range(repetitions):
        elements += _ramsey_unit(spec, segment_time, inverted=bool(index % 2))
    return SensingCircuit(1, elements)


def build_global_folded(spec):
    """U (U† U)^m with every sensing period rescaled to t/(2m+1)."""
    if spec.n_qubits != 1:
        raise ValueError("Global folding is only defined for a single qubit")
    if spec.folds < 0:
        raise ValueError(f"Fold count must be non-negative, got {spec.folds}")
    return build_repeated_ramsey(spec, spec.scale_factor, spec.duration / spec.scale_factor)


def build_ghz(spec, n_qubits=None):
    n_qubits = spec.n_qubits if n_qubits is None else n_qubits
    if n_qubits < 2:
        raise ValueError(f"GHZ circuits need at least two qubits, got {n_qubits}")
    if spec.folding == FoldingStyle.GLOBAL:
        raise ValueError("Global folding is only defined for a single qubit")
    chain = [Gate(cnot(q, q + 1), 'CNOT') for q in range(n_qubits - 1)]
    preparation = [Gate(sqrt_y(0), '√Y')] + chain
    inversion = list(reversed(chain)) + [_final_gate(spec.detection)]
    elements = (
        _folded_block(preparation, spec.noise, spec.folds)
        + [Sense(spec.field, spec.duration)]
        + _folded_block(inversion, spec.noise, spec.folds)
    )
    return SensingCircuit(n_qubits, elements, measured_qubit=0)


def build(spec):
    """Dispatch on register size and folding style."""
    if spec.n_qubits > 1:
        return build_ghz(spec)
    if spec.folding == FoldingStyle.GLOBAL:
        return build_global_folded(spec)
    return build_local_folded(spec)


def execute(circuit):
    rho = init_ground(circuit.n_qubits)
    for element in circuit.elements:
        if isinstance(element, Gate):
            rho = apply_unitary(rho, element.gate)
        elif isinstance(element, Noise):
            rho = apply_local_noise(rho, element.spec, element.qubits)
        else:
            angle = element.field * element.duration
            for qubit in range(circuit.n_qubits):
                rho = apply_unitary(rho, rz(angle, qubit))
    return prob_one(rho, circuit.measured_qubit)


def protocol_probability(spec):
    """Exact p1 of the circuit described by ``spec``, memoized in the cache."""
    cache_key = get_cache_key(settings.CACHE_KEYS['circuit_probability'], digest_key(spec))
    return get_or_set_cache(cache_key, lambda: execute(build(spec)))
