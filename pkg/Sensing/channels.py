from dataclasses import dataclass
import logging
import math

from django.db import models
import numpy as np

from .densmat import apply_kraus

logger = logging.getLogger(__name__)


class NoiseKind(models.TextChoices):
    PHASE_DAMPING = 'phase_damping', 'Phase damping'
    AMPLITUDE_DAMPING = 'amplitude_damping', 'Amplitude damping'


@dataclass(frozen=True)
class NoiseSpec:
    """Channel kind plus the per-gate damping probability (lambda or gamma)."""

    kind: str
    rate: float

    def __post_init__(self):
        if self.kind not in NoiseKind.values:
            raise ValueError(f"Unknown noise kind {self.kind!r}; expected one of {NoiseKind.values}")
        rate = float(self.rate)
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"Noise rate must lie in [0, 1], got {self.rate!r}")
        object.__setattr__(self, 'kind', NoiseKind(self.kind))
        object.__setattr__(self, 'rate', rate)

    @property
    def is_noiseless(self):
        return self.rate == 0.0

    def with_rate(self, rate):
        return NoiseSpec(self.kind, rate)


def kraus_of(spec):
    """Kraus pair of the single-qubit channel described by ``spec``."""
    rate = spec.rate
    if spec.kind == NoiseKind.PHASE_DAMPING:
        return [
            np.diag([1.0, math.sqrt(1.0 - rate)]).astype(np.complex128),
            np.diag([0.0, math.sqrt(rate)]).astype(np.complex128),
        ]
    return [
        np.diag([1.0, math.sqrt(1.0 - rate)]).astype(np.complex128),
        np.array([[0.0, math.sqrt(rate)], [0.0, 0.0]], dtype=np.complex128),
    ]


def apply_local_noise(rho, spec, qubits):
    """Apply the channel independently to each listed qubit, in list order."""
    qubits = tuple(int(q) for q in qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"Noise qubits must be distinct, got {qubits}")
    for qubit in qubits:
        if not 0 <= qubit < rho.n_qubits:
            raise ValueError(f"Qubit index {qubit} out of range for {rho.n_qubits} qubit(s)")
    if spec.is_noiseless:
        return rho
    kraus = kraus_of(spec)
    for qubit in qubits:
        rho = apply_kraus(rho, kraus, qubit)
    return rho
