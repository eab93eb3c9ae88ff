"""
Closed-form and Lindblad reference results for the folded Ramsey sequences.

These are independent of the circuit engine and serve as its oracles:

* ``p1_local_pd`` / ``p1_local_ad``: exact p1 after locally folded Ramsey
  sequences under phase or amplitude damping.
* ``bloch_step`` / ``bloch_local_p1``: the same results from the formal
  solution of the Bloch equations, one gate or noise interval at a time.
* ``alt_p1_global_pd`` / ``alt_p1_global_ad``: average-Liouvillian
  (Magnus) approximations for globally folded sequences, built from 4x4
  superoperators acting on row-major vectorized density matrices.
"""

from dataclasses import dataclass
import logging
import math

from django.conf import settings
import numpy as np

from .cache_utils import digest_key, get_cache_key, get_or_set_cache
from .channels import NoiseKind
from .circuits import Detection
from .densmat import expm

logger = logging.getLogger(__name__)


# -----------------------------
# LOCAL FOLDING CLOSED FORMS
# -----------------------------
def _signal(field, duration, detection):
    """cos(Bt) in the variance convention, -sin(Bt) at the slope point."""
    phase = np.multiply(field, duration)
    if detection == Detection.SLOPE:
        return -np.sin(phase)
    return np.cos(phase)


def p1_local_pd(rate, field, duration, folds, detection=Detection.VARIANCE):
    """1/2 [1 - (1-lambda)^((2m+1)/2) cos(Bt)]; vectorizes over ``folds``."""
    contrast = np.power(1.0 - rate, (2 * np.asarray(folds, dtype=float) + 1) / 2)
    result = 0.5 * (1.0 - contrast * _signal(field, duration, detection))
    return float(result) if np.ndim(result) == 0 else result


def _geometric(ratio, count):
    count = np.asarray(count, dtype=float)
    if ratio == 1.0:
        return count
    return (1.0 - np.power(ratio, count)) / (1.0 - ratio)


def amplitude_damping_coefficients(rate, pre_folds, post_folds):
    """
    (A, C) such that v_z = A + C cos(B tau_z) after a locally folded sequence.

    With r = (1-gamma)^(3/2) and g_j = (1 - r^j)/(1 - r):
    A = gamma (r^m + g_m), C = r^(m+1) (r^n - gamma g_n),
    n preparation folds, m inversion folds.
    """
    r = (1.0 - rate) ** 1.5
    n = np.asarray(pre_folds, dtype=float)
    m = np.asarray(post_folds, dtype=float)
    offset = rate * (np.power(r, m) + _geometric(r, m))
    contrast = np.power(r, m + 1) * (np.power(r, n) - rate * _geometric(r, n))
    return offset, contrast


def p1_local_ad(rate, field, duration, pre_folds, post_folds=None, detection=Detection.VARIANCE):
    """
    p1 = (1 - v_z)/2 after locally folded Ramsey under amplitude damping.

    ``post_folds`` defaults to ``pre_folds``. At gamma = 1 every term
    collapses onto |0> and p1 = 0.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"Amplitude damping rate must lie in [0, 1], got {rate!r}")
    post_folds = pre_folds if post_folds is None else post_folds
    offset, contrast = amplitude_damping_coefficients(rate, pre_folds, post_folds)
    result = 0.5 * (1.0 - offset - contrast * _signal(field, duration, detection))
    return float(result) if np.ndim(result) == 0 else result


def p1_local(kind, rate, field, duration, folds, detection=Detection.VARIANCE):
    if kind == NoiseKind.PHASE_DAMPING:
        return p1_local_pd(rate, field, duration, folds, detection)
    return p1_local_ad(rate, field, duration, folds, folds, detection)


def closed_form_table(kind, rates, field, duration, folds, detection=Detection.VARIANCE):
    """Rows of (rate, p1 at each fold count); memoized."""
    def compute():
        return [
            (float(rate), *(p1_local(kind, rate, field, duration, m, detection) for m in folds))
            for rate in rates
        ]

    key = digest_key((str(kind), tuple(rates), field, duration, tuple(folds), str(detection)))
    return get_or_set_cache(get_cache_key(settings.CACHE_KEYS['closed_form_table'], key), compute)


# -----------------------------
# DISCRETE <-> CONTINUOUS RATES
# -----------------------------
def dephasing_probability(phase_rate, dt):
    """lambda such that sqrt(1 - lambda) = exp(-Lambda dt)."""
    return 1.0 - math.exp(-2.0 * phase_rate * dt)


def decay_probability(decay_rate, dt):
    """gamma = 1 - exp(-Gamma dt)."""
    return 1.0 - math.exp(-decay_rate * dt)


def phase_rate_from_probability(rate, dt):
    return -math.log1p(-rate) / (2.0 * dt)


def decay_rate_from_probability(rate, dt):
    return -math.log1p(-rate) / dt


# -----------------------------
# BLOCH EQUATIONS
# -----------------------------
@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, values):
        x, y, z = (float(v) for v in np.real(values))
        return cls(x, y, z)

    @property
    def array(self):
        return np.array([self.x, self.y, self.z])

    @property
    def p1(self):
        return 0.5 * (1.0 - self.z)


GROUND = BlochVector(0.0, 0.0, 1.0)


def coupling_matrix(omega=0.0, phase_rate=0.0, decay_rate=0.0, axis='x'):
    """
    Generator G of dv/dt = G v + c for control about ``axis`` at rate omega.

    Transverse components decay at Gamma/2 + Lambda, z relaxes at Gamma.
    """
    transverse = -(decay_rate / 2.0 + phase_rate)
    G = np.diag([transverse, transverse, -decay_rate]).astype(float)
    if axis == 'x':
        G[1, 2], G[2, 1] = -omega, omega
    elif axis == 'y':
        G[0, 2], G[2, 0] = omega, -omega
    else:
        raise ValueError(f"Control axis must be 'x' or 'y', got {axis!r}")
    return G


def sensing_matrix(field):
    """Free precession about z at angular rate B."""
    return np.array([[0.0, -field, 0.0], [field, 0.0, 0.0], [0.0, 0.0, 0.0]])


def shift_vector(decay_rate=0.0):
    return np.array([0.0, 0.0, decay_rate])


def bloch_step(v, G, c, tau):
    """v(t + tau) = e^{G tau} v + (e^{G tau} - 1) G^{-1} c."""
    G = np.asarray(G, dtype=float)
    c = np.asarray(c, dtype=float)
    propagator = np.real(expm(G * tau))
    result = propagator @ v.array
    if np.any(c != 0.0):
        if np.linalg.matrix_rank(G) < G.shape[0]:
            raise np.linalg.LinAlgError("Coupling matrix is singular but the shift vector is not zero")
        result = result + (propagator - np.eye(3)) @ np.linalg.solve(G, c)
    return BlochVector.from_array(result)


def _rotation(v, angle, axis):
    return bloch_step(v, coupling_matrix(omega=angle, axis=axis), shift_vector(), 1.0)


def _noise_interval(v, kind, rate):
    if kind == NoiseKind.PHASE_DAMPING:
        G = coupling_matrix(phase_rate=phase_rate_from_probability(rate, 1.0))
        return bloch_step(v, G, shift_vector(), 1.0)
    decay = decay_rate_from_probability(rate, 1.0)
    return bloch_step(v, coupling_matrix(decay_rate=decay), shift_vector(decay), 1.0)


def _folded_gate(v, kind, rate, angle, axis, folds):
    v = _noise_interval(_rotation(v, angle, axis), kind, rate)
    for _ in range(folds):
        v = _noise_interval(_rotation(v, angle, axis), kind, rate)
        v = _noise_interval(_rotation(v, -angle, axis), kind, rate)
    return v


def bloch_local_p1(kind, rate, field, duration, pre_folds, post_folds=None, detection=Detection.VARIANCE):
    """
    p1 of the locally folded sequence from the Bloch-equation solution.

    Preparation is R_x(pi/2); inversion is R_x(-pi/2) for the variance
    convention and R_y(pi/2) at the slope point. Each gate is followed by a
    unit-time noise interval whose continuous rate maps onto ``rate``.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"Bloch composition needs a rate in [0, 1), got {rate!r}")
    post_folds = pre_folds if post_folds is None else post_folds
    v = _folded_gate(GROUND, kind, rate, math.pi / 2, 'x', pre_folds)
    v = bloch_step(v, sensing_matrix(field), shift_vector(), duration)
    if detection == Detection.SLOPE:
        v = _folded_gate(v, kind, rate, math.pi / 2, 'y', post_folds)
    else:
        v = _folded_gate(v, kind, rate, -math.pi / 2, 'x', post_folds)
    return v.p1


# -----------------------------
# AVERAGE LIOUVILLIAN THEORY
# -----------------------------
SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)
SQRT_Y = np.array([[1.0, -1.0], [1.0, 1.0]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class LindbladParams:
    """Continuous-time parameters of one globally folded Ramsey unit."""

    phase_rate: float = 0.0
    decay_rate: float = 0.0
    field: float = 0.0
    segment_time: float = 0.0
    gate_time: float = 0.0

    def __post_init__(self):
        for name in ('phase_rate', 'decay_rate', 'field', 'segment_time', 'gate_time'):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")


def vectorize(rho):
    return np.asarray(rho, dtype=np.complex128).reshape(-1)


def unitary_superop(U):
    return np.kron(U, U.conj())


def hamiltonian_superop(H):
    return -1j * (np.kron(H, IDENTITY) - np.kron(IDENTITY, H.T))


def dissipator(L, rate):
    LdL = L.conj().T @ L
    return rate * (np.kron(L, L.conj()) - 0.5 * np.kron(LdL, IDENTITY) - 0.5 * np.kron(IDENTITY, LdL.T))


def _commutator(a, b):
    return a @ b - b @ a


def average_liouvillian(params, order=1):
    """
    Effective generator of one variance-detection Ramsey unit.

    In the toggling frame the unit is e^{X3} e^{X2} e^{X1} with
    X1 = dt R L_N R^-1, X2 = T R L_H R^-1, X3 = dt L_N and R the inversion
    superoperator. First order sums the X_j; second order adds
    1/2 sum_{j>k} [X_j, X_k].
    """
    if order not in (1, 2):
        raise ValueError(f"Only first and second order are implemented, got {order}")
    noise = (
        dissipator(SIGMA_Z, params.phase_rate / 2.0)
        + dissipator(LOWERING, params.decay_rate)
    )
    sensing = hamiltonian_superop(0.5 * params.field * SIGMA_Z)
    inversion = unitary_superop(SQRT_Y.conj().T)
    inversion_inverse = unitary_superop(SQRT_Y)
    segments = [
        params.gate_time * inversion @ noise @ inversion_inverse,
        params.segment_time * inversion @ sensing @ inversion_inverse,
        params.gate_time * noise,
    ]
    generator = sum(segments)
    if order == 2:
        for later in range(len(segments)):
            for earlier in range(later):
                generator = generator + 0.5 * _commutator(segments[later], segments[earlier])
    return generator


def alt_p1(params, folds, order=1):
    """p1 after ``folds`` + 1 repetitions of the averaged unit, starting from |0><0|."""
    ground = vectorize(np.diag([1.0, 0.0]))
    rho = expm((folds + 1) * average_liouvillian(params, order)) @ ground
    return float(np.real(rho[3]))


def alt_p1_global_pd(phase_rate, field, segment_time, gate_time, folds, order=1):
    params = LindbladParams(phase_rate=phase_rate, field=field, segment_time=segment_time, gate_time=gate_time)
    return alt_p1(params, folds, order)


def alt_p1_global_ad(decay_rate, field, segment_time, gate_time, folds, order=2):
    params = LindbladParams(decay_rate=decay_rate, field=field, segment_time=segment_time, gate_time=gate_time)
    return alt_p1(params, folds, order)
