"""
Finite-shot measurement simulation and noise-agnostic inversion.

Every random draw goes through an explicit ``RngStream``: a Philox generator
keyed by (master_seed, stream_index), so trials can run in any order on any
worker and still reproduce bit for bit.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from .circuits import Detection, protocol_probability

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64 - 1


class RngStream:
    """Counter-based random stream for one trial."""

    def __init__(self, master_seed, stream_index):
        if not 0 <= int(master_seed) <= MAX_SEED:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        if int(stream_index) < 0:
            raise ValueError(f"stream_index must be non-negative, got {stream_index}")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        sequence = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def binomial(self, n, p):
        return int(self.generator.binomial(n, p))


@dataclass(frozen=True)
class ShotEstimate:
    p_hat: float
    n_s: int | None  # None marks the infinite-shot limit


def _check_probability(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Probability must lie in [0, 1], got {p!r}")


def sample_p1(p, n_s, rng):
    """Binomial(n_s, p) / n_s."""
    _check_probability(p)
    if n_s is None or int(n_s) < 1:
        raise ValueError(f"Shot count must be a positive integer, got {n_s!r}")
    n_s = int(n_s)
    return ShotEstimate(rng.binomial(n_s, p) / n_s, n_s)


def exact_estimate(p):
    _check_probability(p)
    return ShotEstimate(float(p), None)


def measure(p, n_s, rng):
    """Sample ``n_s`` shots, or return p itself when ``n_s`` is None."""
    if n_s is None:
        return exact_estimate(p)
    return sample_p1(p, n_s, rng)


def _check_duration(t):
    if not t > 0:
        raise ValueError(f"Sensing time must be positive, got {t!r}")


def invert_slope(p_hat, t, n_qubits=1):
    """arcsin(2(p_hat - 1/2)) / (N t), argument clamped to [-1, 1]."""
    _check_duration(t)
    argument = min(max(2.0 * (p_hat - 0.5), -1.0), 1.0)
    return math.asin(argument) / (n_qubits * t)


def invert_variance(p_hat, t, n_qubits=1):
    """arccos(1 - 2 p_hat) / (N t), argument clamped to [-1, 1]."""
    _check_duration(t)
    argument = min(max(1.0 - 2.0 * p_hat, -1.0), 1.0)
    return math.acos(argument) / (n_qubits * t)


def invert(p_hat, t, detection, n_qubits=1):
    if detection == Detection.SLOPE:
        return invert_slope(p_hat, t, n_qubits)
    return invert_variance(p_hat, t, n_qubits)


def fold_probabilities(spec, scale_list):
    """Exact p1 for each fold count in ``scale_list``."""
    if not scale_list:
        raise ValueError("scale_list must not be empty")
    if list(scale_list) != sorted(scale_list) or len(set(scale_list)) != len(scale_list):
        raise ValueError(f"scale_list must be strictly ascending, got {list(scale_list)}")
    return [(int(m), protocol_probability(spec.with_folds(int(m)))) for m in scale_list]


def draw_ensemble(probabilities, n_s, rng, detection, duration, n_qubits=1):
    """
    Turn exact fold probabilities into a (eta, B_est) ensemble.

    Shots are drawn in list order from ``rng``.
    """
    ensemble = []
    for folds, p in probabilities:
        estimate = measure(p, n_s, rng)
        ensemble.append((2 * folds + 1, invert(estimate.p_hat, duration, detection, n_qubits)))
    return ensemble


def estimate_ensemble(spec, scale_list, n_s, rng):
    """
    Build, execute, sample and invert every folded circuit.

    ``n_s=None`` is the infinite-shot mode where p_hat is the exact p1.
    """
    probabilities = fold_probabilities(spec, scale_list)
    return draw_ensemble(probabilities, n_s, rng, spec.detection, spec.duration, spec.n_qubits)
