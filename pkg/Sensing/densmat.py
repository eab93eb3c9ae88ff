"""
Dense density-matrix evolution for small qubit registers.

Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
basis index. Operators are applied by reshaping rho into a rank-2n tensor and
contracting only the target axes, so a gate never gets embedded into the full
2^n x 2^n space.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

MAX_QUBITS = 12
HERMITIAN_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-10
EXPM_TOLERANCE = 1e-12
PROBABILITY_SLACK = 1e-12


def as_matrix(entries):
    """Coerce ``entries`` to a finite complex128 2-D array."""
    matrix = np.array(entries, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix entries must be finite")
    return matrix


def _frozen(matrix):
    matrix = np.array(matrix, dtype=np.complex128, copy=True)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class DensityMatrix:
    n_qubits: int
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim = 2 ** self.n_qubits
        if self.mat.shape != (dim, dim):
            raise ValueError(
                f"Density matrix for {self.n_qubits} qubits must be {dim}x{dim}, got {self.mat.shape}"
            )
        object.__setattr__(self, 'mat', _frozen(self.mat))

    @property
    def dim(self):
        return 2 ** self.n_qubits

    def trace(self):
        return complex(np.trace(self.mat))

    def is_hermitian(self, tol=HERMITIAN_TOLERANCE):
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) < tol)


@dataclass(frozen=True)
class GateMatrix:
    """A 2x2 or 4x4 unitary together with the qubits it acts on."""

    matrix: np.ndarray = field(repr=False)
    targets: tuple

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        targets = tuple(int(q) for q in self.targets)
        if len(set(targets)) != len(targets):
            raise ValueError(f"Gate targets must be distinct, got {targets}")
        if matrix.shape != (2 ** len(targets), 2 ** len(targets)):
            raise ValueError(
                f"Gate of shape {matrix.shape} does not match {len(targets)} target(s)"
            )
        if not np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=UNITARY_TOLERANCE):
            raise ValueError("Gate matrix is not unitary")
        object.__setattr__(self, 'matrix', _frozen(matrix))
        object.__setattr__(self, 'targets', targets)

    def dagger(self):
        return GateMatrix(self.matrix.conj().T, self.targets)


def init_ground(n_qubits):
    """Return |0...0><0...0| on ``n_qubits`` qubits."""
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}")
    dim = 2 ** int(n_qubits)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    mat[0, 0] = 1.0
    return DensityMatrix(int(n_qubits), mat)


def _check_targets(targets, n_qubits):
    for qubit in targets:
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"Qubit index {qubit} out of range for {n_qubits} qubit(s)")


def _contract(tensor, operator, axes):
    """Apply ``operator`` to the tensor ``axes``, keeping the axis layout."""
    k = len(axes)
    op = operator.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _sandwich(mat, n_qubits, left, targets):
    """Compute left . rho . left^dagger with ``left`` acting on ``targets``."""
    tensor = mat.reshape((2,) * (2 * n_qubits))
    tensor = _contract(tensor, left, targets)
    tensor = _contract(tensor, left.conj(), [n_qubits + q for q in targets])
    dim = 2 ** n_qubits
    return tensor.reshape(dim, dim)


def apply_unitary(rho, gate):
    """Return U rho U^dagger with ``gate`` embedded on its targets."""
    _check_targets(gate.targets, rho.n_qubits)
    mat = _sandwich(rho.mat, rho.n_qubits, gate.matrix, gate.targets)
    return DensityMatrix(rho.n_qubits, mat)


def check_kraus(kraus, tol=HERMITIAN_TOLERANCE):
    """Validate a single-qubit Kraus set and return it as arrays."""
    operators = [as_matrix(op) for op in kraus]
    if not operators:
        raise ValueError("Kraus set is empty")
    for op in operators:
        if op.shape != (2, 2):
            raise ValueError(f"Kraus operators must be 2x2, got {op.shape}")
    completeness = sum(op.conj().T @ op for op in operators)
    if not np.allclose(completeness, np.eye(2), atol=tol):
        raise ValueError("Kraus operators do not satisfy sum(E^dagger E) = I")
    return operators


def apply_kraus(rho, kraus, target):
    """Apply the channel rho -> sum_k E_k rho E_k^dagger on one qubit."""
    operators = check_kraus(kraus)
    _check_targets((target,), rho.n_qubits)
    mat = sum(_sandwich(rho.mat, rho.n_qubits, op, (target,)) for op in operators)
    return DensityMatrix(rho.n_qubits, mat)


def prob_one(rho, qubit):
    """Probability of reading |1> on ``qubit``, clamped to [0, 1]."""
    _check_targets((qubit,), rho.n_qubits)
    populations = np.real(np.diag(rho.mat)).reshape((2,) * rho.n_qubits)
    p = float(np.take(populations, 1, axis=qubit).sum())
    if p < -PROBABILITY_SLACK or p > 1 + PROBABILITY_SLACK:
        logger.warning(f"prob_one outside [0, 1] beyond slack: {p!r}")
    return min(max(p, 0.0), 1.0)


def expm(matrix, tol=EXPM_TOLERANCE):
    """
    Matrix exponential of a square complex matrix.

    Delegates to scipy's scaling-and-squaring Pade implementation, whose
    degree selection bounds the truncation error by unit roundoff, so any
    ``tol`` at or above double-precision epsilon is met.
    """
    if not np.finfo(float).eps <= tol:
        raise ValueError(f"expm tolerance must be at least double-precision epsilon, got {tol!r}")
    matrix = as_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expm needs a square matrix, got {matrix.shape}")
    return scipy.linalg.expm(matrix)

