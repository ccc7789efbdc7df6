"""Small dense complex linear algebra for 2x2, 4x4 and 16x16 matrices.

Basis conventions used throughout the package:

* a single qubit is ordered ``(e, g)``: index 0 is the excited state;
* two qubits A (charger / first cell) and B (battery / second cell) are
  ordered ``kron(A, B)``, which gives ``|1>=|ee>, |2>=|eg>, |3>=|ge>, |4>=|gg>``;
* superoperators act on row-major vectorized matrices, so
  ``vec(A @ X @ B) == kron(A, B.T) @ vec(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DimensionMismatch,
    HermiticityViolation,
    NonHermitianInput,
    PositivityViolation,
    TraceViolation,
    ValidationError,
)

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8

# single-qubit (e, g) ordering
EXCITED = 0
GROUND = 1

SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
NUMBER = SIGMA_PLUS @ SIGMA_MINUS  # |e><e|
I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix. Build through :func:`validate_density_matrix`."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def __getitem__(self, idx):
        return self.matrix[idx]


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def hermiticity_residual(m) -> float:
    a = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitian_eigensystem(m, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    Raises NonHermitianInput when ``max|m - m^dagger|`` exceeds ``tol`` scaled by
    the matrix magnitude.
    """
    a = _as_square(m)
    scale = max(1.0, float(np.max(np.abs(a))))
    res = hermiticity_residual(a)
    if res > tol * scale:
        raise NonHermitianInput(f"matrix is not Hermitian (residual {res:.3e})")
    # eigh reads one triangle only; symmetrize so the reconstruction matches m
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return w, v


def matrix_exponential(m, t: float = 1.0) -> np.ndarray:
    """exp(t*m) by Taylor scaling-and-squaring.

    The argument is scaled by 2**-s until its 1-norm is at most 1/2, then the
    series is summed until the Lagrange remainder bound drops below 1e-17
    relative, and finally squared s times.
    """
    a = _as_square(m) * t
    n = a.shape[0]
    if n > 16:
        raise DimensionMismatch(f"dimension {n} exceeds 16")
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if n else 0.0
    if not math.isfinite(norm):
        raise ValidationError("non-finite matrix norm")
    s = 0
    if norm > 0.5:
        s = int(math.ceil(math.log2(norm / 0.5)))
    a = a / (2.0**s)
    theta = norm / (2.0**s)

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    k = 0
    while True:
        k += 1
        term = term @ a / k
        result = result + term
        # remainder after k terms <= theta**(k+1)/(k+1)! * 1/(1 - theta/(k+2))
        bound = theta ** (k + 1) / math.factorial(k + 1) / (1.0 - theta / (k + 2))
        if bound <= 1e-17 or not term.any():
            break
    for _ in range(s):
        result = result @ result
    return result


def validate_density_matrix(m) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity; wrap a copy on success."""
    a = _as_square(m, "density matrix")
    if a.shape[0] not in (2, 4):
        raise DimensionMismatch(f"density matrices must be 2x2 or 4x4, got {a.shape}")
    res = hermiticity_residual(a)
    if res > HERMITICITY_TOL:
        raise HermiticityViolation(res)
    tr_err = abs(complex(np.trace(a)) - 1.0)
    if tr_err > TRACE_TOL:
        raise TraceViolation(tr_err)
    min_eig = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
    if min_eig < -POSITIVITY_TOL:
        raise PositivityViolation(-min_eig)
    out = a.copy()
    out.setflags(write=False)
    return DensityMatrix(out)


def partial_trace(rho, keep: Literal["A", "B"]) -> DensityMatrix:
    """Reduced state of one qubit of a two-qubit ``kron(A, B)`` state."""
    a = np.asarray(rho, dtype=complex)
    if a.shape != (4, 4):
        raise DimensionMismatch(f"partial_trace needs a 4x4 state, got {a.shape}")
    t = a.reshape(2, 2, 2, 2)
    if keep == "A":
        red = np.einsum("ajbj->ab", t)
    elif keep == "B":
        red = np.einsum("iaib->ab", t)
    else:
        raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")
    return validate_density_matrix(red)


# --- operators and states -------------------------------------------------


def on_qubit(op: np.ndarray, which: int) -> np.ndarray:
    """Embed a single-qubit operator on qubit 0 (A) or 1 (B) of the pair."""
    return np.kron(op, I2) if which == 0 else np.kron(I2, op)


def basis_projector(index: int) -> np.ndarray:
    """|m><m| for the 1-based two-qubit basis label m in 1..4."""
    if index not in (1, 2, 3, 4):
        raise ValidationError(f"basis index must be 1..4, got {index}")
    p = np.zeros((4, 4), dtype=complex)
    p[index - 1, index - 1] = 1.0
    return p


def pure_state(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-12:
        raise ValidationError(f"state vector norm {n!r} differs from 1")
    return np.outer(v, v.conj())


def left_mul(a: np.ndarray) -> np.ndarray:
    """Superoperator X -> a @ X (row-major vectorization)."""
    return np.kron(a, np.eye(a.shape[0]))


def right_mul(b: np.ndarray) -> np.ndarray:
    """Superoperator X -> X @ b (row-major vectorization)."""
    return np.kron(np.eye(b.shape[0]), b.T)


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator X -> a @ X @ b."""
    return np.kron(a, b.T)


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m, dtype=complex).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    d = math.isqrt(v.shape[-1])
    return v.reshape(v.shape[:-1] + (d, d))
