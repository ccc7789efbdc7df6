"""Internal energy, passive states and ergotropy.

Energies are in units of the qubit frequency, which defaults to 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, DomainError, ImaginaryResidue, ValidationError
from .qcore import NUMBER, hermitian_eigensystem, on_qubit, validate_density_matrix

log = logging.getLogger(__name__)

REPORT_TOL = 1e-12


def qubit_hamiltonian(omega0: float = 1.0) -> np.ndarray:
    """omega0 * sigma+ sigma- on one qubit, (e, g) ordering."""
    return omega0 * NUMBER


def single_cell_hamiltonian(omega0: float = 1.0) -> np.ndarray:
    """Battery Hamiltonian acting on qubit B only, embedded in the pair space."""
    return omega0 * on_qubit(NUMBER, 1)


def two_cell_hamiltonian(omega0: float = 1.0) -> np.ndarray:
    """omega0 * (n_A + n_B) = omega0 * diag(2, 1, 1, 0)."""
    return omega0 * (on_qubit(NUMBER, 0) + on_qubit(NUMBER, 1))


@dataclass(frozen=True)
class ErgotropyReport:
    internal_energy: float
    passive_energy: float
    ergotropy: float
    w_max: float

    def __post_init__(self):
        if abs(self.ergotropy - (self.internal_energy - self.passive_energy)) > REPORT_TOL:
            raise ValidationError("ergotropy must equal internal minus passive energy")
        if not (-REPORT_TOL <= self.ergotropy <= self.w_max + REPORT_TOL):
            raise ValidationError(
                f"ergotropy {self.ergotropy!r} outside [0, w_max={self.w_max!r}]"
            )

    @property
    def normalized(self) -> float:
        return self.ergotropy / self.w_max if self.w_max > 0 else 0.0


def internal_energy(rho, h) -> float:
    """tr(rho H); raises ImaginaryResidue when the trace is not real."""
    r = np.asarray(rho, dtype=complex)
    hm = np.asarray(h, dtype=complex)
    if r.shape != hm.shape:
        raise DimensionMismatch(f"state {r.shape} and Hamiltonian {hm.shape} differ")
    e = complex(np.einsum("ij,ji->", r, hm))
    if abs(e.imag) > 1e-10:
        raise ImaginaryResidue(f"tr(rho H) has imaginary part {e.imag:.3e}")
    return e.real


def passive_state(rho, h):
    """Populations of rho sorted descending, placed on energy levels sorted ascending."""
    p, _ = hermitian_eigensystem(rho)
    _, levels = hermitian_eigensystem(h)
    p_desc = p[np.argsort(-p, kind="stable")]
    sigma = (levels * p_desc) @ levels.conj().T
    # eigenvalues may sit a hair below zero after integration; the check allows it
    return validate_density_matrix(0.5 * (sigma + sigma.conj().T))


def _passive_energy(rho, h) -> float:
    p, _ = hermitian_eigensystem(rho)
    e, _ = hermitian_eigensystem(h)
    return float(np.dot(np.sort(p)[::-1], e))


def max_ergotropy(h) -> float:
    """Largest ergotropy any state can have: top level minus ground level."""
    e, _ = hermitian_eigensystem(h)
    return float(e[-1] - e[0])


def ergotropy_general(rho, h) -> ErgotropyReport:
    """Eigen-based ergotropy, valid for any dimension."""
    u = internal_energy(rho, h)
    passive = _passive_energy(rho, h)
    w = u - passive
    if -REPORT_TOL <= w < 0.0:
        # rounding on an already passive state
        passive = u
        w = 0.0
    return ErgotropyReport(u, passive, w, max_ergotropy(h))


def ergotropy_two_level(p_excited, omega0: float = 1.0):
    """omega0 (2p - 1) Theta(p - 1/2) for a diagonal qubit state.

    Accepts scalars or arrays.
    """
    p = np.asarray(p_excited, dtype=float)
    if np.any((p < -1e-12) | (p > 1 + 1e-12)) or np.any(~np.isfinite(p)):
        raise DomainError("excited population must lie in [0, 1]")
    w = np.where(p >= 0.5, omega0 * (2.0 * p - 1.0), 0.0)
    return float(w) if w.ndim == 0 else w


def ergotropy_single_cell(rho, omega0: float = 1.0) -> float:
    """Closed-form ergotropy of qubit B for a two-qubit state, charger = qubit A.

    Uses only the battery population rho11 + rho33 and the battery coherence
    rho12 + rho34, i.e. the reduced state of B; it is exact for every
    two-qubit state.
    """
    r = np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise DimensionMismatch(f"single-cell ergotropy needs a 4x4 state, got {r.shape}")
    pop = (r[0, 0] + r[2, 2]).real
    coh = abs(r[0, 1] + r[2, 3])
    x = 2.0 * pop - 1.0
    w = 0.5 * omega0 * (np.sqrt(4.0 * coh**2 + x**2) + x)
    if w < 0.0:
        log.info("single-cell ergotropy clamped from %.3e to 0", w)
        w = 0.0
    return float(w)


def ergotropy_two_cell(rho, omega0: float = 1.0) -> float:
    """Closed-form ergotropy of both qubits under omega0 (n_A + n_B)."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise DimensionMismatch(f"two-cell ergotropy needs a 4x4 state, got {r.shape}")
    eta, _ = hermitian_eigensystem(r)
    diag = r.diagonal().real
    w = omega0 * (-2 * eta[0] - eta[1] - eta[2] + 2 * diag[0] + diag[1] + diag[2])
    if -REPORT_TOL < w < 0.0:
        w = 0.0
    return float(w)


def ergotropy_two_cell_batch(rhos, omega0: float = 1.0) -> np.ndarray:
    """Vectorized :func:`ergotropy_two_cell` over a stack of 4x4 states."""
    r = np.asarray(rhos, dtype=complex)
    herm = 0.5 * (r + np.conj(np.swapaxes(r, -1, -2)))
    eta = np.linalg.eigvalsh(herm)
    diag = np.real(np.diagonal(r, axis1=-2, axis2=-1))
    w = omega0 * (
        -2 * eta[..., 0] - eta[..., 1] - eta[..., 2] + 2 * diag[..., 0] + diag[..., 1] + diag[..., 2]
    )
    return np.where((w < 0) & (w > -REPORT_TOL), 0.0, w)


def aggregate_pairs(pair_report: ErgotropyReport, n_pairs: int) -> ErgotropyReport:
    """Scale a pair report to ``n_pairs`` identical, uncorrelated pairs.

    Assumes the global state is a product over pairs. Internal energy is then
    additive; the passive energy is additive when each pair passivizes to its
    ground state (any pure pair, e.g. the dark-state battery). For mixed pairs
    the true ergotropy of the product can exceed the scaled value, so the
    result is a lower bound there.
    """
    if not isinstance(n_pairs, (int, np.integer)) or n_pairs < 1:
        raise ValidationError(f"n_pairs must be a positive integer, got {n_pairs!r}")
    if n_pairs == 1:
        return pair_report
    u = pair_report.internal_energy * n_pairs
    passive = pair_report.passive_energy * n_pairs
    return replace(
        pair_report,
        internal_energy=u,
        passive_energy=passive,
        ergotropy=max(u - passive, 0.0),
        w_max=pair_report.w_max * n_pairs,
    )
