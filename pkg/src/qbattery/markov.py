"""Lindblad dynamics of two driven qubits with collective decay and dipole coupling.

The master equation has individual decay ``Gamma``, cross decay ``gamma_c``,
exchange coupling ``Omega`` and resonant laser drives ``l1, l2``. By default
the generator is built in the frame rotating at the laser frequency, where it
is time independent; a lab-frame generator with explicit drive phases exists
for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .energetics import ergotropy_single_cell, ergotropy_two_cell_batch
from .errors import (
    CPViolation,
    DensityMatrixViolation,
    NumericalInvariantError,
    StepTooLarge,
    ValidationError,
)
from .nonmarkov import CouplingSplit, subradiant_initial_amplitudes
from .qcore import (
    NUMBER,
    SIGMA_MINUS,
    DensityMatrix,
    basis_projector,
    left_mul,
    matrix_exponential,
    on_qubit,
    right_mul,
    sandwich,
    unvec,
    validate_density_matrix,
    vec,
)

Frame = Literal["rotating", "lab"]

STEP_FRACTION = 0.005  # default step = STEP_FRACTION / fastest rate
MAX_STEP_NORM = 0.1  # step * ||L||_1 ceiling
TRACE_NULL_TOL = 1e-12

# lowering operators of qubit 1 (A) and qubit 2 (B)
LOWERING = (on_qubit(SIGMA_MINUS, 0), on_qubit(SIGMA_MINUS, 1))


@dataclass(frozen=True)
class MarkovParams:
    """Rates are angular frequencies in the same (arbitrary) time unit.

    ``tau`` is the charging window: the interaction is on for t < tau and the
    state is frozen afterwards. ``None`` leaves it on for the whole grid.
    """

    Omega: float = 0.0
    Gamma: float = 0.0
    gamma_c: float = 0.0
    l1: float = 0.0
    l2: float = 0.0
    omega0: float = 1.0
    omegaL: float = 1.0
    tau: float | None = None

    def __post_init__(self):
        for name in ("Omega", "Gamma", "gamma_c", "l1", "l2", "omega0", "omegaL"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.Gamma < 0:
            raise ValidationError(f"Gamma must be >= 0, got {self.Gamma!r}")
        if self.tau is not None and not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValidationError(f"tau must be >= 0, got {self.tau!r}")
        check_complete_positivity(self.decay_matrix())

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omegaL

    def decay_matrix(self) -> np.ndarray:
        return np.array([[self.Gamma, self.gamma_c], [self.gamma_c, self.Gamma]], dtype=float)

    def rate_scale(self) -> float:
        return max(
            abs(self.Gamma), abs(self.gamma_c), abs(self.Omega),
            abs(self.l1), abs(self.l2), abs(self.detuning), 1e-9,
        )


def check_complete_positivity(decay: np.ndarray) -> None:
    """The Kossakowski matrix of decay rates must be positive semidefinite."""
    d = np.asarray(decay, dtype=float)
    n = d.shape[0]
    for i in range(n):
        if d[i, i] < 0:
            raise CPViolation(f"decay rate Gamma_{i + 1}{i + 1} = {d[i, i]!r} is negative")
        for j in range(i + 1, n):
            if d[i, j] ** 2 > d[i, i] * d[j, j] * (1 + 1e-12):
                raise CPViolation(
                    f"collective rate Gamma_{i + 1}{j + 1} = {d[i, j]!r} exceeds "
                    f"sqrt(Gamma_{i + 1}{i + 1} * Gamma_{j + 1}{j + 1}) = {math.sqrt(d[i, i] * d[j, j])!r}"
                )
    if n > 2 and np.linalg.eigvalsh(d)[0] < -1e-12 * max(1.0, np.abs(d).max()):
        raise CPViolation("decay matrix is not positive semidefinite")


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i [h, rho]."""
    return -1j * (left_mul(h) - right_mul(h))


def dissipator_superop(decay: np.ndarray, lowering=LOWERING) -> np.ndarray:
    """-1/2 sum_ij G_ij (rho s+_i s-_j + s+_i s-_j rho - 2 s-_j rho s+_i)."""
    dim = lowering[0].shape[0]
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i, si in enumerate(lowering):
        raise_i = si.conj().T
        for j, sj in enumerate(lowering):
            g = decay[i][j]
            if g == 0:
                continue
            a = raise_i @ sj
            out += -0.5 * g * (right_mul(a) + left_mul(a) - 2.0 * sandwich(sj, raise_i))
    return out


def coherent_hamiltonian(params: MarkovParams, frame: Frame = "rotating") -> np.ndarray:
    """Static Hamiltonian part: free term, exchange coupling and (rotating) drives."""
    n_tot = on_qubit(NUMBER, 0) + on_qubit(NUMBER, 1)
    s1, s2 = LOWERING
    exchange = params.Omega * (s1.conj().T @ s2 + s2.conj().T @ s1)
    if frame == "rotating":
        drive = -0.5 * sum(l * (s.conj().T + s) for l, s in zip((params.l1, params.l2), LOWERING))
        return params.detuning * n_tot + exchange + drive
    return params.omega0 * n_tot + exchange


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """Vectorized generator L(t) = static + e^{-i wL t} plus + e^{+i wL t} minus.

    ``drive_plus`` / ``drive_minus`` are only set for lab-frame generators with
    drives; in the rotating frame the generator is constant.
    """

    superop: np.ndarray
    frame: Frame
    params: MarkovParams
    drive_plus: np.ndarray | None = field(default=None, repr=False)
    drive_minus: np.ndarray | None = field(default=None, repr=False)

    @property
    def time_dependent(self) -> bool:
        return self.drive_plus is not None

    def at(self, t: float) -> np.ndarray:
        if not self.time_dependent:
            return self.superop
        ph = np.exp(-1j * self.params.omegaL * t)
        return self.superop + ph * self.drive_plus + ph.conjugate() * self.drive_minus

    def norm1(self) -> float:
        n = float(np.abs(self.superop).sum(axis=0).max())
        if self.time_dependent:
            n += float(np.abs(self.drive_plus).sum(axis=0).max())
            n += float(np.abs(self.drive_minus).sum(axis=0).max())
        return n

    def apply(self, rho, t: float = 0.0) -> np.ndarray:
        return unvec(self.at(t) @ vec(np.asarray(rho)))

    def default_step(self) -> float:
        step = STEP_FRACTION / self.params.rate_scale()
        if self.frame == "lab":
            step = min(step, STEP_FRACTION / max(abs(self.params.omega0), abs(self.params.omegaL), 1e-9))
        norm = self.norm1()
        if norm > 0:
            step = min(step, MAX_STEP_NORM / norm)
        return step


def build_generator(params: MarkovParams, frame: Frame = "rotating") -> LindbladGenerator:
    """Assemble the 16x16 Lindblad superoperator in the requested frame."""
    if frame not in ("rotating", "lab"):
        raise ValidationError(f"unknown frame {frame!r}")
    decay = params.decay_matrix()
    check_complete_positivity(decay)
    superop = commutator_superop(coherent_hamiltonian(params, frame)) + dissipator_superop(decay)

    plus = minus = None
    if frame == "lab" and (params.l1 or params.l2):
        # H_L(t) = -1/2 sum_i l_i (s+_i e^{-i wL t} + s-_i e^{+i wL t})
        raising = -0.5 * sum(l * s.conj().T for l, s in zip((params.l1, params.l2), LOWERING))
        plus = commutator_superop(raising)
        minus = commutator_superop(raising.conj().T)

    trace_row = vec(np.eye(4)).conj()
    leak = np.max(np.abs(trace_row @ superop))
    if leak > TRACE_NULL_TOL * max(1.0, np.abs(superop).max()):
        raise NumericalInvariantError(f"generator is not trace preserving (leak {leak:.3e})")
    return LindbladGenerator(superop, frame, params, plus, minus)


def _rk4_increment(lmat: np.ndarray, h: float) -> np.ndarray:
    """B with I + B equal to one RK4 step for constant L.

    For constant L an RK4 step multiplies by the degree-4 Taylor polynomial
    of hL. The identity is kept out of B so that small steps do not lose
    digits to rounding against 1.
    """
    a = h * lmat
    a2 = a @ a
    return a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24


def _power_increment(b: np.ndarray, n: int) -> np.ndarray:
    """C with I + C = (I + B)**n, by binary powering in increment form."""
    result = None
    base = b
    while n:
        if n & 1:
            result = base if result is None else result + base + result @ base
        n >>= 1
        if n:
            base = 2 * base + base @ base
    return result


def _rk4_step(gen: LindbladGenerator, y: np.ndarray, t: float, h: float) -> np.ndarray:
    k1 = gen.at(t) @ y
    mid = gen.at(t + 0.5 * h)
    k2 = mid @ (y + 0.5 * h * k1)
    k3 = mid @ (y + 0.5 * h * k2)
    k4 = gen.at(t + h) @ (y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _resolve_step(gen: LindbladGenerator, step: float | None) -> float:
    if step is None:
        return gen.default_step()
    if not (math.isfinite(step) and step > 0):
        raise ValidationError(f"step must be positive, got {step!r}")
    norm = gen.norm1()
    if step * norm > MAX_STEP_NORM * (1 + 1e-12):
        raise StepTooLarge(f"step * ||L||_1 = {step * norm:.3g} exceeds {MAX_STEP_NORM}")
    return step


def _checked(rho: np.ndarray, t: float) -> DensityMatrix:
    try:
        return validate_density_matrix(rho)
    except DensityMatrixViolation as exc:
        raise NumericalInvariantError(
            f"{exc.invariant} lost at t={t!r} (residual {exc.residual:.3e}); "
            "this indicates a generator or step problem"
        ) from exc


def _window(gen: LindbladGenerator, times: np.ndarray) -> np.ndarray:
    tau = gen.params.tau
    return times if tau is None else np.minimum(times, tau)


def evolve_series(gen: LindbladGenerator, rho0, times, step: float | None = None) -> np.ndarray:
    """States at each of the non-decreasing ``times`` (shape (n, 4, 4)).

    Classical fixed-step RK4. Each interval between output times is split
    into the smallest whole number of substeps no longer than ``step``, so
    output times are hit exactly.
    """
    h_max = _resolve_step(gen, step)
    t_out = _window(gen, np.asarray(times, dtype=float))
    if t_out.ndim != 1 or np.any(t_out < 0) or np.any(np.diff(t_out) < 0):
        raise ValidationError("times must be a non-decreasing list of non-negative values")
    y = vec(validate_density_matrix(rho0).matrix).copy()
    out = np.empty((len(t_out), 4, 4), dtype=complex)
    t = 0.0
    cache: dict[tuple[float, int], np.ndarray] = {}
    for k, target in enumerate(t_out):
        dt = target - t
        if dt > 0:
            n_sub = max(1, math.ceil(dt / h_max - 1e-9))
            h = dt / n_sub
            if gen.time_dependent:
                for i in range(n_sub):
                    y = _rk4_step(gen, y, t + i * h, h)
            else:
                # n_sub RK4 steps applied as one matrix power
                key = (round(h, 15), n_sub)
                inc = cache.get(key)
                if inc is None:
                    inc = cache[key] = _power_increment(_rk4_increment(gen.superop, h), n_sub)
                y = y + inc @ y
            t = target
        out[k] = _checked(unvec(y), t).matrix
    return out


def evolve(gen: LindbladGenerator, rho0, t: float, step: float | None = None) -> DensityMatrix:
    """State at time t by fixed-step RK4."""
    return DensityMatrix(evolve_series(gen, rho0, [t], step)[0])


def exact_propagate(gen: LindbladGenerator, rho0, t: float) -> DensityMatrix:
    """State at time t by exponentiating the (constant) generator."""
    if gen.time_dependent:
        raise ValidationError("exact propagation needs a time-independent generator")
    t_eff = float(_window(gen, np.asarray(float(t))))
    y = matrix_exponential(gen.superop, t_eff) @ vec(validate_density_matrix(rho0).matrix)
    return _checked(unvec(y), t_eff)


def exact_series(gen: LindbladGenerator, rho0, times) -> np.ndarray:
    return np.stack([exact_propagate(gen, rho0, t).matrix for t in times])


# --- initial states -----------------------------------------------------------


def basis_state(index: int) -> DensityMatrix:
    """|m><m| for m = 1 (ee), 2 (eg), 3 (ge), 4 (gg)."""
    return validate_density_matrix(basis_projector(index))


def single_excitation_state(c1: float, alpha_minus: float) -> DensityMatrix:
    """alpha_- |phi_-> + alpha_+ |phi_+> with |phi_+> = c1|eg> + c2|ge>, |phi_-> = c2|eg> - c1|ge>."""
    nu1, nu2 = subradiant_initial_amplitudes(CouplingSplit.from_c1(c1), alpha_minus)
    psi = np.array([0.0, nu1, nu2, 0.0], dtype=complex)
    return validate_density_matrix(np.outer(psi, psi.conj()))


def dark_state(c1: float = 1 / math.sqrt(2)) -> DensityMatrix:
    return single_excitation_state(c1, 1.0)


# --- observables along trajectories ---------------------------------------------


def single_cell_series(params: MarkovParams, rho0, tau_grid, step: float | None = None):
    """[(tau, W)] with qubit B as the battery and qubit A as the charger."""
    gen = build_generator(params)
    states = evolve_series(gen, rho0, tau_grid, step)
    return [(float(t), ergotropy_single_cell(r, params.omega0)) for t, r in zip(tau_grid, states)]


def two_cell_series(params: MarkovParams, rho0, tau_grid, step: float | None = None):
    """[(tau, W)] with both qubits forming the battery."""
    gen = build_generator(params)
    states = evolve_series(gen, rho0, tau_grid, step)
    w = ergotropy_two_cell_batch(states, params.omega0)
    return [(float(t), float(x)) for t, x in zip(tau_grid, w)]


def dark_state_residual(params: MarkovParams) -> float:
    """max |L[|phi_-><phi_-|]| for the balanced dark state (c1 = 1/sqrt 2)."""
    gen = build_generator(params)
    return float(np.max(np.abs(gen.apply(dark_state().matrix))))
