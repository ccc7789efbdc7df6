"""Exact single-excitation dynamics of a charger and a battery in one Lorentzian bath.

Qubit A is the charger, qubit B the battery. Both couple to the same
zero-temperature cavity bath with relative strengths ``c1`` and ``c2``; the
bath is integrated out and enters only through the memory kernel
:func:`kappa`. Time is measured in units of ``1/lambda`` unless a bath with
``lam != 1`` is supplied.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .energetics import ergotropy_two_level
from .errors import DomainError, ValidationError
from .qcore import DensityMatrix, validate_density_matrix

CRITICAL_RTOL = 1e-12
NORM_TOL = 1e-12

Regime = Literal["overdamped", "underdamped", "critical"]


class DegenerateTheta2(UserWarning):
    """The second angle is unconstrained because all weight sits in nu1."""


@dataclass(frozen=True)
class LorentzianBath:
    """Lorentzian spectral density of width ``lam`` and vacuum Rabi frequency ``R``."""

    lam: float
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValidationError(f"spectral width must be > 0, got {self.lam!r}")
        if not (math.isfinite(self.R) and self.R >= 0):
            raise ValidationError(f"vacuum Rabi frequency must be >= 0, got {self.R!r}")

    @classmethod
    def from_ratio(cls, ratio: float, lam: float = 1.0) -> LorentzianBath:
        return cls(lam=lam, R=ratio * lam)

    @property
    def ratio(self) -> float:
        return self.R / self.lam

    @property
    def regime(self) -> Regime:
        gap = self.lam - 2.0 * self.R
        if abs(gap) <= CRITICAL_RTOL * self.lam:
            return "critical"
        return "overdamped" if gap > 0 else "underdamped"

    @property
    def chi(self) -> complex:
        """sqrt(lam^2 - 4 R^2); imaginary when underdamped."""
        # factored form avoids cancellation near lam = 2R
        sq = (self.lam - 2.0 * self.R) * (self.lam + 2.0 * self.R)
        return complex(math.sqrt(sq)) if sq >= 0 else complex(0.0, math.sqrt(-sq))


@dataclass(frozen=True)
class CouplingSplit:
    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValidationError("coupling fractions must be non-negative")
        if abs(self.c1**2 + self.c2**2 - 1.0) > 1e-12:
            raise ValidationError(f"c1^2 + c2^2 = {self.c1**2 + self.c2**2!r}, expected 1")

    @classmethod
    def from_c1(cls, c1: float) -> CouplingSplit:
        if not 0.0 <= c1 <= 1.0:
            raise ValidationError(f"c1 must lie in [0, 1], got {c1!r}")
        return cls(c1, math.sqrt(max(0.0, 1.0 - c1 * c1)))


@dataclass(frozen=True)
class SingleExcitationState:
    """Amplitudes of |eg> (nu1) and |ge> (nu2). Fields may be numpy arrays over time."""

    nu1: complex | np.ndarray
    nu2: complex | np.ndarray
    time: float | np.ndarray = 0.0

    def __post_init__(self):
        prob = np.abs(self.nu1) ** 2 + np.abs(self.nu2) ** 2
        if np.any(prob > 1.0 + 1e-10):
            raise ValidationError(f"|nu1|^2 + |nu2|^2 = {np.max(prob)!r} exceeds 1")

    @property
    def p_charger(self):
        return np.abs(self.nu1) ** 2

    @property
    def p_battery(self):
        return np.abs(self.nu2) ** 2


@dataclass(frozen=True)
class ChargingWindow:
    """Interaction switched on over [0, tau); states are frozen afterwards."""

    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValidationError(f"charging time must be >= 0, got {self.tau!r}")

    def clip(self, t):
        return np.minimum(t, self.tau)


def _check_time(t) -> np.ndarray:
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0) or np.any(~np.isfinite(ta)):
        raise ValidationError("time must be finite and non-negative")
    return ta


def kappa(bath: LorentzianBath, t):
    """Memory kernel exp(-lam t/2) (cosh(chi t/2) + lam/chi sinh(chi t/2)).

    Evaluated branch by branch so the result is real and stable near lam = 2R
    and for long times. Accepts a scalar or an array of times.
    """
    ta = _check_time(t)
    lam = bath.lam
    regime = bath.regime
    if regime == "critical":
        out = np.exp(-0.5 * lam * ta) * (1.0 + 0.5 * lam * ta)
    elif regime == "overdamped":
        chi = bath.chi.real
        slow = np.exp(-0.5 * (lam - chi) * ta)
        # e^{-lam t/2} cosh(chi t/2) = slow (1 + e^{-chi t}) / 2
        # e^{-lam t/2} sinh(chi t/2) / chi = slow * (-expm1(-chi t)) / (2 chi)
        cosh_part = 0.5 * slow * (1.0 + np.exp(-chi * ta))
        sinh_over_chi = 0.5 * slow * (-np.expm1(-chi * ta)) / chi
        out = cosh_part + lam * sinh_over_chi
    else:
        w = bath.chi.imag
        half = 0.5 * w * ta
        out = np.exp(-0.5 * lam * ta) * (np.cos(half) + lam / w * np.sin(half))
    return float(out) if out.ndim == 0 else out


def _check_amplitudes(nu01: complex, nu02: complex) -> None:
    norm = abs(nu01) ** 2 + abs(nu02) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"initial amplitudes have |nu01|^2+|nu02|^2 = {norm!r}, expected 1")


def evolve_amplitudes(
    split: CouplingSplit,
    initial: tuple[complex, complex],
    bath: LorentzianBath,
    t,
) -> SingleExcitationState:
    """Charger and battery amplitudes at time(s) t from initial (nu01, nu02)."""
    nu01, nu02 = (complex(x) for x in initial)
    _check_amplitudes(nu01, nu02)
    k = np.asarray(kappa(bath, t))
    c1, c2 = split.c1, split.c2
    cross = -c1 * c2 * (1.0 - k)
    nu1 = (c2**2 + c1**2 * k) * nu01 + cross * nu02
    nu2 = cross * nu01 + (c1**2 + c2**2 * k) * nu02
    return _state(nu1, nu2, t)


def _state(nu1, nu2, t) -> SingleExcitationState:
    nu1 = np.asarray(nu1, dtype=complex)
    nu2 = np.asarray(nu2, dtype=complex)
    if nu1.ndim == 0:
        return SingleExcitationState(complex(nu1), complex(nu2), float(t))
    return SingleExcitationState(nu1, nu2, np.asarray(t, dtype=float))


def subradiant_weights(alpha_minus: float) -> tuple[float, float]:
    """(alpha_minus, alpha_plus) with alpha_plus = +sqrt(1 - alpha_minus^2)."""
    if not (math.isfinite(alpha_minus) and abs(alpha_minus) <= 1.0):
        raise DomainError(f"|alpha_minus| must be <= 1, got {alpha_minus!r}")
    return alpha_minus, math.sqrt(max(0.0, 1.0 - alpha_minus**2))


def subradiant_initial_amplitudes(split: CouplingSplit, alpha_minus: float) -> tuple[complex, complex]:
    """(nu01, nu02) of alpha_- |phi_-> + alpha_+ |phi_+>.

    |phi_+> = c1|eg> + c2|ge> couples to the bath; |phi_-> = c2|eg> - c1|ge>
    is the dark combination.
    """
    am, ap = subradiant_weights(alpha_minus)
    c1, c2 = split.c1, split.c2
    return complex(am * c2 + ap * c1), complex(-am * c1 + ap * c2)


def evolve_subradiant_decomposition(
    split: CouplingSplit,
    alpha_minus: float,
    bath: LorentzianBath,
    t,
) -> SingleExcitationState:
    """Amplitudes for an initial state given in the bright/dark basis.

    The dark part is frozen and only the bright part is damped by kappa.
    """
    am, ap = subradiant_weights(alpha_minus)
    k = np.asarray(kappa(bath, t))
    c1, c2 = split.c1, split.c2
    nu1 = c2 * am + c1 * k * ap
    nu2 = -c1 * am + c2 * k * ap
    return _state(nu1, nu2, t)


def _diag_qubit(p_excited: float) -> DensityMatrix:
    return validate_density_matrix(np.diag([p_excited, 1.0 - p_excited]).astype(complex))


def reduced_states(state: SingleExcitationState) -> tuple[DensityMatrix, DensityMatrix]:
    """Diagonal reduced states (rho_A, rho_B) for a scalar-time state."""
    if np.ndim(state.nu1) != 0:
        raise ValidationError("reduced_states expects a single time point")
    return _diag_qubit(float(state.p_charger)), _diag_qubit(float(state.p_battery))


def energy_changes(initial: SingleExcitationState, final: SingleExcitationState, omega0: float = 1.0):
    """(|dE_A|, dE_B): energy lost by the charger and gained by the battery."""
    de_a = omega0 * np.abs(final.p_charger - initial.p_charger)
    de_b = omega0 * (final.p_battery - initial.p_battery)
    if np.ndim(de_a) == 0:
        return float(de_a), float(de_b)
    return de_a, de_b


def battery_ergotropy(state: SingleExcitationState, omega0: float = 1.0):
    """Ergotropy of the diagonal battery state, via the two-level closed form."""
    return ergotropy_two_level(np.clip(state.p_battery, 0.0, 1.0), omega0)


# --- optical simulation angles ----------------------------------------------

_HALF_PI = 0.5 * math.pi


def angle_map(theta1: float, theta2: float) -> tuple[float, float, float]:
    """Half-wave-plate and Dove-prism angles to (nu1, nu2, nu_env)."""
    for name, th in (("theta1", theta1), ("theta2", theta2)):
        if not (math.isfinite(th) and -1e-15 <= th <= _HALF_PI + 1e-15):
            raise DomainError(f"{name} must lie in [0, pi/2], got {th!r}")
    s1 = math.sin(2 * theta1)
    return math.cos(2 * theta1), s1 * math.sin(2 * theta2), s1 * math.cos(2 * theta2)


def solve_angles(nu1: float, nu2: float) -> tuple[float, float]:
    """Angles reproducing real amplitudes (nu1, nu2) through :func:`angle_map`.

    theta2 is taken in [0, pi/4], which puts the leftover amplitude on the
    environment path with a non-negative sign; theta1 is in [0, pi/4] whenever
    nu1 >= 0. Only nu2 >= 0 is reachable; pass |nu2| for the physical
    (negative) battery amplitude, since observables depend on it only through
    its modulus.
    """
    if not (math.isfinite(nu1) and math.isfinite(nu2)):
        raise DomainError("amplitudes must be finite")
    norm2 = nu1 * nu1 + nu2 * nu2
    if norm2 > 1.0 + 1e-12:
        raise DomainError(f"nu1^2 + nu2^2 = {norm2!r} exceeds 1")
    if nu2 < 0:
        raise DomainError("nu2 must be >= 0; angles in [0, pi/2] only reach non-negative nu2")
    theta1 = 0.5 * math.acos(min(1.0, max(-1.0, nu1)))
    s1 = math.sin(2 * theta1)
    if s1 < 1e-15:
        warnings.warn("nu1 = +-1 leaves theta2 unconstrained; using 0", DegenerateTheta2, stacklevel=2)
        return theta1, 0.0
    theta2 = 0.5 * math.asin(min(1.0, nu2 / s1))
    return theta1, theta2
