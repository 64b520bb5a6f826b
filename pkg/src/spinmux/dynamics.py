"""Two-level dynamics under piecewise-constant in-phase/quadrature controls.

Controls are cyclic amplitudes in Hz: a step (I, Q) drives the rotating-frame
Hamiltonian H/hbar = 0.5*(2*pi*delta*sz + 2*pi*I*sx + 2*pi*Q*sy) for its
duration.  Each step is exponentiated in closed form (exact for constant
controls), so products stay unitary to rounding even over 1e4 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDetuning

TWO_PI = 2.0 * math.pi

# |z|^2 may stray past [0, 1] by accumulated rounding; clamp only that much.
_BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class DriveCarrier:
    """Microwave carrier: frequency (Hz) and the rotating-frame phase origin."""

    omega_mw: float
    phi_mw: float = 0.0

    def __post_init__(self):
        if self.omega_mw <= 0:
            raise ValueError("carrier frequency must be positive")


@dataclass(frozen=True)
class PulseStep:
    """One piecewise-constant control step, amplitudes in cyclic Hz."""

    i_amp: float
    q_amp: float

    @property
    def omega_angular(self) -> float:
        """Angular Rabi rate 2*pi*sqrt(I^2 + Q^2), rad/s."""
        return TWO_PI * math.hypot(self.i_amp, self.q_amp)

    @property
    def phase(self) -> float:
        return math.atan2(self.q_amp, self.i_amp)


@dataclass(frozen=True)
class PulseProgram:
    """An ordered list of control steps with a uniform step duration."""

    steps: tuple
    dt: float  # s

    def __post_init__(self):
        steps = tuple(self.steps)
        if len(steps) < 1:
            raise ValueError("a pulse needs at least one step")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "steps", steps)

    @property
    def duration(self) -> float:
        return len(self.steps) * self.dt

    def amplitudes(self) -> tuple[np.ndarray, np.ndarray]:
        """The (I, Q) amplitude arrays in Hz."""
        i = np.array([s.i_amp for s in self.steps])
        q = np.array([s.q_amp for s in self.steps])
        return i, q

    @classmethod
    def from_arrays(cls, i_amps, q_amps, dt: float) -> "PulseProgram":
        i_amps = np.asarray(i_amps, dtype=float)
        q_amps = np.asarray(q_amps, dtype=float)
        if i_amps.shape != q_amps.shape or i_amps.ndim != 1:
            raise ValueError("I and Q must be 1-d arrays of equal length")
        steps = tuple(PulseStep(float(a), float(b)) for a, b in zip(i_amps, q_amps))
        return cls(steps=steps, dt=dt)

    def concatenated(self, other: "PulseProgram") -> "PulseProgram":
        if abs(other.dt - self.dt) > 1e-15 * self.dt:
            raise ValueError("can only concatenate pulses with equal dt")
        return PulseProgram(steps=self.steps + other.steps, dt=self.dt)

    def total_variation(self) -> float:
        """Sum of absolute adjacent I and Q differences, Hz."""
        i, q = self.amplitudes()
        return float(np.sum(np.abs(np.diff(i))) + np.sum(np.abs(np.diff(q))))


@dataclass(frozen=True)
class QubitState:
    """Pure two-level state (c0, c1) over the {|0>, |1>} basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2,):
            raise ValueError("state must have two amplitudes")
        if abs(np.vdot(amp, amp).real - 1.0) > 1e-10:
            raise ValueError("state must be normalized")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(np.array([1.0 + 0.0j, 0.0j]))

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(np.array([0.0j, 1.0 + 0.0j]))

    @property
    def population_excited(self) -> float:
        return float(abs(self.amplitudes[1]) ** 2)


@dataclass(frozen=True)
class Propagator:
    """A 2x2 unitary time propagator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("propagator must be a 2x2 matrix")
        drift = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if drift > 1e-10:
            raise ValueError(f"matrix is not unitary (drift {drift:.3e})")
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "Propagator") -> "Propagator":
        return Propagator(self.matrix @ other.matrix)

    def apply(self, state: QubitState) -> QubitState:
        return QubitState(self.matrix @ state.amplitudes)


def _su2_matrices(ax, ay, az, dt: float) -> np.ndarray:
    """exp(-i*(dt/2)*(ax*sx + ay*sy + az*sz)) for stacked angular rates (rad/s).

    ax, ay, az broadcast together; the result gains a trailing (2, 2).
    """
    ax = np.asarray(ax, dtype=float)
    ay = np.asarray(ay, dtype=float)
    az = np.asarray(az, dtype=float)
    omega = np.sqrt(ax * ax + ay * ay + az * az)
    theta = 0.5 * dt * omega
    cos_t = np.cos(theta)
    # k = sin(theta)/omega, finite (dt/2) at omega -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(omega > 0.0, np.sin(theta) / np.where(omega > 0, omega, 1.0),
                     0.5 * dt)
    u = np.empty(np.broadcast(ax, ay, az).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = cos_t - 1j * k * az
    u[..., 0, 1] = -1j * k * ax - k * ay
    u[..., 1, 0] = -1j * k * ax + k * ay
    u[..., 1, 1] = cos_t + 1j * k * az
    return u


def _step_matrices(delta: float, i_amps, q_amps, dt: float) -> np.ndarray:
    """Step propagators for whole amplitude arrays at one detuning."""
    i_amps = np.asarray(i_amps, dtype=float)
    q_amps = np.asarray(q_amps, dtype=float)
    return _su2_matrices(TWO_PI * i_amps, TWO_PI * q_amps,
                         np.full_like(i_amps, TWO_PI * delta), dt)


def _product(matrices: np.ndarray) -> np.ndarray:
    """Right-to-left ordered product over the leading axis (index 0 first)."""
    total = np.eye(2, dtype=complex)
    for m in matrices:
        total = m @ total
    return total


def step_propagator(delta: float, i_amp: float, q_amp: float, dt: float) -> Propagator:
    """Closed-form propagator of one constant step at a given detuning (Hz)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    u = _su2_matrices(TWO_PI * i_amp, TWO_PI * q_amp, TWO_PI * delta, dt)
    return Propagator(u)


def evolve(pulse: PulseProgram, delta: float) -> Propagator:
    """Total propagator of a pulse at detuning `delta`, step 1 applied first."""
    i_amps, q_amps = pulse.amplitudes()
    return Propagator(_product(_step_matrices(delta, i_amps, q_amps, pulse.dt)))


def state_error(u: Propagator, initial: QubitState) -> float:
    """Departure 1 - |<psi|U|psi>|^2 of a state evolved by `u`.

    Values are clamped to [0, 1] only when rounding pushes them within 1e-12
    of either end.
    """
    amp = initial.amplitudes
    overlap = np.vdot(amp, u.matrix @ amp)
    eps = 1.0 - float(abs(overlap) ** 2)
    if -_BOUNDARY_SLACK < eps < 0.0:
        return 0.0
    if 1.0 < eps < 1.0 + _BOUNDARY_SLACK:
        return 1.0
    return eps


def crosstalk_bound(rabi: float, delta: float) -> float:
    """Off-resonant flip-error ceiling (rabi/delta)^2; meaningful when < 1."""
    if delta == 0:
        raise ZeroDetuning("bound undefined at zero detuning")
    return (rabi / delta) ** 2


def rect_pi_pulse(rabi: float, m: int = 1) -> PulseProgram:
    """Resonant rectangular pi-pulse at `rabi` (Hz), split into m equal steps."""
    if rabi <= 0:
        raise ValueError("rabi must be positive")
    if m < 1:
        raise ValueError("m must be >= 1")
    dt = 1.0 / (2.0 * rabi * m)
    return PulseProgram(steps=tuple(PulseStep(rabi, 0.0) for _ in range(m)), dt=dt)
