"""Simulated register measurements: Rabi, Ramsey, swept-frequency spectra,
and spatial crosstalk maps for a pi-pulse aimed at one spin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import QubitState, state_error, step_propagator
from .fields import FieldEnvironment, WireDrive, field_sample, rabi_frequency
from .spins import (
    DipoleOrientation,
    HyperfineManifold,
    SpinSite,
    hyperfine_detunings,
)


@dataclass(frozen=True)
class CrosstalkEntry:
    site_id: str
    detuning: float    # Hz, relative to the pulse carrier
    epsilon: float     # simulated flip error on |0>
    bound: float       # analytic ceiling (rabi/detuning)^2, inf on resonance


@dataclass(frozen=True)
class CrosstalkReport:
    """Per-position flip errors for one pi-pulse, with the analytic bound."""

    entries: tuple

    def __post_init__(self):
        for e in self.entries:
            if not 0.0 <= e.epsilon <= 1.0:
                raise ValueError(f"epsilon out of [0, 1] at {e.site_id}")
        object.__setattr__(self, "entries", tuple(self.entries))


def _flip_population(rabi: float, delta: float, duration: float) -> float:
    """|<1|U|0>|^2 after a constant drive of the given length."""
    if duration == 0.0:
        return 0.0
    u = step_propagator(delta, rabi, 0.0, duration)
    return float(abs(u.matrix[1, 0]) ** 2)


def simulate_rabi(rabi: float, delta: float, durations) -> np.ndarray:
    """Excited-state population vs. pulse length for a constant drive."""
    return np.array([_flip_population(rabi, delta, float(t)) for t in durations])


def simulate_ramsey(
    delta: float, manifold: HyperfineManifold, t2_star: float, taus
) -> np.ndarray:
    """Free-precession fringe signal averaged over the nuclear manifold.

    S(tau) = mean_m cos(2*pi*delta_m*tau) * exp(-tau/t2_star).
    """
    if t2_star <= 0:
        raise ValueError("t2_star must be positive")
    taus = np.asarray(list(taus), dtype=float)
    detunings = hyperfine_detunings(delta, manifold)
    phases = 2.0 * math.pi * np.outer(taus, detunings)
    return np.mean(np.cos(phases), axis=1) * np.exp(-taus / t2_star)


def _lorentzian_smooth(scan: np.ndarray, values: np.ndarray, fwhm: float) -> np.ndarray:
    """Normalized Lorentzian convolution over a (possibly uneven) scan grid."""
    half = fwhm / 2.0
    diffs = scan[:, None] - scan[None, :]
    kernel = half * half / (diffs * diffs + half * half)
    return kernel @ values / kernel.sum(axis=1)


def simulate_odmr(
    env: FieldEnvironment,
    drive: WireDrive,
    sites,
    probe_rabi: float,
    scan,
    linewidth_floor: float = 2e5,
) -> np.ndarray:
    """Swept-frequency spectrum: mean pi-pulse flip population of the register.

    For each scanned carrier frequency the contrast averages the flip
    population over sites, both (upper/lower) transitions, and the three
    nuclear states.  A nonzero linewidth_floor (Hz) convolves the result with
    a Lorentzian of that full width.
    """
    scan = np.asarray(list(scan), dtype=float)
    if scan.size == 0:
        raise ValueError("scan must be non-empty")
    manifold = HyperfineManifold.triplet(env.constants.hyperfine_splitting)
    duration = 1.0 / (2.0 * probe_rabi)

    lines = []
    for site in sites:
        sample = field_sample(env, drive, site)
        omega_minus = 2.0 * env.constants.d_zfs - sample.omega_plus
        for omega in (sample.omega_plus, omega_minus):
            lines.extend(hyperfine_detunings(omega, manifold))
    lines = np.asarray(lines)

    contrast = np.empty_like(scan)
    for k, omega_mw in enumerate(scan):
        contrast[k] = np.mean(
            [_flip_population(probe_rabi, line - omega_mw, duration) for line in lines]
        )
    if linewidth_floor > 0:
        contrast = _lorentzian_smooth(scan, contrast, linewidth_floor)
    return contrast


def crosstalk_landscape(
    env: FieldEnvironment,
    drive_dc: float,
    target_u: float,
    rabi_target: float,
    grid,
    orientation: DipoleOrientation | None = None,
) -> CrosstalkReport:
    """Flip error across the chip for a rectangular pi-pulse on one target spin.

    The pulse carrier sits on the transition of a spin at (target_u, 0, 0) and
    the AC current is chosen so that spin is driven at `rabi_target`.  Every
    grid position then sees its own detuning and its own (position-scaled)
    drive amplitude.
    """
    if rabi_target <= 0:
        raise ValueError("rabi_target must be positive")
    orientation = orientation or DipoleOrientation()

    target = SpinSite(id="target", position=np.array([target_u, 0.0, 0.0]),
                      orientation=orientation)
    probe = WireDrive(i_dc=drive_dc, i_ac=1.0)
    target_sample = field_sample(env, probe, target)
    rabi_per_amp = rabi_frequency(env.constants, target_sample.b_ac_xy)
    if rabi_per_amp <= 0:
        raise ValueError("target spin sees no transverse drive field")
    i_ac = rabi_target / rabi_per_amp
    omega_mw = target_sample.omega_plus
    duration = 1.0 / (2.0 * rabi_target)

    drive = WireDrive(i_dc=drive_dc, i_ac=i_ac)
    ground = QubitState.ground()
    entries = []
    for k, position in enumerate(grid):
        site = SpinSite(id=f"g{k:04d}", position=np.asarray(position, dtype=float),
                        orientation=orientation)
        sample = field_sample(env, drive, site)
        local_rabi = rabi_frequency(env.constants, sample.b_ac_xy)
        delta = sample.omega_plus - omega_mw
        u = step_propagator(delta, local_rabi, 0.0, duration)
        eps = state_error(u, ground)
        bound = math.inf if delta == 0.0 else (local_rabi / delta) ** 2
        entries.append(CrosstalkEntry(site_id=site.id, detuning=delta,
                                      epsilon=eps, bound=bound))
    return CrosstalkReport(entries=tuple(entries))
