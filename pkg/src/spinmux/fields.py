"""Magnetic fields of the on-chip drive wire and per-site frequency addresses.

The wire is modeled as one or more straight, infinitely long filaments; each
contributes the textbook azimuthal field mu0*I/(2*pi*d).  A strip of finite
width spreads the current over parallel filaments in the chip plane.  This
analytic model replaces a mesh-based solver; one depth parameter is
calibrated against a measured Zeeman shift instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DegeneratePoint, NoSolution
from .spins import (
    DipoleOrientation,
    PhysicalConstants,
    SpinSite,
    dipole_axis,
    project_field,
    transition_frequencies,
)

MU0 = 4e-7 * math.pi  # T*m/A

# Field evaluation closer than this to a filament centerline is rejected.
MIN_FILAMENT_DISTANCE = 1e-9  # m

W_HAT = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class WireGeometry:
    """A straight drive wire: centerline point, direction, and current spread."""

    anchor: np.ndarray                 # m, point on the centerline
    direction: np.ndarray              # unit vector
    num_filaments: int = 1
    width: float = 0.0                 # m, lateral extent in the chip plane

    def __post_init__(self):
        anchor = np.asarray(self.anchor, dtype=float)
        direction = np.asarray(self.direction, dtype=float)
        if anchor.shape != (3,) or direction.shape != (3,):
            raise ValueError("anchor and direction must be 3-vectors")
        norm = np.linalg.norm(direction)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("direction must be unit-norm")
        if self.num_filaments < 1:
            raise ValueError("num_filaments must be >= 1")
        if self.width < 0:
            raise ValueError("width must be >= 0")
        if self.width == 0.0 and self.num_filaments != 1:
            raise ValueError("a zero-width wire must have exactly one filament")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "direction", direction)

    def filament_anchors(self) -> np.ndarray:
        """Centerline points of the individual filaments, shape (n, 3)."""
        if self.num_filaments == 1:
            return self.anchor[None, :]
        # spread across the width, perpendicular to the wire in the chip plane;
        # filaments sit at the centers of equal-width sub-strips
        perp = np.cross(W_HAT, self.direction)
        norm = np.linalg.norm(perp)
        if norm < 1e-12:
            raise ValueError("cannot spread filaments for an out-of-plane wire")
        perp = perp / norm
        n = self.num_filaments
        offsets = (np.arange(n) + 0.5) / n * self.width - self.width / 2.0
        return self.anchor[None, :] + offsets[:, None] * perp[None, :]

    def with_depth(self, depth: float) -> "WireGeometry":
        """Same wire with the centerline moved to w = -depth."""
        anchor = self.anchor.copy()
        anchor[2] = -depth
        return WireGeometry(anchor, self.direction, self.num_filaments, self.width)


@dataclass(frozen=True)
class FieldEnvironment:
    """Uniform external bias field plus the drive-wire geometry."""

    b_ext: np.ndarray                  # T, chip frame
    wire: WireGeometry
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        b_ext = np.asarray(self.b_ext, dtype=float)
        if b_ext.shape != (3,):
            raise ValueError("b_ext must be a 3-vector")
        if not np.all(np.isfinite(b_ext)):
            raise ValueError("b_ext must be finite")
        object.__setattr__(self, "b_ext", b_ext)


@dataclass(frozen=True)
class WireDrive:
    """Currents on the wire: DC bias plus the AC envelope amplitude."""

    i_dc: float                        # A, signed
    i_ac: float                        # A, peak envelope value, >= 0
    carrier: "DriveCarrier | None" = None

    def __post_init__(self):
        if self.i_ac < 0:
            raise ValueError("i_ac must be >= 0")


@dataclass(frozen=True)
class FieldSample:
    """Field components seen by one site, resolved along its dipole axis."""

    b_dc_z: float      # T, wire DC field along the axis (signed)
    b_ext_z: float     # T, external field along the axis (signed)
    b_ac_xy: float     # T, AC field perpendicular to the axis (>= 0)
    omega_plus: float  # Hz, upper transition frequency


@dataclass(frozen=True)
class AddressMapEntry:
    site_id: str
    position_u: float          # m
    omega_plus: float          # Hz
    rabi_at_unit_current: float  # Hz per ampere of AC current


@dataclass(frozen=True)
class AddressMap:
    """Per-site frequency addresses, ordered by site id."""

    entries: tuple

    def __post_init__(self):
        ids = [e.site_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate site ids in address map")
        object.__setattr__(self, "entries", tuple(self.entries))


def wire_field(wire: WireGeometry, current: float, point: np.ndarray) -> np.ndarray:
    """Static field (T) of the wire carrying `current` (A) at `point` (m)."""
    point = np.asarray(point, dtype=float)
    total = np.zeros(3)
    # the degeneracy check below runs even at zero current, keeping the
    # precondition independent of the drive
    i_fil = current / wire.num_filaments
    d_hat = wire.direction
    for anchor in wire.filament_anchors():
        r = point - anchor
        r_perp = r - np.dot(r, d_hat) * d_hat
        dist = np.linalg.norm(r_perp)
        if dist <= MIN_FILAMENT_DISTANCE:
            raise DegeneratePoint(
                f"point {point.tolist()} lies within {MIN_FILAMENT_DISTANCE} m "
                "of a filament centerline"
            )
        # azimuthal field, right-hand rule around the current direction
        total += (MU0 * i_fil / (2.0 * math.pi * dist * dist)) * np.cross(d_hat, r_perp)
    return total


def rabi_frequency(constants: PhysicalConstants, b_ac_xy: float) -> float:
    """Cyclic Rabi frequency (Hz) driven by a transverse AC field (T)."""
    if b_ac_xy < 0:
        raise ValueError("b_ac_xy must be >= 0")
    return constants.gamma_nv * b_ac_xy / math.sqrt(2.0)


def field_sample(env: FieldEnvironment, drive: WireDrive, site: SpinSite) -> FieldSample:
    """Resolve DC and AC wire fields plus the bias field at one site."""
    axis = dipole_axis(site.orientation)
    b_dc = wire_field(env.wire, drive.i_dc, site.position)
    b_ac = wire_field(env.wire, drive.i_ac, site.position)
    b_dc_z, _ = project_field(b_dc, axis)
    _, b_ac_xy = project_field(b_ac, axis)
    b_ext_z, _ = project_field(env.b_ext, axis)
    omega_plus, _ = transition_frequencies(env.constants, b_ext_z + b_dc_z)
    return FieldSample(b_dc_z=b_dc_z, b_ext_z=b_ext_z, b_ac_xy=b_ac_xy,
                       omega_plus=omega_plus)


def address_map(env: FieldEnvironment, drive: WireDrive, sites) -> AddressMap:
    """Frequency address of every site at the given DC current.

    The Rabi column is reported per ampere of AC current so callers can scale
    to any drive amplitude.
    """
    if not sites:
        raise ValueError("sites must be non-empty")
    entries = []
    unit_drive = WireDrive(i_dc=drive.i_dc, i_ac=1.0, carrier=drive.carrier)
    for site in sorted(sites, key=lambda s: s.id):
        sample = field_sample(env, unit_drive, site)
        entries.append(
            AddressMapEntry(
                site_id=site.id,
                position_u=float(site.position[0]),
                omega_plus=sample.omega_plus,
                rabi_at_unit_current=rabi_frequency(env.constants, sample.b_ac_xy),
            )
        )
    return AddressMap(entries=tuple(entries))


def zeeman_shift(
    env: FieldEnvironment,
    i_dc: float,
    position: np.ndarray,
    orientation: DipoleOrientation | None = None,
) -> float:
    """Wire-induced shift (Hz) of the upper transition at a chip position."""
    orientation = orientation or DipoleOrientation()
    axis = dipole_axis(orientation)
    b_dc_z, _ = project_field(wire_field(env.wire, i_dc, position), axis)
    return env.constants.gamma_nv * b_dc_z


# Depth search domain for wire calibration (m).
CALIBRATION_DEPTH_RANGE = (1e-7, 1e-4)


def calibrate_wire(
    env: FieldEnvironment,
    target_shift: float,
    at_u: float,
    i_dc: float,
    orientation: DipoleOrientation | None = None,
) -> WireGeometry:
    """Find the wire standoff depth that reproduces a measured Zeeman shift.

    Scans depths in CALIBRATION_DEPTH_RANGE for a bracket, then bisects until
    the shift at (at_u, 0, 0) matches `target_shift` within 1 kHz.  Raises
    NoSolution when no depth reaches the target.
    """
    if target_shift <= 0:
        raise NoSolution("target shift must be positive and reachable")
    orientation = orientation or DipoleOrientation()
    point = np.array([at_u, 0.0, 0.0])

    def residual(depth: float) -> float:
        trial = FieldEnvironment(env.b_ext, env.wire.with_depth(depth), env.constants)
        return zeeman_shift(trial, i_dc, point, orientation) - target_shift

    lo, hi = CALIBRATION_DEPTH_RANGE
    grid = np.geomspace(lo, hi, 64)
    values = [residual(d) for d in grid]
    bracket = None
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fa == 0.0:
            bracket = (a, a)
            break
        if fa * fb < 0:
            bracket = (a, b)
            break
    if bracket is None:
        if values[-1] == 0.0:
            bracket = (grid[-1], grid[-1])
        else:
            raise NoSolution(
                f"shift {target_shift:.6g} Hz unreachable for depths in "
                f"[{lo:g}, {hi:g}] m"
            )
    if bracket[0] == bracket[1]:
        depth = bracket[0]
    else:
        depth = brentq(residual, bracket[0], bracket[1], xtol=1e-14, rtol=8.9e-16)
    if abs(residual(depth)) > 1e3:
        raise NoSolution("bisection converged but missed the 1 kHz tolerance")
    return env.wire.with_depth(depth)


def resolvability(addr: AddressMap, rabi: float, factor: float = 20.0):
    """Flag site pairs whose address spacing supports plain frequency addressing.

    A pair resolves when |address difference| >= factor * rabi.
    """
    if factor <= 0:
        raise ValueError("factor must be > 0")
    out = []
    entries = addr.entries
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            split = abs(entries[i].omega_plus - entries[j].omega_plus)
            out.append(
                ((entries[i].site_id, entries[j].site_id), split >= factor * rabi)
            )
    return out
