"""Pulse waveform files: CSV with header "t_ns,i_mhz,q_mhz".

The time column holds the elapsed time at the end of each step, so the last
row equals the pulse duration and the first row equals the step length.
Amplitudes are stored in MHz with 17 significant digits, which makes
write/read round trips lossless for float64.
"""

from __future__ import annotations

import numpy as np

from .dynamics import PulseProgram
from .errors import ParseError

PULSE_HEADER = "t_ns,i_mhz,q_mhz"

# Allowed relative wobble of the time grid around perfect uniformity.
_SPACING_TOL = 1e-6


def write_pulse(path, pulse: PulseProgram) -> None:
    """Write a pulse as CSV; one row per step."""
    i_amps, q_amps = pulse.amplitudes()
    with open(path, "w", newline="") as fh:
        fh.write(PULSE_HEADER + "\n")
        for k, (i, q) in enumerate(zip(i_amps, q_amps), start=1):
            t_ns = k * pulse.dt * 1e9
            fh.write(f"{t_ns:.17g},{i * 1e-6:.17g},{q * 1e-6:.17g}\n")


def read_pulse(path) -> PulseProgram:
    """Parse a pulse CSV, checking the header and the uniform time grid."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0].strip() != PULSE_HEADER:
        raise ParseError(f'expected header "{PULSE_HEADER}"', line=1)
    times, i_mhz, q_mhz = [], [], []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError("expected three comma-separated values", line=number)
        try:
            t, i, q = (float(p) for p in parts)
        except ValueError:
            raise ParseError("non-numeric value", line=number) from None
        times.append(t)
        i_mhz.append(i)
        q_mhz.append(q)
    if not times:
        raise ParseError("no data rows", line=2)

    times = np.asarray(times)
    if np.any(np.diff(times) <= 0):
        bad = int(np.argmax(np.diff(times) <= 0)) + 3
        raise ParseError("times must be strictly increasing", line=bad)
    dt_ns = times[-1] / len(times)
    expected = dt_ns * np.arange(1, len(times) + 1)
    if np.max(np.abs(times - expected)) > _SPACING_TOL * times[-1]:
        raise ParseError("time grid is not uniformly spaced", line=2)

    return PulseProgram.from_arrays(
        np.asarray(i_mhz) * 1e6, np.asarray(q_mhz) * 1e6, dt_ns * 1e-9
    )
