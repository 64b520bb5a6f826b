"""Gradient-based synthesis of selective control pulses.

The objective for a target spin i and spectators j is

    f(I, Q) = (1 - eps_i) + sum_j eps_j + R

where eps_i is the (nuclear-manifold averaged) probability of reaching the
target goal state, eps_j the averaged departure of each spectator from its
initial state, and R a total-variation penalty that keeps the waveform
generator-friendly.  The epsilon terms carry exact analytic gradients through
the closed-form step exponentials; R contributes a sign subgradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import TWO_PI, PulseProgram, QubitState, rect_pi_pulse, _su2_matrices
from .errors import Diverged
from .spins import HyperfineManifold

# Line-search constants: Armijo sufficient decrease with halving backtracks.
ARMIJO_C = 1e-4
BACKTRACK_FACTOR = 0.5
MAX_BACKTRACKS = 50
STEP_GROWTH = 2.0

# Requested decreases below this resolution mean the descent has hit the
# floating-point floor; treat that as a stationary stop, not divergence.
_DECREASE_FLOOR = 1e-15


@dataclass(frozen=True)
class ControlScenario:
    """A selective-control task: flip the target, freeze the spectators."""

    idle_detunings: tuple                      # Hz, one per spectator
    target_detuning: float = 0.0               # Hz, normally 0 (carrier on target)
    manifold: HyperfineManifold = field(default_factory=HyperfineManifold.triplet)
    target_initial: QubitState = field(default_factory=QubitState.ground)
    target_goal: QubitState = field(default_factory=QubitState.excited)
    idle_initials: tuple | None = None         # default: all ground

    def __post_init__(self):
        idles = tuple(float(d) for d in self.idle_detunings)
        for d in idles:
            if d == self.target_detuning:
                raise ValueError("idle detunings must differ from the target's")
        object.__setattr__(self, "idle_detunings", idles)
        if self.idle_initials is None:
            object.__setattr__(
                self, "idle_initials", tuple(QubitState.ground() for _ in idles)
            )
        elif len(self.idle_initials) != len(idles):
            raise ValueError("need one initial state per spectator")

    @property
    def num_spectators(self) -> int:
        return len(self.idle_detunings)


@dataclass(frozen=True)
class OptimizerConfig:
    """Descent settings; dt defaults to 0.05/max_amp (small per-step angles)."""

    m: int = 200
    dt: float | None = None
    lam: float = 1e-7        # total-variation weight, 1/Hz
    max_iters: int = 2000
    tol: float = 1e-3        # stop when (1 - eps_i) + sum eps_j <= tol
    seed: int = 0
    restarts: int = 1
    max_amp: float = 1e7     # Hz, hardware amplitude clamp

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.lam < 0 or self.lam >= 1e-6:
            raise ValueError("lam must satisfy 0 <= lam < 1e-6 per Hz")
        if self.max_amp <= 0:
            raise ValueError("max_amp must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.max_iters < 0 or self.restarts < 1:
            raise ValueError("max_iters must be >= 0 and restarts >= 1")

    @property
    def step_duration(self) -> float:
        return self.dt if self.dt is not None else 0.05 / self.max_amp

    @property
    def total_duration(self) -> float:
        return self.m * self.step_duration


@dataclass(frozen=True)
class CostBreakdown:
    """Objective decomposition; f == (1 - eps_i) + sum(eps_j) + reg."""

    eps_i: float       # averaged target transfer probability
    eps_j: tuple       # averaged spectator errors
    reg: float
    f: float

    def __post_init__(self):
        object.__setattr__(self, "eps_j", tuple(self.eps_j))
        expected = (1.0 - self.eps_i) + sum(self.eps_j) + self.reg
        if abs(self.f - expected) > 1e-12:
            raise ValueError("inconsistent cost assembly")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    f: float
    eps_i: float
    eps_j: tuple
    reg: float
    step_size: float


@dataclass(frozen=True)
class OptimizationTrace:
    """Accepted-iteration history of the descent that produced `pulse`."""

    rows: tuple
    pulse: PulseProgram
    converged: bool
    restart: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


class _Ensemble:
    """Flattened per-member detunings and state vectors for one scenario.

    Spin 0 is the target (bra = goal state); spectators follow (bra = their
    initial state, so 1 - |z|^2 is their departure).  When the manifold
    splitting is zero the three coincident members collapse to one, which
    keeps cost identical to the single-member computation bit for bit.
    """

    def __init__(self, scenario: ControlScenario):
        offsets = np.asarray(scenario.manifold.detuning_offsets)
        if offsets[2] == 0.0:
            offsets = offsets[:1]
        deltas, bras, kets, owner = [], [], [], []
        spins = [(scenario.target_detuning, scenario.target_goal,
                  scenario.target_initial)]
        spins += [(d, s, s)
                  for d, s in zip(scenario.idle_detunings, scenario.idle_initials)]
        for s_index, (delta, bra_state, ket_state) in enumerate(spins):
            for off in offsets:
                deltas.append(delta + off)
                bras.append(bra_state.amplitudes)
                kets.append(ket_state.amplitudes)
                owner.append(s_index)
        self.deltas = np.array(deltas)
        self.bras = np.array(bras)
        self.kets = np.array(kets)
        self.owner = np.array(owner)
        self.num_spins = len(spins)
        self.weight = 1.0 / len(offsets)

    def transfer_means(self, i_amps, q_amps, dt) -> np.ndarray:
        """Mean |<bra|U|ket>|^2 per spin (target first)."""
        u = _member_step_matrices(self.deltas, i_amps, q_amps, dt)
        total = np.broadcast_to(np.eye(2, dtype=complex), (len(self.deltas), 2, 2))
        for l in range(u.shape[1]):
            total = u[:, l] @ total
        z = np.einsum("nk,nkj,nj->n", self.bras.conj(), total, self.kets)
        return self._per_spin(np.abs(z) ** 2)

    def _per_spin(self, member_values: np.ndarray) -> np.ndarray:
        sums = np.zeros(self.num_spins)
        np.add.at(sums, self.owner, member_values)
        return sums * self.weight


def _member_step_matrices(deltas, i_amps, q_amps, dt) -> np.ndarray:
    """Stacked step propagators, shape (members, steps, 2, 2)."""
    ax = TWO_PI * np.asarray(i_amps)[None, :]
    ay = TWO_PI * np.asarray(q_amps)[None, :]
    az = TWO_PI * np.asarray(deltas)[:, None]
    n, m = az.shape[0], ax.shape[1]
    return _su2_matrices(np.broadcast_to(ax, (n, m)), np.broadcast_to(ay, (n, m)),
                         np.broadcast_to(az, (n, m)), dt)


def _step_matrix_derivatives(deltas, i_amps, q_amps, dt):
    """Step propagators plus their exact dU/dI and dU/dQ, all (n, m, 2, 2).

    U = cos(theta) - i*k*(a . sigma) with a the angular rate vector,
    k = sin(theta)/|a|; derivatives follow from d(cos)/da and d(k*a)/da with
    series fallbacks where |a| -> 0.
    """
    ax = TWO_PI * np.asarray(i_amps)[None, :]
    ay = TWO_PI * np.asarray(q_amps)[None, :]
    az = TWO_PI * np.asarray(deltas)[:, None]
    n, m = az.shape[0], ax.shape[1]
    ax = np.broadcast_to(ax, (n, m)).copy()
    ay = np.broadcast_to(ay, (n, m)).copy()
    az = np.broadcast_to(az, (n, m)).copy()

    half_dt = 0.5 * dt
    omega2 = ax * ax + ay * ay + az * az
    omega = np.sqrt(omega2)
    theta = half_dt * omega
    cos_t = np.cos(theta)
    small = theta < 1e-3
    safe_omega = np.where(omega > 0.0, omega, 1.0)
    k = np.where(small, half_dt * (1.0 - theta * theta / 6.0),
                 np.sin(theta) / safe_omega)
    # q = ((dt/2)cos - k)/omega^2; series -(dt/2)^3 * (1/3 - theta^2/30)
    q = np.where(small, -(half_dt ** 3) * (1.0 / 3.0 - theta * theta / 30.0),
                 (half_dt * cos_t - k) / np.where(omega2 > 0.0, omega2, 1.0))

    u = np.empty((n, m, 2, 2), dtype=complex)
    u[..., 0, 0] = cos_t - 1j * k * az
    u[..., 0, 1] = -1j * k * ax - k * ay
    u[..., 1, 0] = -1j * k * ax + k * ay
    u[..., 1, 1] = cos_t + 1j * k * az

    def assemble(dcos, dsx, dsy, dsz):
        d = np.empty_like(u)
        d[..., 0, 0] = dcos - 1j * dsz
        d[..., 0, 1] = -1j * dsx - dsy
        d[..., 1, 0] = -1j * dsx + dsy
        d[..., 1, 1] = dcos + 1j * dsz
        return d

    # d/da_x: dcos = -(dt/2) k a_x ; ds = q a_x a + k e_x (then chain 2*pi for I)
    du_di = TWO_PI * assemble(-half_dt * k * ax, q * ax * ax + k, q * ax * ay,
                              q * ax * az)
    du_dq = TWO_PI * assemble(-half_dt * k * ay, q * ay * ax, q * ay * ay + k,
                              q * ay * az)
    return u, du_di, du_dq


def regularization(pulse: PulseProgram, lam: float) -> float:
    """Total-variation penalty lam * sum(|dI| + |dQ|) over adjacent steps."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    return lam * pulse.total_variation()


def _regularization_gradient(i_amps, q_amps, lam: float):
    """Sign subgradient of the total-variation term (zero at ties)."""

    def sub(a):
        s = np.sign(np.diff(a))
        g = np.zeros_like(a)
        g[:-1] += s        # d|a_l - a_{l+1}|/da_l = sign(a_l - a_{l+1}) = -s
        g[1:] -= s
        return -lam * g

    return sub(np.asarray(i_amps, dtype=float)), sub(np.asarray(q_amps, dtype=float))


def _breakdown(transfer: np.ndarray, reg: float) -> CostBreakdown:
    eps_i = float(transfer[0])
    eps_j = tuple(1.0 - float(v) for v in transfer[1:])
    f = (1.0 - eps_i) + sum(eps_j) + reg
    return CostBreakdown(eps_i=eps_i, eps_j=eps_j, reg=reg, f=f)


def cost(pulse: PulseProgram, scenario: ControlScenario, lam: float) -> CostBreakdown:
    """Evaluate the full objective, manifold-averaged per spin."""
    ens = _Ensemble(scenario)
    i_amps, q_amps = pulse.amplitudes()
    transfer = ens.transfer_means(i_amps, q_amps, pulse.dt)
    return _breakdown(transfer, regularization(pulse, lam))


def gradient(pulse: PulseProgram, scenario: ControlScenario, lam: float):
    """Exact df/dI_l and df/dQ_l (1/Hz), including the R subgradient."""
    ens = _Ensemble(scenario)
    i_amps, q_amps = pulse.amplitudes()
    g_i, g_q, _ = _cost_gradient_arrays(ens, i_amps, q_amps, pulse.dt)
    r_i, r_q = _regularization_gradient(i_amps, q_amps, lam)
    return g_i + r_i, g_q + r_q


def _cost_gradient_arrays(ens: _Ensemble, i_amps, q_amps, dt):
    """Gradient of the epsilon part of f, plus the per-spin transfer means."""
    n = len(ens.deltas)
    m = len(i_amps)
    u, du_di, du_dq = _step_matrix_derivatives(ens.deltas, i_amps, q_amps, dt)

    fwd = np.empty((n, m + 1, 2, 2), dtype=complex)
    fwd[:, 0] = np.eye(2)
    for l in range(m):
        fwd[:, l + 1] = u[:, l] @ fwd[:, l]
    suf = np.empty_like(fwd)
    suf[:, m] = np.eye(2)
    for l in range(m - 1, -1, -1):
        suf[:, l] = suf[:, l + 1] @ u[:, l]

    z = np.einsum("nk,nkj,nj->n", ens.bras.conj(), fwd[:, m], ens.kets)
    rows = np.einsum("nk,nlkj->nlj", ens.bras.conj(), suf[:, 1:])
    cols = np.einsum("nljk,nk->nlj", fwd[:, :m], ens.kets)
    dz_di = np.einsum("nlj,nljk,nlk->nl", rows, du_di, cols)
    dz_dq = np.einsum("nlj,nljk,nlk->nl", rows, du_dq, cols)

    # every spin contributes a (1 - |z|^2) term to f, so the gradient per
    # member is -2 Re(conj(z) dz), manifold-weighted
    coeff = -2.0 * ens.weight
    g_i = coeff * np.real(z.conj()[:, None] * dz_di).sum(axis=0)
    g_q = coeff * np.real(z.conj()[:, None] * dz_dq).sum(axis=0)
    transfer = ens._per_spin(np.abs(z) ** 2)
    return g_i, g_q, transfer


def _initial_amplitudes(config: OptimizerConfig, restart: int):
    """Rectangular pi-area pulse (mean feasible amplitude) with +-10% noise."""
    rng = np.random.default_rng([config.seed, restart])
    base = min(1.0 / (2.0 * config.total_duration), config.max_amp)
    i_amps = base * (1.0 + 0.1 * rng.uniform(-1.0, 1.0, config.m))
    q_amps = base * 0.1 * rng.uniform(-1.0, 1.0, config.m)
    clip = config.max_amp
    return np.clip(i_amps, -clip, clip), np.clip(q_amps, -clip, clip)


def _descend(ens: _Ensemble, config: OptimizerConfig, restart: int):
    """One restart of projected-gradient descent with Armijo backtracking."""
    dt = config.step_duration
    lam = config.lam
    clip = config.max_amp
    i_amps, q_amps = _initial_amplitudes(config, restart)

    def tv(i_a, q_a):
        return float(np.sum(np.abs(np.diff(i_a))) + np.sum(np.abs(np.diff(q_a))))

    transfer = ens.transfer_means(i_amps, q_amps, dt)
    bd = _breakdown(transfer, lam * tv(i_amps, q_amps))
    rows = [TraceRow(0, bd.f, bd.eps_i, bd.eps_j, bd.reg, 0.0)]
    alpha = None
    converged = bd.f - bd.reg <= config.tol
    diverged = False

    for it in range(1, config.max_iters + 1):
        if converged:
            break
        g_i, g_q, _ = _cost_gradient_arrays(ens, i_amps, q_amps, dt)
        r_i, r_q = _regularization_gradient(i_amps, q_amps, lam)
        g_i = g_i + r_i
        g_q = g_q + r_q
        gnorm2 = float(np.dot(g_i, g_i) + np.dot(g_q, g_q))
        if gnorm2 == 0.0:
            break
        if alpha is None:
            gmax = max(np.max(np.abs(g_i)), np.max(np.abs(g_q)))
            alpha = 0.1 * config.max_amp / gmax
        trial = alpha
        accepted = False
        floor_hit = False
        for _ in range(MAX_BACKTRACKS):
            cand_i = np.clip(i_amps - trial * g_i, -clip, clip)
            cand_q = np.clip(q_amps - trial * g_q, -clip, clip)
            # projected Armijo: decrease measured against the realized move
            move = float(np.dot(g_i, i_amps - cand_i) + np.dot(g_q, q_amps - cand_q))
            if ARMIJO_C * move < _DECREASE_FLOOR * max(1.0, abs(bd.f)):
                floor_hit = True
                break
            cand_transfer = ens.transfer_means(cand_i, cand_q, dt)
            cand_bd = _breakdown(cand_transfer, lam * tv(cand_i, cand_q))
            if cand_bd.f <= bd.f - ARMIJO_C * move:
                i_amps, q_amps, bd = cand_i, cand_q, cand_bd
                rows.append(TraceRow(it, bd.f, bd.eps_i, bd.eps_j, bd.reg, trial))
                alpha = trial * STEP_GROWTH
                accepted = True
                break
            trial *= BACKTRACK_FACTOR
        if not accepted:
            if floor_hit:
                break  # decrease below float resolution: stationary
            diverged = True
            break
        converged = bd.f - bd.reg <= config.tol

    pulse = PulseProgram.from_arrays(i_amps, q_amps, dt)
    trace = OptimizationTrace(rows=tuple(rows), pulse=pulse,
                              converged=converged, restart=restart)
    return pulse, trace, bd, diverged


def optimize(scenario: ControlScenario, config: OptimizerConfig):
    """Synthesize a pulse for the scenario; returns (pulse, trace).

    Runs up to `config.restarts` independently seeded descents, stopping early
    once one reaches the tolerance; the best final objective wins.  Raises
    Diverged (carrying the best artifacts so far) only if every restart stalls
    in its line search.
    """
    ens = _Ensemble(scenario)
    best = None
    any_ok = False
    for restart in range(config.restarts):
        pulse, trace, bd, diverged = _descend(ens, config, restart)
        if best is None or bd.f < best[2].f:
            best = (pulse, trace, bd)
        any_ok = any_ok or not diverged
        if trace.converged:
            break
    if not any_ok:
        raise Diverged("no descent step accepted in any restart",
                       pulse=best[0], trace=best[1])
    return best[0], best[1]


def compare_rectangular(
    scenario: ControlScenario,
    rabi_fast: float,
    rabi_slow: float,
    optimized: PulseProgram | None = None,
):
    """Crosstalk table for fast/slow rectangular pi-pulses and, optionally,
    an optimized pulse: rows of (label, eps_i, eps_j tuple)."""
    rows = []
    for label, pulse in (("rect_fast", rect_pi_pulse(rabi_fast)),
                         ("rect_slow", rect_pi_pulse(rabi_slow))):
        bd = cost(pulse, scenario, lam=0.0)
        rows.append((label, bd.eps_i, bd.eps_j))
    if optimized is not None:
        bd = cost(optimized, scenario, lam=0.0)
        rows.append(("optimized", bd.eps_i, bd.eps_j))
    return rows


@dataclass(frozen=True)
class SweepPoint:
    delta_offset: float   # Hz added to every spectator detuning
    amp_scale: float      # multiplier on all amplitudes
    eps_i: float
    eps_j: tuple


def sensitivity_sweep(
    pulse: PulseProgram,
    scenario: ControlScenario,
    delta_offsets,
    amp_scales,
):
    """Re-evaluate the scenario over a grid of detuning offsets and amplitude
    scales; the Cartesian grid is returned row-major in the given order."""
    i_amps, q_amps = pulse.amplitudes()
    out = []
    for offset in delta_offsets:
        shifted = replace(
            scenario,
            idle_detunings=tuple(d + offset for d in scenario.idle_detunings),
            idle_initials=scenario.idle_initials,
        )
        ens = _Ensemble(shifted)
        for scale in amp_scales:
            transfer = ens.transfer_means(i_amps * scale, q_amps * scale, pulse.dt)
            bd = _breakdown(transfer, 0.0)
            out.append(SweepPoint(delta_offset=float(offset), amp_scale=float(scale),
                                  eps_i=bd.eps_i, eps_j=bd.eps_j))
    return out
