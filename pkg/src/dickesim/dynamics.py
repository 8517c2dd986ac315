"""Non-Hermitian evolution of the symmetric ensemble under piecewise drives.

The effective Hamiltonian combines the coherent drives with imaginary decay
terms: the collective waveguide decay enters through S_eg S_ge and emission
into all other modes through the excited-state counter.  Segments are
piecewise constant, so evolution is a matrix exponential per segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .state_space import (
    Operator,
    StateVector,
    SymmetricBasis,
    collective_lower,
    drive_operators,
)

DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PhysicalParams:
    """Ensemble size and decay rates, in units of the waveguide rate."""

    n_atoms: int
    gamma_star: float
    gamma_1d: float = 1.0

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be positive")
        if self.gamma_star <= 0:
            raise ValueError("gamma_star must be positive")
        if self.gamma_1d <= 0:
            raise ValueError("gamma_1d must be positive")

    @property
    def purcell(self) -> float:
        return self.gamma_1d / self.gamma_star

    @classmethod
    def from_purcell(cls, n_atoms: int, p1d: float, gamma_1d: float = 1.0) -> "PhysicalParams":
        return cls(n_atoms=n_atoms, gamma_star=gamma_1d / p1d, gamma_1d=gamma_1d)


@dataclass(frozen=True)
class PulseSegment:
    """One piecewise-constant drive configuration.

    omega_r drives the register Raman leg, omega_anc the ancilla s<->e leg,
    omega_c the ancilla g<->s microwave; delta_e detunes every excited level.
    Durations are in units of 1/gamma_1d.
    """

    omega_r: complex = 0.0
    omega_anc: complex = 0.0
    omega_c: complex = 0.0
    delta_e: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        for name in ("omega_r", "omega_anc", "omega_c", "delta_e", "duration"):
            value = complex(getattr(self, name))
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots at segment boundaries together with the norm history."""

    times: tuple[float, ...]
    states: tuple[StateVector, ...]
    norms: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.norms:
            object.__setattr__(
                self, "norms", tuple(state.norm for state in self.states)
            )

    @property
    def norms_squared(self) -> tuple[float, ...]:
        return tuple(n**2 for n in self.norms)

    @property
    def final_state(self) -> StateVector:
        return self.states[-1]


@lru_cache(maxsize=256)
def build_h_eff(basis: SymmetricBasis, segment: PulseSegment, params: PhysicalParams) -> Operator:
    """Assemble the non-Hermitian effective Hamiltonian for one segment.

    H = delta_e (k-counter) + (omega_r/2) S_se_reg^dag + (omega_anc/2) sig_se^dag
        + (omega_c/2) sig_sg^dag + h.c. of the drives
        - i gamma_1d S_eg S_ge / 2 - i gamma_star S_ee / 2.
    """
    if basis.n_atoms != params.n_atoms:
        raise ValueError(
            f"basis built for N={basis.n_atoms} but params have N={params.n_atoms}"
        )
    ops = drive_operators(basis)
    s_ge = collective_lower(basis).matrix
    h = segment.delta_e * ops.s_ee_total.matrix.astype(complex)
    for omega, op in (
        (segment.omega_r, ops.s_se_register.matrix),
        (segment.omega_anc, ops.sigma_se_ancilla.matrix),
        (segment.omega_c, ops.sigma_sg_ancilla.matrix),
    ):
        h = h + 0.5 * omega * op.conj().T + 0.5 * np.conj(omega) * op
    h = h - 0.5j * params.gamma_1d * (s_ge.conj().T @ s_ge)
    h = h - 0.5j * params.gamma_star * ops.s_ee_total.matrix
    return Operator(basis, h)


@lru_cache(maxsize=256)
def _propagator(basis: SymmetricBasis, segment: PulseSegment, params: PhysicalParams) -> np.ndarray:
    h = build_h_eff(basis, segment, params)
    return expm(-1j * h.matrix * segment.duration)


def evolve(
    state: StateVector,
    operator: Operator,
    duration: float,
    tolerance: float = DEFAULT_TOLERANCE,
    check: bool = False,
) -> StateVector:
    """Propagate a state: exp(-i H t) |psi>.

    With check=True the result is compared against two half-duration steps
    and must agree to the requested relative tolerance.
    """
    if not np.isfinite(duration):
        raise ValueError("duration must be finite")
    if not np.all(np.isfinite(state.amplitudes)):
        raise ValueError("state has non-finite amplitudes")
    if duration == 0:
        return state
    u = expm(-1j * operator.matrix * duration)
    out = u @ state.amplitudes
    if check:
        u_half = expm(-1j * operator.matrix * (duration / 2))
        out_half = u_half @ (u_half @ state.amplitudes)
        scale = max(np.linalg.norm(out), 1e-300)
        err = np.linalg.norm(out - out_half) / scale
        if err > tolerance:
            raise RuntimeError(
                f"halved-step self-check failed: relative deviation {err:.3e} > {tolerance:.1e}"
            )
    if not np.all(np.isfinite(out)):
        raise ValueError("evolution produced non-finite amplitudes")
    return StateVector(state.basis, out)


def run_sequence(sequence, initial_state: StateVector, params: PhysicalParams) -> Trajectory:
    """Apply every segment in turn, recording snapshots and norms.

    The squared norm must be non-increasing along the trajectory (dissipative
    evolution); a violation beyond 1e-10 per step raises.
    """
    basis = initial_state.basis
    times = [0.0]
    states = [initial_state]
    amps = initial_state.amplitudes
    t = 0.0
    prev_sq = float(np.vdot(amps, amps).real)
    for segment in sequence.segments:
        u = _propagator(basis, segment, params)
        amps = u @ amps
        if not np.all(np.isfinite(amps)):
            raise ValueError("evolution produced non-finite amplitudes")
        t += segment.duration
        sq = float(np.vdot(amps, amps).real)
        if sq > prev_sq + 1e-10:
            raise RuntimeError(
                f"norm increased along trajectory: {prev_sq} -> {sq}"
            )
        prev_sq = sq
        times.append(t)
        states.append(StateVector(basis, amps))
    return Trajectory(times=tuple(times), states=tuple(states))


def fidelity(state: StateVector, target: StateVector, renormalize: bool = False) -> float:
    """|<target|state>|, optionally divided by the norm of the state.

    The plain value is the deterministic-protocol figure of merit; the
    renormalized variant conditions on no decay having occurred.
    """
    overlap = abs(np.vdot(target.amplitudes, state.amplitudes))
    if not renormalize:
        return float(overlap)
    norm = state.norm
    if norm == 0:
        raise ValueError("cannot renormalize a zero-norm state")
    return float(overlap / norm)


def hermitian_split(operator: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Decompose H_eff = H + iA with H, A Hermitian; A must be <= 0."""
    h = 0.5 * (operator.matrix + operator.matrix.conj().T)
    a = (operator.matrix - operator.matrix.conj().T) / 2j
    return h, a


def excitation_counter(basis: SymmetricBasis) -> Operator:
    """Counts register s- and e-excitations plus the ancilla occupation."""
    diag = np.array(
        [m + k + (1.0 if a in (1, 2) else 0.0) for (m, k, a) in basis.states]
    )
    return Operator(basis, np.diag(diag.astype(complex)))
