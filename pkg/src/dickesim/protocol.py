"""Pulse-sequence synthesis on the dark-state ladder.

The preparation protocol alternates microwave flips of the ancilla with
off-resonant two-photon (Raman) transitions.  Within the decoherence-free
subspace the reachable states form a ladder

    g_0, s_1, g_1, s_2, g_2, ..., s_M, g_M

with g_j = |F_{j,0}>|g>_A and s_j = |F_{j-1,0}>|s>_A.  A flip drives every
pair (g_j, s_{j+1}) with the same angle; a Raman segment drives every pair
(s_j, g_j) with pair-dependent effective couplings and Stark shifts obtained
by adiabatic elimination of the detuned intermediate dark states.  Arbitrary
superpositions are planned by zeroing the topmost occupied rung step by step
on this ladder model and reversing the resulting rotations.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .dynamics import PhysicalParams, PulseSegment
from .state_space import StateVector, SymmetricBasis

ANNOTATIONS = ("ancilla-flip", "raman", "mapping")
_ZERO_TOL = 1e-12


def resonance_omega_anc(m: int, n_atoms: int, omega_r: complex) -> complex:
    """Ancilla Rabi amplitude putting the m-th two-photon transition on resonance.

    Returns omega_r * sqrt(m / (N - m + 1)); the phase follows omega_r.
    """
    if m < 1 or m > n_atoms:
        raise ValueError(f"m = {m} outside 1..{n_atoms}")
    return omega_r * math.sqrt(m / (n_atoms - m + 1))


def effective_rabi(m: int, n_atoms: int, omega_r: complex, delta_e: float) -> float:
    """Two-photon Rabi frequency |omega_r|^2 m / (2 |delta_e| (N - m + 2))."""
    if delta_e == 0:
        raise ValueError("delta_e must be non-zero for an off-resonant transition")
    if m < 1 or m > n_atoms:
        raise ValueError(f"m = {m} outside 1..{n_atoms}")
    return abs(omega_r) ** 2 * m / (2.0 * abs(delta_e) * (n_atoms - m + 2))


@dataclass(frozen=True)
class TargetSuperposition:
    """Normalized coefficients d_m over the symmetric states, m = 0..m_max."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        total = sum(abs(c) ** 2 for c in coeffs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"coefficients not normalized: sum |d|^2 = {total}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def m_max(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def fock(cls, m: int) -> "TargetSuperposition":
        return cls(tuple(0.0 for _ in range(m)) + (1.0,))

    @classmethod
    def phi(cls, m: int) -> "TargetSuperposition":
        """(|D_0> + |D_m>)/sqrt(2)."""
        if m < 1:
            raise ValueError("phi targets need m >= 1")
        d = [0.0] * (m + 1)
        d[0] = d[m] = 1.0 / math.sqrt(2.0)
        return cls(tuple(d))

    @classmethod
    def from_unnormalized(cls, coeffs) -> "TargetSuperposition":
        arr = np.asarray(list(coeffs), dtype=complex)
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(tuple(arr / norm))

    def state_vector(self, basis: SymmetricBasis) -> StateVector:
        """Embed sum_m d_m |F_{m,0}>|g>_A into a symmetric basis."""
        amps = np.zeros(basis.dim, dtype=complex)
        for m, d in enumerate(self.coefficients):
            amps[basis.index_of(m, 0, "g")] = d
        return StateVector(basis, amps)


@dataclass(frozen=True)
class PulseSequence:
    """Ordered drive segments with per-segment annotations."""

    segments: tuple[PulseSegment, ...]
    annotations: tuple[str, ...]

    def __post_init__(self):
        if len(self.segments) != len(self.annotations):
            raise ValueError("one annotation per segment required")
        for ann in self.annotations:
            if ann not in ANNOTATIONS:
                raise ValueError(f"unknown annotation {ann!r}")
        _validate_annotation_order(self.annotations)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def total_duration(self) -> float:
        return sum(seg.duration for seg in self.segments)

    def to_json_dict(self) -> dict:
        return {
            "segments": [
                {
                    "annotation": ann,
                    "omega_r": [complex(seg.omega_r).real, complex(seg.omega_r).imag],
                    "omega_anc": [complex(seg.omega_anc).real, complex(seg.omega_anc).imag],
                    "omega_c": [complex(seg.omega_c).real, complex(seg.omega_c).imag],
                    "delta_e": seg.delta_e,
                    "duration": seg.duration,
                }
                for seg, ann in zip(self.segments, self.annotations)
            ]
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PulseSequence":
        segments = []
        annotations = []
        for entry in doc["segments"]:
            segments.append(
                PulseSegment(
                    omega_r=complex(*entry["omega_r"]),
                    omega_anc=complex(*entry["omega_anc"]),
                    omega_c=complex(*entry["omega_c"]),
                    delta_e=entry["delta_e"],
                    duration=entry["duration"],
                )
            )
            annotations.append(entry["annotation"])
        return cls(tuple(segments), tuple(annotations))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def _validate_annotation_order(annotations: tuple[str, ...]) -> None:
    """Preparation alternates flip/raman segments; a mapping segment, if
    present, must be last (an ancilla-parking flip may precede it)."""
    prep = list(annotations)
    if prep and prep[-1] == "mapping":
        prep = prep[:-1]
    if "mapping" in prep:
        raise ValueError("mapping segment must be last")
    for first, second in zip(prep, prep[1:]):
        if first == second:
            raise ValueError(
                "preparation segments must alternate ancilla-flip/raman"
            )


class LadderModel:
    """Dissipation-free dynamics projected on the 2 m_max + 1 ladder states.

    State ordering: index 0 is g_0, then s_j at 2j-1 and g_j at 2j for
    j = 1..m_max, plus one phantom rung s_{m_max+1} (last index) that a flip
    could reach from g_{m_max}; a correct plan never populates it.
    """

    def __init__(self, n_atoms: int, m_max: int, delta_e: float):
        if delta_e == 0:
            raise ValueError("delta_e must be non-zero")
        if m_max < 1 or m_max > n_atoms:
            raise ValueError(f"m_max = {m_max} outside 1..{n_atoms}")
        self.n_atoms = n_atoms
        self.m_max = m_max
        self.delta_e = delta_e
        self.dim = 2 * m_max + 2

    def idx_g(self, j: int) -> int:
        return 2 * j

    def idx_s(self, j: int) -> int:
        return 2 * j - 1 if j <= self.m_max else self.dim - 1

    def ground(self) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[0] = 1.0
        return psi

    def target_vector(self, target: TargetSuperposition) -> np.ndarray:
        if target.m_max > self.m_max:
            raise ValueError("target exceeds the ladder size")
        psi = np.zeros(self.dim, dtype=complex)
        for m, d in enumerate(target.coefficients):
            psi[self.idx_g(m)] = d
        return psi

    def flip_hamiltonian(self, omega_c: complex) -> np.ndarray:
        """Microwave flip: couples every (g_j, s_{j+1}) with <g|H|s> = omega_c/2."""
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(self.m_max + 1):
            g, s = self.idx_g(j), self.idx_s(j + 1)
            h[g, s] = 0.5 * omega_c
            h[s, g] = 0.5 * np.conj(omega_c)
        return h

    def pair_couplings(self, j: int, omega_r: complex, omega_anc: complex):
        """Second-order couplings of pair (s_j, g_j) via the detuned dark state.

        Exact projections give omega_se = (omega_anc/2) sqrt(N_j/(N_j+1)) and
        omega_ge = -(omega_r/2) sqrt(j/(N_j+1)) with N_j = N - j + 1; the
        adiabatic elimination then yields Stark shifts -|.|^2/delta_e and the
        cross coupling -conj(omega_se) omega_ge / delta_e.
        """
        n_j = self.n_atoms - j + 1
        omega_se = 0.5 * omega_anc * math.sqrt(n_j / (n_j + 1))
        omega_ge = -0.5 * omega_r * math.sqrt(j / (n_j + 1))
        stark_s = -abs(omega_se) ** 2 / self.delta_e
        stark_g = -abs(omega_ge) ** 2 / self.delta_e
        coupling = -np.conj(omega_se) * omega_ge / self.delta_e
        return stark_s, stark_g, coupling

    def raman_hamiltonian(self, omega_r: complex, omega_anc: complex) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(1, self.m_max + 1):
            stark_s, stark_g, coupling = self.pair_couplings(j, omega_r, omega_anc)
            s, g = self.idx_s(j), self.idx_g(j)
            h[s, s] = stark_s
            h[g, g] = stark_g
            h[s, g] = coupling
            h[g, s] = np.conj(coupling)
        return h

    def segment_unitary(self, segment: PulseSegment, annotation: str) -> np.ndarray:
        if annotation == "ancilla-flip":
            h = self.flip_hamiltonian(segment.omega_c)
        elif annotation == "raman":
            h = self.raman_hamiltonian(segment.omega_r, segment.omega_anc)
        else:
            raise ValueError(f"ladder model cannot apply {annotation!r} segments")
        return expm(-1j * h * segment.duration)

    def apply(self, sequence: PulseSequence, psi: np.ndarray | None = None) -> np.ndarray:
        """Forward application of a preparation sequence from g_0."""
        out = self.ground() if psi is None else np.asarray(psi, dtype=complex).copy()
        for segment, ann in zip(sequence.segments, sequence.annotations):
            out = self.segment_unitary(segment, ann) @ out
        return out

    def to_state_vector(self, basis: SymmetricBasis, psi: np.ndarray) -> StateVector:
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.index_of(0, 0, "g")] = psi[0]
        for j in range(1, self.m_max + 1):
            amps[basis.index_of(j - 1, 0, "s")] += psi[self.idx_s(j)]
            amps[basis.index_of(j, 0, "g")] += psi[self.idx_g(j)]
        amps[basis.index_of(self.m_max, 0, "s")] += psi[self.dim - 1]
        return StateVector(basis, amps)


def _zeroing_rotation(psi_keep: complex, psi_zero: complex) -> tuple[float, float]:
    """Angle and coupling phase such that the inverse rotation empties one leg.

    For a block H = [[0, kappa], [conj(kappa), 0]] in ordering (keep, zero)
    with kappa = |kappa| e^{i phi}, the inverse of U = exp(-i H t) maps the
    'zero' amplitude to i e^{-i phi} sin(theta/2) psi_keep + cos(theta/2)
    psi_zero.  Returns (theta, phi) with theta = 2 |kappa| t.
    """
    if abs(psi_zero) < _ZERO_TOL:
        return 0.0, 0.0
    if abs(psi_keep) < _ZERO_TOL:
        return math.pi, 0.0
    w = 1j * psi_zero / psi_keep
    theta = 2.0 * math.atan(abs(w))
    phi = -float(np.angle(w))
    return theta, phi


def plan_fock(
    m_target: int,
    n_atoms: int,
    omega_r: float,
    delta_e: float,
    omega_c: float,
) -> PulseSequence:
    """Ladder climb to |D_m>: per excitation one pi flip and one pi Raman."""
    if m_target < 0 or m_target > n_atoms:
        raise ValueError(f"m_target = {m_target} outside 0..{n_atoms}")
    segments: list[PulseSegment] = []
    annotations: list[str] = []
    for m in range(1, m_target + 1):
        segments.append(
            PulseSegment(omega_c=omega_c, duration=math.pi / abs(omega_c))
        )
        annotations.append("ancilla-flip")
        segments.append(
            PulseSegment(
                omega_r=omega_r,
                omega_anc=resonance_omega_anc(m, n_atoms, omega_r),
                delta_e=delta_e,
                duration=math.pi / effective_rabi(m, n_atoms, omega_r, delta_e),
            )
        )
        annotations.append("raman")
    return PulseSequence(tuple(segments), tuple(annotations))


def plan_superposition(
    target: TargetSuperposition,
    n_atoms: int,
    omega_r: float,
    delta_e: float,
    omega_c: float,
) -> PulseSequence:
    """Back-solve the pulse sequence preparing sum_m d_m |D_m>.

    Working backwards from the target on the ladder model, each step first
    chooses a Raman rotation emptying g_m into s_m and then an ancilla
    rotation emptying s_m into g_{m-1}; spectator rungs are carried along
    exactly, so reversing the rotations reproduces the target within float
    precision.  Drive phases are realized on omega_r (Raman) and omega_c
    (flip); omega_anc keeps the base resonance amplitude.
    """
    coeffs = list(target.coefficients)
    while len(coeffs) > 1 and abs(coeffs[-1]) < _ZERO_TOL:
        coeffs.pop()
    m_top = len(coeffs) - 1
    if m_top == 0:
        return PulseSequence((), ())
    omega_r = abs(omega_r)
    omega_c_mag = abs(omega_c)
    ladder = LadderModel(n_atoms, m_top, delta_e)
    psi = ladder.target_vector(TargetSuperposition(tuple(coeffs)))

    reversed_segments: list[tuple[PulseSegment, str]] = []
    for m in range(m_top, 0, -1):
        # Raman rotation: empty g_m into s_m.
        omega_anc = resonance_omega_anc(m, n_atoms, omega_r)
        _, _, coupling0 = ladder.pair_couplings(m, omega_r, omega_anc)
        base_phase = float(np.angle(coupling0)) if abs(coupling0) > 0 else 0.0
        theta, phi = _zeroing_rotation(psi[ladder.idx_s(m)], psi[ladder.idx_g(m)])
        rabi = effective_rabi(m, n_atoms, omega_r, delta_e)
        seg = PulseSegment(
            omega_r=omega_r * np.exp(1j * (phi - base_phase)),
            omega_anc=omega_anc,
            delta_e=delta_e,
            duration=theta / rabi,
        )
        psi = ladder.segment_unitary(seg, "raman").conj().T @ psi
        if abs(psi[ladder.idx_g(m)]) > 1e-10:
            raise AssertionError("back-solve failed to empty the top g rung")
        reversed_segments.append((seg, "raman"))

        # Ancilla rotation: empty s_m into g_{m-1}.  The coupling in the
        # (g_{m-1}, s_m) block is <g|H|s> = omega_c/2, so kappa = omega_c/2.
        theta, phi = _zeroing_rotation(psi[ladder.idx_g(m - 1)], psi[ladder.idx_s(m)])
        seg = PulseSegment(
            omega_c=omega_c_mag * np.exp(1j * phi),
            duration=theta / omega_c_mag,
        )
        psi = ladder.segment_unitary(seg, "ancilla-flip").conj().T @ psi
        if abs(psi[ladder.idx_s(m)]) > 1e-10:
            raise AssertionError("back-solve failed to empty the top s rung")
        reversed_segments.append((seg, "ancilla-flip"))

    residual = np.linalg.norm(psi[1:])
    if residual > 1e-9 or abs(abs(psi[0]) - 1.0) > 1e-9:
        raise AssertionError(f"back-solve left residual amplitude {residual:.2e}")

    segments = tuple(seg for seg, _ in reversed(reversed_segments))
    annotations = tuple(ann for _, ann in reversed(reversed_segments))
    return PulseSequence(segments, annotations)


def optimal_detuning(params: PhysicalParams, mode: str = "deterministic", cap: float = 0.3) -> float:
    """Detuning minimizing the per-step infidelity.

    Deterministic protocols use sqrt(gamma_star gamma_1d); the post-selected
    optimum N gamma_1d is capped (default 0.3 gamma_1d) because the formal
    value leaves the regime in which the effective dynamics is valid.
    """
    if mode == "deterministic":
        return math.sqrt(params.gamma_star * params.gamma_1d)
    if mode == "post_selected":
        return min(params.n_atoms * params.gamma_1d, cap * params.gamma_1d)
    raise ValueError(f"unknown mode {mode!r}")


def mapping_pulse(omega_r_fast: float, n_atoms: int | None = None) -> PulseSegment:
    """Fast resonant pi pulse flipping s -> e on the register before emission."""
    if n_atoms is not None and abs(omega_r_fast) < 10 * n_atoms:
        warnings.warn(
            "mapping pulse should satisfy omega_r >> N gamma_1d; "
            f"got {omega_r_fast} for N = {n_atoms}",
            stacklevel=2,
        )
    return PulseSegment(omega_r=omega_r_fast, delta_e=0.0, duration=math.pi / abs(omega_r_fast))


def with_emission(
    sequence: PulseSequence,
    omega_r_fast: float,
    omega_c: float,
    n_atoms: int | None = None,
    park_ancilla: bool = True,
) -> PulseSequence:
    """Append the optional ancilla-parking flip and the mapping pi pulse."""
    segments = list(sequence.segments)
    annotations = list(sequence.annotations)
    if park_ancilla:
        segments.append(PulseSegment(omega_c=omega_c, duration=math.pi / abs(omega_c)))
        annotations.append("ancilla-flip")
    segments.append(mapping_pulse(omega_r_fast, n_atoms))
    annotations.append("mapping")
    return PulseSequence(tuple(segments), tuple(annotations))
