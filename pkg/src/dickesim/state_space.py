"""Permutation-symmetric Hilbert space for N register atoms plus one ancilla.

The register is described by symmetric states with m atoms in |s>, k atoms in
|e| and the rest in |g>; the ancilla is a single three-level atom tracked by
its level label.  All operators are dense complex matrices over this basis.
Rates are expressed in units of the waveguide decay rate throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

ANCILLA_LEVELS = ("g", "s", "e")


def multinomial_norm(n_atoms: int, m: int, k: int) -> float:
    """Number of distinct register arrangements with m atoms in s and k in e.

    Equals n_atoms! / (m! k! (n_atoms-m-k)!), evaluated exactly with integer
    arithmetic before conversion to float.
    """
    if m < 0 or k < 0:
        raise ValueError("occupations must be non-negative")
    if m + k > n_atoms:
        raise ValueError(f"m + k = {m + k} exceeds n_atoms = {n_atoms}")
    num = math.factorial(n_atoms)
    den = math.factorial(m) * math.factorial(k) * math.factorial(n_atoms - m - k)
    return float(num // den)


@dataclass(frozen=True)
class SymmetricBasis:
    """Ordered basis of states |F_{m,k}> (x) |a>_A.

    States are enumerated lexicographically in (m, k, a) with the ancilla
    level ordered g < s < e, restricted to 0 <= m <= m_max, 0 <= k <= k_max
    and m + k <= n_atoms.
    """

    n_atoms: int
    m_max: int
    k_max: int
    states: tuple[tuple[int, int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("need at least one register atom")
        if self.m_max > self.n_atoms:
            raise ValueError(f"m_max = {self.m_max} exceeds n_atoms = {self.n_atoms}")
        if self.m_max < 0 or self.k_max < 0:
            raise ValueError("m_max and k_max must be non-negative")
        if not self.states:
            states = tuple(
                (m, k, a)
                for m in range(self.m_max + 1)
                for k in range(self.k_max + 1)
                for a in range(3)
                if m + k <= self.n_atoms
            )
            object.__setattr__(self, "states", states)
        if len(self.states) == 0:
            raise ValueError("basis is empty")

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def index_map(self) -> dict[tuple[int, int, int], int]:
        return _index_map(self)

    def index_of(self, m: int, k: int, ancilla: int | str) -> int:
        if isinstance(ancilla, str):
            ancilla = ANCILLA_LEVELS.index(ancilla)
        return self.index_map[(m, k, ancilla)]

    def label(self, i: int) -> str:
        m, k, a = self.states[i]
        return f"F[{m},{k}]x{ANCILLA_LEVELS[a]}"


@lru_cache(maxsize=64)
def _index_map(basis: SymmetricBasis) -> dict[tuple[int, int, int], int]:
    return {state: i for i, state in enumerate(basis.states)}


def build_basis(n_atoms: int, m_max: int, k_max: int = 2) -> SymmetricBasis:
    """Construct the restricted symmetric basis (see SymmetricBasis)."""
    return SymmetricBasis(n_atoms=n_atoms, m_max=m_max, k_max=k_max)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a SymmetricBasis."""

    basis: SymmetricBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.basis.dim},)"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def basis_state(basis: SymmetricBasis, m: int, k: int, ancilla: int | str) -> StateVector:
    """Unit vector on |F_{m,k}> (x) |ancilla>."""
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of(m, k, ancilla)] = 1.0
    return StateVector(basis, amps)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator over a SymmetricBasis."""

    basis: SymmetricBasis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix has shape {mat.shape}, expected square of dim {self.basis.dim}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def dag(self) -> "Operator":
        return Operator(self.basis, self.matrix.conj().T)

    def apply(self, state: StateVector) -> StateVector:
        if state.basis is not self.basis and state.basis != self.basis:
            raise ValueError("operator and state live on different bases")
        return StateVector(state.basis, self.matrix @ state.amplitudes)

    def expectation(self, state: StateVector) -> complex:
        return complex(np.vdot(state.amplitudes, self.matrix @ state.amplitudes))


@lru_cache(maxsize=64)
def collective_lower(basis: SymmetricBasis) -> Operator:
    """Collective lowering operator over the N register atoms plus the ancilla.

    Register part: |F_{m,k}> -> sqrt(k (N-m-k+1)) |F_{m,k-1}>.
    Ancilla part: |e>_A -> |g>_A with unit amplitude.
    """
    n = basis.n_atoms
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    idx = basis.index_map
    for j, (m, k, a) in enumerate(basis.states):
        if k >= 1:
            mat[idx[(m, k - 1, a)], j] += np.sqrt(k * (n - m - k + 1))
        if a == 2:  # ancilla e -> g
            mat[idx[(m, k, 0)], j] += 1.0
    return Operator(basis, mat)


def collective_raise(basis: SymmetricBasis) -> Operator:
    """Adjoint of collective_lower, truncated to the basis."""
    return collective_lower(basis).dag()


@dataclass(frozen=True, eq=False)
class DriveOperators:
    """Drive and counting operators entering the effective Hamiltonian."""

    s_se_register: Operator      # register e -> s, element sqrt(m (k+1))
    sigma_se_ancilla: Operator   # ancilla e -> s
    sigma_sg_ancilla: Operator   # ancilla g -> s
    s_ee_total: Operator         # counts k plus the ancilla-e occupation


@lru_cache(maxsize=64)
def drive_operators(basis: SymmetricBasis) -> DriveOperators:
    """Build the four drive/counting operators on the restricted basis.

    s_se_register has matrix element sqrt(m (k+1)) between (m, k, a) and
    (m-1, k+1, a); the ancilla operators act on the ancilla label only;
    s_ee_total is diagonal with eigenvalue k + [a == e].
    """
    dim = basis.dim
    idx = basis.index_map
    s_se = np.zeros((dim, dim), dtype=complex)
    sig_se = np.zeros((dim, dim), dtype=complex)
    sig_sg = np.zeros((dim, dim), dtype=complex)
    s_ee = np.zeros((dim, dim), dtype=complex)
    for j, (m, k, a) in enumerate(basis.states):
        target = (m + 1, k - 1, a)
        if k >= 1 and target in idx:
            s_se[idx[target], j] = np.sqrt((m + 1) * k)
        if a == 2:
            sig_se[idx[(m, k, 1)], j] = 1.0
        if a == 0:
            sig_sg[idx[(m, k, 1)], j] = 1.0
        s_ee[j, j] = k + (1.0 if a == 2 else 0.0)
    return DriveOperators(
        s_se_register=Operator(basis, s_se),
        sigma_se_ancilla=Operator(basis, sig_se),
        sigma_sg_ancilla=Operator(basis, sig_sg),
        s_ee_total=Operator(basis, s_ee),
    )


@dataclass(frozen=True, eq=False)
class DarkStateTrio:
    """The three permutation-symmetric states relevant at excitation m."""

    psi_s: StateVector | None
    psi_g: StateVector
    psi_e: StateVector | None


def dark_state_trio(m: int, basis: SymmetricBasis) -> DarkStateTrio:
    """Named dark states at excitation number m.

    psi_s = |F_{m-1,0}> |s>_A, psi_g = |F_{m,0}> |g>_A and
    psi_e = sqrt(Nm/(Nm+1)) |F_{m-1,0}>|e>_A - sqrt(1/(Nm+1)) |F_{m-1,1}>|g>_A
    with Nm = N - m + 1.  For m = 0 only psi_g exists (psi_s and psi_e are
    returned as None).
    """
    n = basis.n_atoms
    if m < 0 or m > basis.m_max:
        raise ValueError(f"m = {m} outside basis range 0..{basis.m_max}")
    psi_g = basis_state(basis, m, 0, "g")
    if m == 0:
        return DarkStateTrio(psi_s=None, psi_g=psi_g, psi_e=None)
    n_m = n - m + 1
    psi_s = basis_state(basis, m - 1, 0, "s")
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of(m - 1, 0, "e")] = np.sqrt(n_m / (n_m + 1))
    amps[basis.index_of(m - 1, 1, "g")] = -np.sqrt(1.0 / (n_m + 1))
    psi_e = StateVector(basis, amps)
    return DarkStateTrio(psi_s=psi_s, psi_g=psi_g, psi_e=psi_e)
