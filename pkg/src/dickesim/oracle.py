"""Brute-force oracle on the unrestricted (N+1)-atom tensor-product space.

Every atom is a three-level system ordered (g, s, e); the full space has
dimension 3**(n_atoms+1) and is only meant for n_atoms <= 4.  The register
atoms are sites 0..N-1 and the ancilla is the last site.  This module exists
to cross-validate the restricted symmetric-basis construction and the
non-Hermitian evolution against an explicit Lindblad master equation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .state_space import SymmetricBasis, StateVector, multinomial_norm

MAX_ORACLE_ATOMS = 4

_LEVELS = {"g": 0, "s": 1, "e": 2}


def _single_site(n_sites: int, site: int, op: np.ndarray) -> np.ndarray:
    """Embed a 3x3 single-atom operator at the given site (dense kron chain)."""
    mat = np.array([[1.0 + 0j]])
    for j in range(n_sites):
        mat = np.kron(mat, op if j == site else np.eye(3))
    return mat


def _sigma(i: str, j: str) -> np.ndarray:
    op = np.zeros((3, 3), dtype=complex)
    op[_LEVELS[i], _LEVELS[j]] = 1.0
    return op


@lru_cache(maxsize=8)
def full_operators(n_atoms: int) -> dict:
    """Collective and per-site operators on the full (N+1)-atom space."""
    if n_atoms > MAX_ORACLE_ATOMS:
        raise ValueError(f"full tensor oracle limited to n_atoms <= {MAX_ORACLE_ATOMS}")
    n_sites = n_atoms + 1
    dim = 3 ** n_sites
    s_ge = np.zeros((dim, dim), dtype=complex)
    s_se_reg = np.zeros((dim, dim), dtype=complex)
    s_ee = np.zeros((dim, dim), dtype=complex)
    sigma_ge_sites = []
    for site in range(n_sites):
        ge = _single_site(n_sites, site, _sigma("g", "e"))
        sigma_ge_sites.append(ge)
        s_ge += ge
        s_ee += _single_site(n_sites, site, _sigma("e", "e"))
        if site < n_atoms:
            s_se_reg += _single_site(n_sites, site, _sigma("s", "e"))
    anc = n_sites - 1
    return {
        "s_ge": s_ge,
        "s_se_register": s_se_reg,
        "s_ee": s_ee,
        "sigma_se_ancilla": _single_site(n_sites, anc, _sigma("s", "e")),
        "sigma_sg_ancilla": _single_site(n_sites, anc, _sigma("s", "g")),
        "sigma_ge_sites": sigma_ge_sites,
    }


@lru_cache(maxsize=8)
def embedding_matrix(basis: SymmetricBasis) -> np.ndarray:
    """Isometry from the restricted symmetric basis into the full tensor space.

    Column (m, k, a) is the normalized symmetrized register state with m atoms
    in s and k in e, tensored with the ancilla level a.
    """
    n = basis.n_atoms
    if n > MAX_ORACLE_ATOMS:
        raise ValueError(f"full tensor oracle limited to n_atoms <= {MAX_ORACLE_ATOMS}")
    n_sites = n + 1
    dim_full = 3 ** n_sites
    emb = np.zeros((dim_full, basis.dim), dtype=complex)
    for col, (m, k, a) in enumerate(basis.states):
        coeff = 1.0 / math.sqrt(multinomial_norm(n, m, k))
        for arrangement in itertools.product((0, 1, 2), repeat=n):
            if arrangement.count(1) != m or arrangement.count(2) != k:
                continue
            digits = arrangement + (a,)
            row = 0
            for d in digits:
                row = 3 * row + d
            emb[row, col] = coeff
    return emb


def embed_state(state: StateVector) -> np.ndarray:
    return embedding_matrix(state.basis) @ state.amplitudes


def project_to_symmetric(basis: SymmetricBasis, full_vector: np.ndarray) -> StateVector:
    emb = embedding_matrix(basis)
    return StateVector(basis, emb.conj().T @ full_vector)


def full_h_eff(n_atoms: int, segment, params) -> np.ndarray:
    """Non-Hermitian effective Hamiltonian on the full tensor space.

    Mirrors dynamics.build_h_eff term by term: detuning on every excited
    atom, the three drives plus conjugates, the collective decay through the
    full S_ge (ancilla included) and the uniform loss into other modes.
    """
    ops = full_operators(n_atoms)
    h = segment.delta_e * ops["s_ee"]
    h = h + 0.5 * (
        segment.omega_r * ops["s_se_register"].conj().T
        + np.conj(segment.omega_r) * ops["s_se_register"]
    )
    h = h + 0.5 * (
        segment.omega_anc * ops["sigma_se_ancilla"].conj().T
        + np.conj(segment.omega_anc) * ops["sigma_se_ancilla"]
    )
    h = h + 0.5 * (
        segment.omega_c * ops["sigma_sg_ancilla"].conj().T
        + np.conj(segment.omega_c) * ops["sigma_sg_ancilla"]
    )
    s_ge = ops["s_ge"]
    h = h - 0.5j * params.gamma_1d * (s_ge.conj().T @ s_ge)
    h = h - 0.5j * params.gamma_star * ops["s_ee"]
    return h


def evolve_nh_full(psi: np.ndarray, n_atoms: int, sequence, params) -> np.ndarray:
    """Piecewise-constant non-Hermitian evolution on the full space."""
    out = np.asarray(psi, dtype=complex)
    for segment in sequence.segments:
        h = full_h_eff(n_atoms, segment, params)
        out = expm(-1j * h * segment.duration) @ out
    return out


def _liouvillian(h_coherent: np.ndarray, jumps: list[tuple[float, np.ndarray]]) -> sp.csr_matrix:
    """Vectorized Lindblad generator, column-stacking convention."""
    dim = h_coherent.shape[0]
    eye = sp.identity(dim, format="csr", dtype=complex)
    h = sp.csr_matrix(h_coherent)
    lv = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for rate, op in jumps:
        l_op = sp.csr_matrix(op)
        ldl = (l_op.conj().T @ l_op).tocsr()
        lv = lv + rate * (
            sp.kron(l_op.conj(), l_op)
            - 0.5 * sp.kron(eye, ldl)
            - 0.5 * sp.kron(ldl.T, eye)
        )
    return lv.tocsr()


def evolve_master_equation(rho: np.ndarray, n_atoms: int, sequence, params) -> np.ndarray:
    """Full Lindblad evolution with the collective jump S_ge at rate gamma_1d
    and an individual jump sigma_ge per atom (ancilla included) at gamma_star.
    """
    ops = full_operators(n_atoms)
    dim = rho.shape[0]
    out = np.asarray(rho, dtype=complex).reshape(-1, order="F")
    for segment in sequence.segments:
        h_coh = segment.delta_e * ops["s_ee"]
        h_coh = h_coh + 0.5 * (
            segment.omega_r * ops["s_se_register"].conj().T
            + np.conj(segment.omega_r) * ops["s_se_register"]
        )
        h_coh = h_coh + 0.5 * (
            segment.omega_anc * ops["sigma_se_ancilla"].conj().T
            + np.conj(segment.omega_anc) * ops["sigma_se_ancilla"]
        )
        h_coh = h_coh + 0.5 * (
            segment.omega_c * ops["sigma_sg_ancilla"].conj().T
            + np.conj(segment.omega_c) * ops["sigma_sg_ancilla"]
        )
        jumps = [(params.gamma_1d, ops["s_ge"])]
        jumps += [(params.gamma_star, op) for op in ops["sigma_ge_sites"]]
        lv = _liouvillian(h_coh, jumps)
        if segment.duration > 0:
            out = expm_multiply(lv * segment.duration, out)
    return out.reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Outputs of the small-N cross-validation run."""

    psi_nh: np.ndarray           # final pure state, non-Hermitian evolution
    rho_me: np.ndarray           # final density matrix, Lindblad evolution
    n_atoms: int

    def fidelity_pure(self, target_full: np.ndarray) -> float:
        return abs(np.vdot(target_full, self.psi_nh))

    def fidelity_master(self, target_full: np.ndarray) -> float:
        val = np.vdot(target_full, self.rho_me @ target_full).real
        return math.sqrt(max(val, 0.0))


def full_space_oracle(n_atoms: int, sequence, params, initial=None) -> OracleResult:
    """Evolve the ground state through a pulse sequence on the full space.

    Returns both the non-Hermitian pure state and the master-equation density
    matrix for cross-validation; n_atoms must not exceed 4.
    """
    if n_atoms > MAX_ORACLE_ATOMS:
        raise ValueError(f"full_space_oracle requires n_atoms <= {MAX_ORACLE_ATOMS}")
    dim = 3 ** (n_atoms + 1)
    if initial is None:
        psi0 = np.zeros(dim, dtype=complex)
        psi0[0] = 1.0  # all atoms in g
    else:
        psi0 = np.asarray(initial, dtype=complex)
    psi_nh = evolve_nh_full(psi0, n_atoms, sequence, params)
    rho0 = np.outer(psi0, psi0.conj())
    rho_me = evolve_master_equation(rho0, n_atoms, sequence, params)
    return OracleResult(psi_nh=psi_nh, rho_me=rho_me, n_atoms=n_atoms)
