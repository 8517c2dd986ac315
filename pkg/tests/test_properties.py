"""Randomized property suites; each invariant is exercised on >= 100 draws."""

import numpy as np
import pytest

from dickesim import (
    LadderModel,
    PhysicalParams,
    PulseSegment,
    PulseSequence,
    TargetSuperposition,
    amplitude_exact,
    basis_state,
    build_basis,
    build_h_eff,
    collective_lower,
    dark_state_trio,
    evolve,
    plan_superposition,
    run_sequence,
)
from dickesim.dynamics import hermitian_split

N_CASES = 120


def random_segment(rng, scale=0.5):
    def c():
        return complex(rng.normal(scale=scale), rng.normal(scale=scale))

    return PulseSegment(
        omega_r=c(),
        omega_anc=c(),
        omega_c=c(),
        delta_e=float(rng.normal(scale=scale)),
        duration=float(rng.uniform(0.0, 20.0)),
    )


def test_dfs_annihilation_randomized():
    rng = np.random.default_rng(101)
    for _ in range(N_CASES):
        n = int(rng.integers(2, 21))
        m_max = int(rng.integers(1, min(6, n) + 1))
        basis = build_basis(n, m_max, 2)
        lower = collective_lower(basis)
        m = int(rng.integers(1, m_max + 1))
        trio = dark_state_trio(m, basis)
        assert lower.apply(trio.psi_e).norm < 1e-12


def test_anti_hermitian_part_negative_semidefinite_randomized():
    rng = np.random.default_rng(202)
    for _ in range(N_CASES):
        n = int(rng.integers(2, 13))
        params = PhysicalParams(
            n_atoms=n, gamma_star=float(10.0 ** rng.uniform(-6, 0))
        )
        basis = build_basis(n, int(rng.integers(1, min(4, n) + 1)), 2)
        h = build_h_eff(basis, random_segment(rng), params)
        _, anti = hermitian_split(h)
        assert np.max(np.linalg.eigvalsh(anti)) <= 1e-12


def test_norm_monotonicity_randomized():
    rng = np.random.default_rng(303)
    for _ in range(N_CASES):
        n = int(rng.integers(2, 11))
        params = PhysicalParams(
            n_atoms=n, gamma_star=float(10.0 ** rng.uniform(-5, -1))
        )
        basis = build_basis(n, 2, 2)
        n_segments = int(rng.integers(1, 4))
        segments = tuple(random_segment(rng, scale=0.3) for _ in range(n_segments))
        annotations = tuple(
            "ancilla-flip" if i % 2 == 0 else "raman" for i in range(n_segments)
        )
        seq = PulseSequence(segments, annotations)
        amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        amps /= np.linalg.norm(amps)
        from dickesim.state_space import StateVector

        traj = run_sequence(seq, StateVector(basis, amps), params)
        norms = np.array(traj.norms)
        assert np.all(np.diff(norms**2) <= 1e-10)


def test_ladder_round_trip_randomized():
    rng = np.random.default_rng(404)
    for _ in range(N_CASES):
        n = int(rng.integers(7, 31))
        m_max = int(rng.integers(1, 7))
        coeffs = rng.normal(size=m_max + 1) + 1j * rng.normal(size=m_max + 1)
        target = TargetSuperposition.from_unnormalized(coeffs)
        delta = float(10.0 ** rng.uniform(-3, -1))
        omega_r = 0.02 * delta
        seq = plan_superposition(target, n, omega_r, delta, 0.02)
        ladder = LadderModel(n, max(target.m_max, 1), delta)
        final = ladder.apply(seq)
        overlap = abs(np.vdot(ladder.target_vector(target), final))
        assert overlap > 1 - 1e-10
        assert len(seq) <= 2 * m_max


def test_amplitude_permutation_symmetry_randomized():
    rng = np.random.default_rng(505)
    for _ in range(N_CASES):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(m, 25))
        dets = rng.normal(scale=float(rng.uniform(0.5, 30.0)), size=m)
        base = amplitude_exact(dets, n)
        perm = rng.permutation(m)
        permuted = amplitude_exact(dets[perm], n)
        assert abs(permuted - base) <= 1e-12 * max(abs(base), 1e-30)


def test_halved_step_convergence_randomized():
    rng = np.random.default_rng(606)
    for _ in range(N_CASES):
        n = int(rng.integers(2, 9))
        params = PhysicalParams(
            n_atoms=n, gamma_star=float(10.0 ** rng.uniform(-5, -1))
        )
        basis = build_basis(n, 2, 2)
        seg = random_segment(rng, scale=0.2)
        if seg.duration == 0:
            continue
        h = build_h_eff(basis, seg, params)
        state = basis_state(basis, int(rng.integers(0, 2)), 0, "g")
        evolve(state, h, seg.duration, tolerance=1e-10, check=True)


def test_evolution_norm_never_exceeds_unity_randomized():
    rng = np.random.default_rng(707)
    for _ in range(N_CASES):
        n = int(rng.integers(2, 11))
        params = PhysicalParams(
            n_atoms=n, gamma_star=float(10.0 ** rng.uniform(-5, -1))
        )
        basis = build_basis(n, 2, 2)
        h = build_h_eff(basis, random_segment(rng), params)
        amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        amps /= np.linalg.norm(amps)
        from dickesim.state_space import StateVector

        out = evolve(StateVector(basis, amps), h, float(rng.uniform(0, 30)))
        assert out.norm <= 1 + 1e-12
