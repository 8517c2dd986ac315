import numpy as np
import pytest

from dickesim import (
    PhysicalParams,
    PulseSegment,
    PulseSequence,
    TargetSuperposition,
    basis_state,
    build_basis,
    optimal_detuning,
    plan_fock,
    run_sequence,
)
from dickesim import oracle


class TestEmbedding:
    @pytest.mark.parametrize("n", [2, 3])
    def test_isometry(self, n):
        basis = build_basis(n, n, n)
        emb = oracle.embedding_matrix(basis)
        np.testing.assert_allclose(
            emb.conj().T @ emb, np.eye(basis.dim), atol=1e-13
        )

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            oracle.full_operators(5)


class TestNonHermitianAgreement:
    @pytest.mark.parametrize("m_target", [1, 2])
    def test_restricted_matches_projected_full(self, m_target):
        n = 3
        params = PhysicalParams.from_purcell(n, 1e4)
        delta = optimal_detuning(params)
        seq = plan_fock(m_target, n, 0.01 * delta, delta, 0.02)
        basis = build_basis(n, n, n)  # complete symmetric sector
        initial = basis_state(basis, 0, 0, "g")
        traj = run_sequence(seq, initial, params)

        psi_full = oracle.evolve_nh_full(oracle.embed_state(initial), n, seq, params)
        projected = oracle.project_to_symmetric(basis, psi_full)
        dist = np.linalg.norm(projected.amplitudes - traj.final_state.amplitudes)
        assert dist < 1e-8

    def test_symmetric_sector_invariant(self):
        # a symmetric initial state stays exactly inside the sector
        n = 3
        params = PhysicalParams(n_atoms=n, gamma_star=0.01)
        basis = build_basis(n, n, n)
        seq = PulseSequence(
            (PulseSegment(omega_r=0.2, omega_anc=0.1, omega_c=0.05, delta_e=0.3, duration=7.0),),
            ("raman",),
        )
        psi_full = oracle.evolve_nh_full(
            oracle.embed_state(basis_state(basis, 0, 0, "g")), n, seq, params
        )
        inside = oracle.project_to_symmetric(basis, psi_full)
        assert np.linalg.norm(psi_full) ** 2 - inside.norm**2 < 1e-12


class TestMasterEquation:
    def test_trace_preserved(self):
        n = 2
        params = PhysicalParams(n_atoms=n, gamma_star=0.05)
        seq = PulseSequence(
            (PulseSegment(omega_r=0.3, omega_anc=0.2, omega_c=0.1, delta_e=0.2, duration=20.0),),
            ("raman",),
        )
        res = oracle.full_space_oracle(n, seq, params)
        assert np.trace(res.rho_me).real == pytest.approx(1.0, abs=1e-8)

    def test_master_fidelity_bounds_pure(self):
        n = 2
        params = PhysicalParams.from_purcell(n, 50)
        delta = optimal_detuning(params)
        seq = plan_fock(1, n, 0.3 * delta, delta, 0.1)
        res = oracle.full_space_oracle(n, seq, params)
        basis = build_basis(n, n, n)
        target = oracle.embed_state(TargetSuperposition.fock(1).state_vector(basis))
        assert res.fidelity_master(target) >= res.fidelity_pure(target) - 1e-9

    def test_jump_branch_gives_strict_inequality(self):
        # superradiant decay repopulates the ground state only via jumps
        n = 2
        params = PhysicalParams(n_atoms=n, gamma_star=0.01)
        basis = build_basis(n, n, n)
        initial = oracle.embed_state(basis_state(basis, 0, 1, "g"))
        seq = PulseSequence((PulseSegment(duration=30.0),), ("ancilla-flip",))
        res = oracle.full_space_oracle(n, seq, params, initial=initial)
        ground = oracle.embed_state(basis_state(basis, 0, 0, "g"))
        assert res.fidelity_pure(ground) < 1e-6
        assert res.fidelity_master(ground) > 0.5

    def test_dark_state_preserved_without_drives(self):
        n = 3
        params = PhysicalParams(n_atoms=n, gamma_star=1e-12)
        basis = build_basis(n, n, n)
        d1 = oracle.embed_state(TargetSuperposition.fock(1).state_vector(basis))
        seq = PulseSequence((PulseSegment(duration=50.0),), ("ancilla-flip",))
        rho = oracle.evolve_master_equation(np.outer(d1, d1.conj()), n, seq, params)
        assert np.vdot(d1, rho @ d1).real == pytest.approx(1.0, abs=1e-8)

    def test_rejects_large_n(self):
        params = PhysicalParams(n_atoms=5, gamma_star=0.01)
        with pytest.raises(ValueError):
            oracle.full_space_oracle(5, PulseSequence((), ()), params)
