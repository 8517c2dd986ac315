import math

import numpy as np
import pytest

from dickesim import photonics as ph
from dickesim import TargetSuperposition


class TestFrequencyGrid:
    def test_single_photon_norm(self):
        for n_atoms in (3, 10, 100):
            grid = ph.build_grid(n_atoms, 2049)
            assert abs(grid.single_photon_norm() - 1.0) < 1e-6

    def test_symmetry_and_positive_weights(self):
        grid = ph.build_grid(10, 257)
        np.testing.assert_allclose(grid.detunings, -grid.detunings[::-1], atol=0)
        assert np.all(grid.weights > 0)

    def test_uniform_grid_truncation_loss(self):
        # the finite-span diagnostic grid loses the documented tail mass
        grid = ph.build_grid(10, 4097, span_halfwidths=50.0)
        loss = 1.0 - grid.single_photon_norm()
        expected = 1.0 - (2 / math.pi) * math.atan(50.0)
        assert loss == pytest.approx(expected, rel=1e-2)

    def test_refinement(self):
        grid = ph.build_grid(10, 257)
        fine = grid.refined()
        assert fine.n_points == 513

    def test_rejects_even_point_count(self):
        with pytest.raises(ValueError):
            ph.build_grid(10, 256)


class TestAmplitudes:
    def test_m1_exact_equals_hp(self):
        grid = ph.build_grid(10, 513)
        d = grid.detunings[:, None]
        np.testing.assert_array_equal(
            ph.amplitude_exact(d, 10), ph.amplitude_hp(d, 10)
        )

    def test_m1_peak_at_resonance(self):
        n = 10
        mag = abs(ph.amplitude_exact(np.array([0.0]), n))
        assert mag == pytest.approx(math.sqrt(n) / (0.5 * n))
        for d in (1.0, -3.0, 10.0):
            assert abs(ph.amplitude_exact(np.array([d]), n)) < mag

    def test_m2_matches_reference_formula(self):
        rng = np.random.default_rng(5)
        dets = rng.normal(scale=15.0, size=(41, 2))
        exact = ph.amplitude_exact(dets, 10)
        ref = ph.two_photon_reference(dets[:, 0], dets[:, 1], 10)
        np.testing.assert_allclose(exact, ref, atol=1e-12)

    def test_hp_factorization(self):
        d1, d2 = 1.3, -0.4
        prod = ph.amplitude_hp(np.array([d1]), 10) * ph.amplitude_hp(np.array([d2]), 10)
        joint = ph.amplitude_hp(np.array([d1, d2]), 10)
        assert joint == pytest.approx(math.sqrt(2) * prod)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_collective_ladder_linearization(self, m):
        rng = np.random.default_rng(m)
        dets = rng.normal(scale=10.0, size=(7, m))
        lin = ph.amplitude_exact_linearized(dets, 12)
        hp = ph.amplitude_hp(dets, 12)
        np.testing.assert_allclose(lin, hp, atol=1e-13)

    def test_permutation_symmetry(self):
        rng = np.random.default_rng(2)
        dets = rng.normal(scale=8.0, size=(9, 3))
        base = ph.amplitude_exact(dets, 10)
        for perm in ((1, 0, 2), (2, 1, 0), (1, 2, 0)):
            np.testing.assert_allclose(
                ph.amplitude_exact(dets[:, perm], 10), base, atol=1e-12
            )

    def test_rejects_too_many_photons(self):
        with pytest.raises(ValueError):
            ph.amplitude_exact(np.zeros(9), 20)
        with pytest.raises(ValueError):
            ph.amplitude_exact(np.zeros(3), 2)


class TestClosedFormOverlap:
    def test_m1_identity(self):
        for n in (2, 10, 500):
            assert ph.overlap_hp_closed(1, n).overlap == pytest.approx(1.0)

    def test_m2_n10_value(self):
        res = ph.overlap_hp_closed(2, 10)
        expected = 4 * (10 / 20) * (math.sqrt(90) / 19)
        assert res.overlap == pytest.approx(expected, abs=1e-15)
        assert res.deficit == pytest.approx(1.386e-3, abs=1e-6)

    def test_m2_n10_big_precision_oracle(self):
        # independent 50-digit evaluation of 1 - 2^2 (10/20)(sqrt(90)/19)
        from decimal import Decimal, getcontext

        getcontext().prec = 50
        deficit = 1 - Decimal(4) * (Decimal(10) / 20) * Decimal(90).sqrt() / 19
        assert ph.overlap_hp_closed(2, 10).deficit == pytest.approx(
            float(deficit), abs=1e-14
        )

    def test_leading_order_expansion(self):
        # exact small-deficit law: sum_r (r-1)^2 / (8 N^2) to leading order
        for m in (2, 3, 5):
            for n in (200, 1000):
                deficit = ph.overlap_hp_closed(m, n).deficit
                leading = sum((r - 1) ** 2 for r in range(1, m + 1)) / (8.0 * n**2)
                assert deficit == pytest.approx(leading, rel=5e-2)

    def test_series_anchor_order_of_magnitude(self):
        # the m^3/(20 N^2) series only anchors the order of magnitude: its
        # coefficient is not the expansion of the closed-form product
        for m in (2, 3, 5):
            for n in (50, 200):
                deficit = ph.overlap_hp_closed(m, n).deficit
                series = m**3 / (20.0 * n**2)
                assert series / 4 < deficit < series * 4

    def test_monotonicity(self):
        for n in (12, 40):
            deficits = [ph.overlap_hp_closed(m, n).deficit for m in range(1, n // 2)]
            assert all(b > a for a, b in zip(deficits, deficits[1:]))
        for m in (2, 3):
            vals = [ph.overlap_hp_closed(m, n).deficit for n in (10, 20, 40, 80)]
            assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rejects_m_above_n(self):
        with pytest.raises(ValueError):
            ph.overlap_hp_closed(11, 10)


class TestNumericOverlap:
    def test_m1_unity(self):
        grid = ph.build_grid(10, 513)
        assert ph.overlap_hp_numeric(1, 10, grid) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n_atoms", [10, 100])
    def test_m2_matches_closed_form(self, n_atoms):
        grid = ph.build_grid(n_atoms, 2049)
        numeric = ph.overlap_hp_numeric(2, n_atoms, grid)
        closed = ph.overlap_hp_closed(2, n_atoms).overlap
        assert numeric == pytest.approx(closed, abs=1e-4)

    def test_refine_check_passes_on_fine_grid(self):
        grid = ph.build_grid(10, 513)
        ph.overlap_hp_numeric(2, 10, grid, refine_check=True)

    def test_refine_check_rejects_coarse_grid(self):
        grid = ph.build_grid(10, 9, span_halfwidths=4.0)
        with pytest.raises(ValueError):
            ph.overlap_hp_numeric(2, 10, grid, refine_check=True, refine_tol=1e-6)

    def test_real_and_positive(self):
        grid = ph.build_grid(10, 513)
        val = ph.overlap_hp_numeric(2, 10, grid)
        assert val > 0


class TestGridNorms:
    @pytest.mark.parametrize("m,n_points", [(1, 4097), (2, 513), (3, 193)])
    def test_exact_amplitude_normalized(self, m, n_points):
        grid = ph.build_grid(10, n_points)
        assert abs(ph.grid_norm_squared(m, 10, grid) - 1.0) < 1e-4

    def test_hp_amplitude_normalized(self):
        grid = ph.build_grid(10, 513)
        assert abs(ph.grid_norm_squared(2, 10, grid, kind="hp") - 1.0) < 1e-5

    def test_two_photon_norm_at_default_resolution(self):
        grid = ph.build_grid(10)  # 4097 points
        assert abs(ph.grid_norm_squared(2, 10, grid) - 1.0) < 1e-6


class TestWavepacketAndSuperposition:
    def test_dense_tensor_shape(self):
        grid = ph.build_grid(10, 65)
        pack = ph.build_wavepacket(2, 10, grid)
        assert pack.amplitudes.shape == (65, 65)
        assert pack.norm_squared == pytest.approx(1.0, abs=1e-3)

    def test_sampler_for_large_m(self):
        grid = ph.build_grid(12, 65)
        pack = ph.build_wavepacket(4, 12, grid, dense_limit=3, compute_norm=False)
        assert pack.amplitudes is None
        val = pack.sample(np.zeros(4))
        assert np.isfinite(val)

    def test_vacuum_output(self):
        grid = ph.build_grid(10, 65)
        out = ph.superposition_output(TargetSuperposition((1.0,)), 10, grid)
        assert out.components == ()
        assert out.single_mode_fidelity == pytest.approx(1.0)

    def test_single_excitation_superposition_is_single_mode(self):
        grid = ph.build_grid(10, 65)
        out = ph.superposition_output(TargetSuperposition.phi(1), 10, grid)
        assert out.single_mode_fidelity == pytest.approx(1.0)

    def test_fock3_fidelity_matches_overlap(self):
        grid = ph.build_grid(100, 65)
        out = ph.superposition_output(TargetSuperposition.fock(3), 100, grid)
        assert out.single_mode_fidelity == pytest.approx(
            ph.overlap_hp_closed(3, 100).overlap
        )
        assert 0.99 < out.single_mode_fidelity < 1.0

    def test_emission_time_is_pure_phase(self):
        grid_t0 = ph.build_grid(10, 65)
        grid_t = ph.build_grid(10, 65, emission_time=2.5)
        pack_t0 = ph.build_wavepacket(2, 10, grid_t0, compute_norm=False)
        pack_t = ph.build_wavepacket(2, 10, grid_t, compute_norm=False)
        dets = np.array([[0.3, -1.2], [4.0, 4.0]])
        phase = np.exp(-1j * 2.5 * dets.sum(axis=-1))
        np.testing.assert_allclose(
            pack_t.sample(dets), phase * pack_t0.sample(dets), atol=1e-14
        )

    def test_component_weights(self):
        grid = ph.build_grid(10, 65)
        target = TargetSuperposition.phi(2)
        out = ph.superposition_output(target, 10, grid)
        assert len(out.components) == 1
        assert out.components[0].photons == 2
        assert out.components[0].weight == pytest.approx(1 / math.sqrt(2))
