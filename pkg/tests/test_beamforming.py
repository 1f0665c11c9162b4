import numpy as np
import pytest

from irsmimo import (
    EvaluationInput,
    HybridBeamformers,
    SystemDims,
    fully_digital,
    project_hybrid,
    r_max,
    relaxed_beamformers,
    spectral_efficiency,
    water_filling,
)

DIMS = SystemDims(n_t=16, n_r=8, m=4, n_t_rf=4, n_r_rf=4, n_s=3)


def random_channel(n_r, n_t, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))


class TestWaterFilling:
    def test_worked_example(self):
        # gains 4 and 1, unit noise, unit budget: level 9/8, powers 7/8 and 1/8
        alloc = water_filling(np.array([4.0, 1.0]), 1.0, 1.0, 2)
        assert abs(alloc.water_level - 1.125) < 1e-9
        np.testing.assert_allclose(alloc.per_stream_power, [0.875, 0.125],
                                   rtol=0, atol=1e-9)

    def test_budget_met(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            lam = rng.uniform(0.01, 20.0, 4)
            p = float(rng.uniform(0.1, 50.0))
            nv = float(rng.uniform(0.05, 5.0))
            alloc = water_filling(lam, p, nv, 4)
            assert abs(alloc.per_stream_power.sum() - p) < 1e-9
            assert np.all(alloc.per_stream_power >= 0)

    def test_kkt_conditions(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            lam = np.sort(rng.uniform(0.01, 10.0, 4))[::-1]
            nv = float(rng.uniform(0.1, 2.0))
            alloc = water_filling(lam, 1.0, nv, 4)
            mu = alloc.water_level
            for p_l, l in zip(alloc.per_stream_power, lam):
                if p_l > 1e-9:
                    assert abs(p_l - (mu - nv / l)) < 1e-9
                else:
                    assert mu <= nv / l + 1e-9

    def test_high_budget_near_equal_split(self):
        alloc = water_filling(np.array([4.0, 1.0]), 1e6, 1.0, 2)
        p = alloc.per_stream_power
        assert abs(p[0] - p[1]) / p.max() < 1e-5

    def test_weak_stream_shut_off(self):
        # a tiny budget goes entirely to the strongest mode
        alloc = water_filling(np.array([10.0, 0.01]), 0.05, 1.0, 2)
        assert alloc.per_stream_power[1] == 0.0
        assert abs(alloc.per_stream_power[0] - 0.05) < 1e-9

    def test_zero_gains_excluded(self):
        alloc = water_filling(np.array([5.0, 0.0, 0.0]), 2.0, 1.0, 3)
        assert alloc.per_stream_power[1] == 0.0
        assert alloc.per_stream_power[2] == 0.0
        assert abs(alloc.per_stream_power.sum() - 2.0) < 1e-9

    def test_truncation_to_top_streams(self):
        # five gains offered, two streams allowed: only the top two count
        a = water_filling(np.array([1.0, 9.0, 4.0, 0.5, 0.2]), 3.0, 1.0, 2)
        b = water_filling(np.array([9.0, 4.0]), 3.0, 1.0, 2)
        np.testing.assert_allclose(a.per_stream_power, b.per_stream_power,
                                   rtol=0, atol=1e-9)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            water_filling(np.array([1.0]), 0.0, 1.0, 1)
        with pytest.raises(ValueError):
            water_filling(np.array([1.0]), 1.0, 0.0, 1)
        with pytest.raises(ValueError):
            water_filling(np.array([1.0]), 1.0, 1.0, 0)
        with pytest.raises(ValueError):
            water_filling(np.array([0.0, 0.0]), 1.0, 1.0, 2)
        with pytest.raises(ValueError):
            water_filling(np.array([-1.0, 2.0]), 1.0, 1.0, 2)


class TestRMax:
    def test_scalar_closed_form(self):
        h = np.array([[0.7 - 0.4j]])
        lam = abs(h[0, 0]) ** 2
        expect = np.log2(1.0 + 2.5 * lam / 0.3)
        assert abs(r_max(h, 2.5, 0.3, 1) - expect) < 1e-12

    def test_diagonal_closed_form(self):
        # orthogonal modes decouple; compare against a scalar water-fill
        s = np.array([3.0, 2.0, 1.0])
        h = np.zeros((4, 5))
        h[:3, :3] = np.diag(s)
        alloc = water_filling(s ** 2, 4.0, 0.5, 3)
        expect = np.sum(np.log2(1.0 + alloc.per_stream_power * s ** 2 / 0.5))
        assert abs(r_max(h, 4.0, 0.5, 3) - expect) < 1e-12

    def test_monotone_in_power(self):
        h = random_channel(4, 6, 3)
        rates = [r_max(h, p, 1.0, 3) for p in (0.5, 1.0, 2.0, 4.0)]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_zero_channel_rejected(self):
        with pytest.raises(ValueError):
            r_max(np.zeros((3, 3)), 1.0, 1.0, 2)


class TestRelaxedBeamformers:
    def test_attains_r_max(self):
        for seed in range(5):
            h = random_channel(8, 16, seed)
            bf = relaxed_beamformers(h, DIMS, 2.0, 0.4)
            assert bf.kind == "relaxed"
            se = spectral_efficiency(EvaluationInput(h, bf, 0.4))
            cap = r_max(h, 2.0, 0.4, DIMS.n_s)
            assert abs(se - cap) < 1e-9 * cap

    def test_orthonormal_analog_stages(self):
        h = random_channel(8, 16, 9)
        bf = relaxed_beamformers(h, DIMS, 1.0, 1.0)
        np.testing.assert_allclose(bf.w_rf.conj().T @ bf.w_rf, np.eye(4),
                                   rtol=0, atol=1e-12)
        np.testing.assert_allclose(bf.f_rf.conj().T @ bf.f_rf, np.eye(4),
                                   rtol=0, atol=1e-12)

    def test_transmit_power_equals_budget(self):
        h = random_channel(8, 16, 10)
        bf = relaxed_beamformers(h, DIMS, 3.7, 0.2)
        assert abs(np.linalg.norm(bf.f_rf @ bf.f_bb, "fro") ** 2 - 3.7) < 1e-9

    def test_diagonal_channel_selects_basis_columns(self):
        h = np.zeros((4, 6))
        h[0, 0], h[1, 1], h[2, 2], h[3, 3] = 4.0, 3.0, 2.0, 1.0
        dims = SystemDims(n_t=6, n_r=4, m=4, n_t_rf=2, n_r_rf=2, n_s=2)
        bf = relaxed_beamformers(h, dims, 1.0, 1.0)
        np.testing.assert_allclose(bf.w_rf, np.eye(4)[:, :2], rtol=0, atol=1e-12)
        np.testing.assert_allclose(bf.f_rf, np.eye(6)[:, :2], rtol=0, atol=1e-12)

    def test_deterministic(self):
        h = random_channel(8, 16, 11)
        a = relaxed_beamformers(h, DIMS, 1.0, 1.0)
        b = relaxed_beamformers(h, DIMS, 1.0, 1.0)
        np.testing.assert_array_equal(a.w_rf, b.w_rf)
        np.testing.assert_array_equal(a.f_bb, b.f_bb)

    def test_rf_chain_bounds_enforced(self):
        h = random_channel(4, 4, 0)
        dims = SystemDims(n_t=16, n_r=16, m=4, n_t_rf=8, n_r_rf=8, n_s=2)
        with pytest.raises(ValueError):
            relaxed_beamformers(h, dims, 1.0, 1.0)


class TestProjectHybrid:
    def make_relaxed(self, seed=0):
        return relaxed_beamformers(random_channel(8, 16, seed), DIMS, 2.0, 0.5)

    def test_constant_modulus(self):
        bf = project_hybrid(self.make_relaxed(), 2.0)
        assert bf.kind == "projected"
        np.testing.assert_allclose(np.abs(bf.w_rf), 1 / np.sqrt(8), rtol=0, atol=1e-15)
        np.testing.assert_allclose(np.abs(bf.f_rf), 1 / np.sqrt(16), rtol=0, atol=1e-15)

    def test_power_rescaled_exactly(self):
        bf = project_hybrid(self.make_relaxed(1), 2.0)
        assert abs(np.linalg.norm(bf.f_rf @ bf.f_bb, "fro") ** 2 - 2.0) < 1e-9 * 2.0

    def test_digital_combiner_untouched(self):
        relaxed = self.make_relaxed(2)
        bf = project_hybrid(relaxed, 2.0)
        np.testing.assert_array_equal(bf.w_bb, relaxed.w_bb)

    def test_analog_phases_preserved(self):
        relaxed = self.make_relaxed(3)
        bf = project_hybrid(relaxed, 2.0)
        mask = np.abs(relaxed.w_rf) > 1e-12
        np.testing.assert_allclose(np.angle(bf.w_rf)[mask],
                                   np.angle(relaxed.w_rf)[mask], rtol=0, atol=1e-12)

    def test_rate_bounded_by_capacity(self):
        for seed in range(5):
            h = random_channel(8, 16, 20 + seed)
            bf = project_hybrid(relaxed_beamformers(h, DIMS, 2.0, 0.5), 2.0)
            se = spectral_efficiency(EvaluationInput(h, bf, 0.5))
            assert se <= r_max(h, 2.0, 0.5, DIMS.n_s) + 1e-9

    def test_rejects_already_projected(self):
        bf = project_hybrid(self.make_relaxed(4), 2.0)
        with pytest.raises(ValueError):
            project_hybrid(bf, 2.0)


class TestFullyDigital:
    def test_attains_r_max(self):
        for seed in range(5):
            h = random_channel(6, 10, 30 + seed)
            bf = fully_digital(h, 1.5, 0.3, 3)
            se = spectral_efficiency(EvaluationInput(h, bf, 0.3))
            cap = r_max(h, 1.5, 0.3, 3)
            assert abs(se - cap) < 1e-9 * cap

    def test_full_rf_chain_count(self):
        h = random_channel(6, 10, 40)
        bf = fully_digital(h, 1.0, 1.0, 2)
        assert bf.w_rf.shape == (6, 6)
        assert bf.f_rf.shape == (10, 10)
        assert bf.n_s == 2

    def test_zero_channel_rejected(self):
        with pytest.raises(ValueError):
            fully_digital(np.zeros((4, 4)), 1.0, 1.0, 2)


class TestHybridBeamformersValidation:
    def test_projected_modulus_enforced(self):
        with pytest.raises(ValueError):
            HybridBeamformers(
                w_rf=np.ones((4, 2), dtype=complex),  # wrong modulus for n_r=4
                w_bb=np.eye(2, dtype=complex),
                f_rf=np.full((4, 2), 0.5, dtype=complex),
                f_bb=np.eye(2, dtype=complex),
                kind="projected", p_tx=1.0)

    def test_projected_power_enforced(self):
        with pytest.raises(ValueError):
            HybridBeamformers(
                w_rf=np.full((4, 2), 0.5, dtype=complex),
                w_bb=np.eye(2, dtype=complex),
                f_rf=np.full((4, 2), 0.5, dtype=complex),
                f_bb=np.eye(2, dtype=complex),  # power != 1
                kind="projected", p_tx=1.0)

    def test_shape_consistency_enforced(self):
        with pytest.raises(ValueError):
            HybridBeamformers(
                w_rf=np.ones((4, 2), dtype=complex),
                w_bb=np.ones((3, 2), dtype=complex),
                f_rf=np.ones((4, 2), dtype=complex),
                f_bb=np.ones((2, 2), dtype=complex),
                kind="relaxed", p_tx=1.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            HybridBeamformers(
                w_rf=np.ones((2, 1), dtype=complex), w_bb=np.ones((1, 1), dtype=complex),
                f_rf=np.ones((2, 1), dtype=complex), f_bb=np.ones((1, 1), dtype=complex),
                kind="analog", p_tx=1.0)
