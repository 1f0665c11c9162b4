import numpy as np
import pytest

from irsmimo import (
    ArrayGeometries,
    EffectiveChannel,
    ReflectionVector,
    ScenarioConfig,
    SystemDims,
    build_effective,
    gram_sum,
    sample_channel_triple,
    total_channel,
)

DIMS = SystemDims(n_t=8, n_r=4, m=16, n_t_rf=2, n_r_rf=2, n_s=2)


def make_triple(seed):
    geoms = ArrayGeometries.from_dims(DIMS)
    return sample_channel_triple(DIMS, geoms, ScenarioConfig(),
                                 np.random.default_rng(seed))


def unit_modulus(m, seed):
    rng = np.random.default_rng(seed)
    return ReflectionVector(
        entries=np.exp(1j * rng.uniform(0, 2 * np.pi, m)), kind="unit_modulus")


class TestBuildEffective:
    def test_blocks_match_diag_products(self):
        triple = make_triple(1)
        eff = build_effective(triple)
        assert eff.blocks.shape == (8, 4, 16)
        h_ir, h_ti = triple.h_ir.matrix, triple.h_ti.matrix
        for t in range(8):
            oracle = h_ir @ np.diag(h_ti[:, t])
            np.testing.assert_allclose(eff.blocks[t], oracle, rtol=0,
                                       atol=1e-15 * np.max(np.abs(h_ir)))

    def test_flat_stacking(self):
        triple = make_triple(2)
        eff = build_effective(triple)
        flat = eff.flat()
        assert flat.shape == (32, 16)
        np.testing.assert_array_equal(flat[4:8], eff.blocks[1])

    def test_blocks_validation(self):
        with pytest.raises(ValueError):
            EffectiveChannel(blocks=np.zeros((4, 16), dtype=complex))


class TestTotalChannel:
    def test_matches_three_matrix_form(self):
        triple = make_triple(3)
        eff = build_effective(triple)
        v = unit_modulus(16, 7)
        got = total_channel(triple.h_tr.matrix, eff, v)
        oracle = triple.h_tr.matrix + triple.h_ir.matrix @ np.diag(v.entries) \
            @ triple.h_ti.matrix
        scale = np.max(np.abs(oracle))
        np.testing.assert_allclose(got, oracle, rtol=0, atol=1e-12 * scale)

    def test_zero_reflection_leaves_direct_link(self):
        triple = make_triple(4)
        eff = build_effective(triple)
        v0 = ReflectionVector(entries=np.zeros(16, dtype=complex), kind="relaxed")
        np.testing.assert_array_equal(
            total_channel(triple.h_tr.matrix, eff, v0), triple.h_tr.matrix)

    def test_shape_mismatches_rejected(self):
        triple = make_triple(5)
        eff = build_effective(triple)
        with pytest.raises(ValueError):
            total_channel(triple.h_tr.matrix, eff, unit_modulus(8, 0))
        with pytest.raises(ValueError):
            total_channel(np.zeros((3, 8), dtype=complex), eff, unit_modulus(16, 0))


class TestGramSum:
    def test_matches_per_block_loop(self):
        triple = make_triple(6)
        eff = build_effective(triple)
        g = gram_sum(eff)
        oracle = sum(eff.blocks[t].conj().T @ eff.blocks[t] for t in range(eff.n_t))
        scale = np.max(np.abs(oracle))
        np.testing.assert_allclose(g, oracle, rtol=0, atol=1e-12 * scale)

    def test_hermitian_psd(self):
        eff = build_effective(make_triple(7))
        g = gram_sum(eff)
        np.testing.assert_array_equal(g, g.conj().T)
        evals = np.linalg.eigvalsh(g)
        assert evals.min() >= -1e-12 * max(evals.max(), 1e-300)

    def test_quadratic_form_equals_reflected_power(self):
        # v^H G v must equal ||H_IR diag(v) H_TI||_F^2 for any v
        triple = make_triple(8)
        eff = build_effective(triple)
        g = gram_sum(eff)
        for seed in range(5):
            v = unit_modulus(16, seed)
            quad = float(np.real(v.entries.conj() @ g @ v.entries))
            power = np.linalg.norm(
                triple.h_ir.matrix @ np.diag(v.entries) @ triple.h_ti.matrix) ** 2
            assert abs(quad - power) <= 1e-10 * max(power, 1e-300)


class TestReflectionVector:
    def test_unit_modulus_enforced(self):
        with pytest.raises(ValueError):
            ReflectionVector(entries=np.array([1.0, 0.5 + 0j]), kind="unit_modulus")

    def test_relaxed_unconstrained(self):
        ReflectionVector(entries=np.array([3.0 + 0j, 0.0]), kind="relaxed")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ReflectionVector(entries=np.ones(2, dtype=complex), kind="projected")

    def test_requires_vector(self):
        with pytest.raises(ValueError):
            ReflectionVector(entries=np.ones((2, 2), dtype=complex), kind="relaxed")

    def test_entries_readonly(self):
        v = unit_modulus(4, 0)
        with pytest.raises(ValueError):
            v.entries[0] = 0
