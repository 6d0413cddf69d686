import numpy as np
import pytest

from oracles import bessel_zero_squared
from magspec.channel import (ChannelFactory, MeshConfig, assemble, build_mesh, comparison_gap, comparison_matrix,
                             effective_potential, lowest_eigenvalue, negative_eigs)
from magspec.errors import MeshUnsuitable
from magspec.field import FieldSpec, channel_radii, flux_profile
from magspec.numerics import eigs_below
from magspec.potential import constant, step, tilde

ZERO = tilde(constant(0.0))


class TestMesh:
    def test_three_uniform_nodes(self):
        np.testing.assert_allclose(build_mesh(3).nodes, [0.25, 0.5, 0.75])

    def test_sixteen_uniform(self):
        r = build_mesh(16).nodes
        assert r[0] > 0 and r[-1] < 1 and np.all(np.diff(r) > 0)

    def test_graded_boundary_share(self):
        r = build_mesh(1024, "graded", 2.0).nodes
        assert np.mean(1 - r < 1 / 64) >= 0.25

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            build_mesh(10, "chebyshev")

    def test_refined(self):
        assert MeshConfig(1024).refined().n == 2048


class TestEffectivePotential:
    def test_m0_free(self):
        assert effective_potential(0, None, ZERO, 0.5) == pytest.approx(-1.0)

    def test_m1_free(self):
        assert effective_potential(1, None, ZERO, 0.5) == pytest.approx(3.0)

    def test_vanishes_at_r1(self):
        fp = flux_profile(FieldSpec(1, 2))
        r1 = channel_radii(fp, 1).r_m
        assert effective_potential(1, fp, ZERO, r1) == pytest.approx(0.0, abs=1e-10)

    def test_matrix_diagonal_identity(self):
        fp = flux_profile(FieldSpec(1, 1.5))
        tp = tilde(step(7.0, 0.4))
        cm = assemble(2, fp, tp, build_mesh(256, "graded"))
        np.testing.assert_allclose(cm.effective, effective_potential(2, fp, tp, cm.nodes), rtol=1e-12)


class TestBessel:
    @pytest.mark.parametrize("m", [0, 1, 2, -3])
    def test_free_disk(self, m):
        cm = assemble(m, None, ZERO, build_mesh(4096, "uniform"))
        ev = eigs_below(cm.matrix, 1.2 * bessel_zero_squared(abs(m), 3), 1e-10)[:3]
        ref = [bessel_zero_squared(abs(m), k) for k in (1, 2, 3)]
        np.testing.assert_allclose(ev, ref, rtol=1e-5)

    def test_second_order_convergence(self):
        ref = bessel_zero_squared(0, 1)
        errs = [abs(lowest_eigenvalue(assemble(0, None, ZERO, build_mesh(n))) - ref) for n in (256, 512, 1024)]
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders > 1.8)

    def test_graded_mesh_converges(self):
        ref = bessel_zero_squared(1, 1)
        got = lowest_eigenvalue(assemble(1, None, ZERO, build_mesh(4096, "graded")))
        assert got == pytest.approx(ref, rel=1e-4)

    def test_constant_shift(self):
        mesh = build_mesh(512)
        a = eigs_below(assemble(0, None, ZERO, mesh).matrix, 200.0, 1e-11)
        b = eigs_below(assemble(0, None, tilde(constant(3.5)), mesh).matrix, 200.0 - 3.5, 1e-11)
        np.testing.assert_allclose(b, a - 3.5, atol=1e-9)


class TestNegativeEigs:
    def test_empty_without_potential(self):
        fp = flux_profile(FieldSpec(1, 2))
        for m in (-3, 0, 1, 5):
            assert negative_eigs(assemble(m, fp, ZERO, build_mesh(1024, "graded"))).size == 0

    def test_deep_well_has_bound_state(self):
        assert negative_eigs(assemble(0, None, tilde(step(100.0, 0.5)), build_mesh(1024))).size >= 1

    def test_count_monotone_in_depth(self):
        mesh = build_mesh(1024)
        counts = [negative_eigs(assemble(0, None, tilde(step(v, 0.5)), mesh)).size for v in (5, 20, 60, 120, 250)]
        assert counts == sorted(counts)


class TestMeshSuitability:
    def test_uniform_rejected_for_strong_field(self):
        with pytest.raises(MeshUnsuitable):
            assemble(0, flux_profile(FieldSpec(1, 1)), ZERO, build_mesh(512))

    def test_weak_field_uniform_ok(self):
        assemble(0, flux_profile(FieldSpec(1, 0.5)), ZERO, build_mesh(512))

    def test_too_coarse(self):
        with pytest.raises(MeshUnsuitable):
            assemble(0, None, ZERO, build_mesh(8))


class TestComparison:
    def test_identical_operators(self):
        mat = comparison_matrix(0, None, ZERO, build_mesh(256), 1.0)
        assert np.all(mat.diag == 0) and np.all(mat.offdiag == 0)
        assert comparison_gap(0, None, ZERO, build_mesh(256), 1.0, tol=1e-12) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("m", [0, -1, -4])
    def test_nonpositive_channels(self, m):
        fp = flux_profile(FieldSpec(1, 2))
        mesh = build_mesh(512, "graded")
        mat = comparison_matrix(m, fp, ZERO, mesh, 1.0)
        assert np.all(mat.offdiag == 0)
        assert comparison_gap(m, fp, ZERO, mesh, 1.0) >= 0.0

    def test_ledger_gamma_m3(self):
        from magspec.bounds import build_ledger
        fp = flux_profile(FieldSpec(1, 2))
        tp = tilde(step(25.0, 0.5))
        gamma = build_ledger(fp, tp).gamma
        assert comparison_gap(3, fp, tp, build_mesh(4096, "graded"), gamma) >= -1e-8

    def test_potential_cancels(self):
        fp = flux_profile(FieldSpec(2, 1.5))
        mesh = build_mesh(256, "graded")
        a = comparison_matrix(2, fp, ZERO, mesh, 0.3)
        b = comparison_matrix(2, fp, tilde(step(40.0, 0.7)), mesh, 0.3)
        np.testing.assert_array_equal(a.diag, b.diag)

    def test_gamma_range(self):
        with pytest.raises(ValueError):
            ChannelFactory(None, ZERO, build_mesh(64)).comparison(0, 0.0)
