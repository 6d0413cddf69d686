import math

import numpy as np
import pytest

from oracles import step_zero_energy_count
from magspec.channel import MeshConfig
from magspec.field import FieldSpec, flux_profile
from magspec.potential import constant, gaussian, step, tilde
from magspec.spectrum import (SpectrumSummary, channel_range, min_channel, negative_spectrum, riesz_mean,
                              semiclassical_constant, weyl_ratio)

MESH = MeshConfig(1024, "graded", 2.0)


def _summary(vals):
    return SpectrumSummary({0: np.asarray(vals, dtype=float)}, {}, (0, 0), {}, MESH, 1e-10, 1e-9, False)


class TestConstants:
    def test_sigma_one(self):
        assert semiclassical_constant(1.0) == pytest.approx(1 / (8 * math.pi))

    def test_sigma_zero(self):
        assert semiclassical_constant(0.0) == pytest.approx(1 / (4 * math.pi))

    def test_sigma_three_halves(self):
        assert semiclassical_constant(1.5) == pytest.approx(1 / (10 * math.pi))

    @pytest.mark.parametrize("bound, m", [(0, 0), (-1, 0), (1, 1), (1.0001, 2), (9, 3), (36, 6), (35.9, 6)])
    def test_min_channel(self, bound, m):
        assert min_channel(bound) == m


class TestChannelRange:
    def test_zero(self):
        assert channel_range(None, tilde(constant(0.0))) == (0, 0)

    def test_gamma_one(self):
        assert channel_range(None, tilde(constant(9.0)), 1.0) == (-3, 3)

    def test_gamma_quarter(self):
        assert channel_range(None, tilde(constant(9.0)), 0.25) == (-3, 6)

    def test_gamma_domain(self):
        with pytest.raises(ValueError):
            channel_range(None, tilde(constant(9.0)), 1.5)


class TestRiesz:
    def test_empty(self):
        assert riesz_mean(_summary([]), 0.7) == 0.0

    def test_sigma_one(self):
        assert riesz_mean(_summary([-4.0, -1.0]), 1.0) == pytest.approx(5.0)

    def test_sigma_half(self):
        assert riesz_mean(_summary([-4.0, -1.0]), 0.5) == pytest.approx(3.0)

    def test_count(self):
        assert riesz_mean(_summary([-4.0, -1.0]), 0.0) == 2.0


class TestNegativeSpectrum:
    def test_no_potential(self):
        ss = negative_spectrum(flux_profile(FieldSpec(1, 2)), tilde(constant(0.0)), MESH)
        assert ss.count == 0 and ss.per_channel == {}

    @pytest.mark.parametrize("V0", [10.0, 30.0, 50.0, 120.0, 260.0])
    def test_channel_counts_match_zero_energy_oracle(self, V0):
        ss = negative_spectrum(None, tilde(step(V0, 0.5)), MeshConfig(2048, "uniform"))
        lo, hi = ss.m_range
        for m in range(lo, hi + 1):
            assert len(ss.per_channel.get(m, [])) == step_zero_energy_count(V0, 0.5, m), m

    def test_symmetric_channels_without_field(self):
        ss = negative_spectrum(None, tilde(step(120.0, 0.6)), MESH)
        for m, vals in ss.per_channel.items():
            np.testing.assert_allclose(ss.per_channel[-m], vals, atol=1e-9)

    def test_truncation_loses_nothing(self):
        fp = flux_profile(FieldSpec(1, 1.5))
        tp = tilde(gaussian(60.0, 0.5))
        base = negative_spectrum(fp, tp, MESH)
        padded = negative_spectrum(fp, tp, MESH, pad=10)
        assert padded.count == base.count
        np.testing.assert_allclose(padded.eigenvalues(), base.eigenvalues())

    def test_threads_deterministic(self):
        fp = flux_profile(FieldSpec(5, 2))
        tp = tilde(step(25.0, 0.5))
        a = negative_spectrum(fp, tp, MESH, workers=1)
        b = negative_spectrum(fp, tp, MESH, workers=4)
        assert a.to_dict() == b.to_dict()

    def test_field_raises_energies(self):
        # the diamagnetic effect: switching on B never lowers the count here
        tp = tilde(step(80.0, 0.5))
        free = negative_spectrum(None, tp, MESH)
        mag = negative_spectrum(flux_profile(FieldSpec(1, 2)), tp, MESH)
        assert mag.eigenvalues()[0] >= free.eigenvalues()[0]

    def test_ambiguous_band(self):
        ss = negative_spectrum(None, tilde(step(25.0, 0.5)), MESH, count_eps=1e3)
        assert ss.count == 0 and ss.count_nonpositive >= 1

    def test_csv_rows(self):
        ss = negative_spectrum(None, tilde(step(120.0, 0.5)), MESH)
        rows = ss.csv_rows()
        assert len(rows) == ss.count
        assert all(k >= 1 and lam < 0 for _, k, lam in rows)


class TestWeyl:
    def test_increasing_toward_one(self):
        tp = tilde(constant(1.0))
        ratios = [weyl_ratio(tp, 1.0, lam, MeshConfig(1024, "uniform")) for lam in (1e2, 1e3, 3e3)]
        assert ratios[0] < ratios[1] < ratios[2] < 1.0

    def test_two_term_asymptotics(self):
        # boundary correction: ratio ~ 1 - 8 / (3 sqrt(lam)) for the unit disk
        lam = 3e3
        r = weyl_ratio(tilde(constant(1.0)), 1.0, lam, MeshConfig(2048, "uniform"))
        assert r == pytest.approx(1 - 8 / (3 * math.sqrt(lam)), abs=5e-3)

    def test_rejects_angular_potential(self):
        with pytest.raises(ValueError):
            weyl_ratio(tilde(constant(1.0, b=0.3)), 1.0, 10.0, MESH)
