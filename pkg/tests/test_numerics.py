import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate

from magspec.errors import NonConvergence
from magspec.numerics import (BACKENDS, SymTridiag, active_backend, bisect_increasing, count_below,
                              count_below_many, eig_range, eigs_below, gk15, integrate, lowest_eig, set_backend)
from magspec.numerics.quadrature import wynn_epsilon


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda x: np.ones_like(x), 0.0, 1.0, 1e-12) == pytest.approx(1.0, abs=1e-12)

    def test_log_singularity(self):
        assert integrate(lambda x: -np.log(x), 0.0, 1.0, 1e-10) == pytest.approx(1.0, abs=1e-10)

    def test_inverse_sqrt_endpoint(self):
        # int_0^1 x / sqrt(1 - x) dx = 4/3
        val = integrate(lambda x: x / np.sqrt(1 - x), 0.0, 1.0, 1e-10)
        assert val == pytest.approx(4.0 / 3.0, abs=1e-10)

    @pytest.mark.parametrize("f, exact", [
        (lambda x: x**-0.9, 10.0),
        (lambda x: (1 - x) ** -0.99, 100.0),
        (lambda x: np.abs(x - 0.3), 0.29),
    ])
    def test_algebraic_singularities(self, f, exact):
        assert integrate(f, 0.0, 1.0, 1e-10, points=(0.3,)) == pytest.approx(exact, rel=1e-10)

    def test_against_quadpack(self):
        f = lambda x: np.exp(-x) * np.sin(7 * x)  # noqa: E731
        ref, _ = sp_integrate.quad(f, 0.0, 3.0, epsabs=1e-14, epsrel=1e-14)
        assert integrate(f, 0.0, 3.0, 1e-12) == pytest.approx(ref, abs=1e-12)

    def test_return_error(self):
        val, err = integrate(np.cos, 0.0, 1.0, 1e-12, return_error=True)
        assert val == pytest.approx(math.sin(1.0), abs=1e-13)
        assert 0 <= err <= 1e-12

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValueError):
            integrate(np.exp, 1.0, 0.0)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_nonconvergence_raises(self):
        with pytest.raises(NonConvergence):
            integrate(lambda x: 1.0 / x, 0.0, 1.0, 1e-10, max_subdivisions=50)

    def test_gk15_exact_for_polynomials(self):
        val, err = gk15(lambda x: x**20, 0.0, 1.0)
        assert val == pytest.approx(1 / 21, rel=1e-14)

    def test_wynn_accelerates_geometric_series(self):
        partial = np.cumsum(0.5 ** np.arange(8))
        est, _ = wynn_epsilon(partial)
        assert est == pytest.approx(2.0, abs=1e-12)


class TestSturm:
    def test_two_by_two(self, backend):
        m = SymTridiag([2.0, 2.0], [-1.0])
        assert count_below(m, 2.0, backend) == 1
        assert eigs_below(m, 2.0, 1e-12, backend) == pytest.approx([1.0], abs=1e-12)

    def test_positive_diagonal(self, backend):
        assert count_below(SymTridiag([5.0, 5, 5], [0.0, 0]), 0.0, backend) == 0

    def test_zero_matrix(self, backend):
        vals = eigs_below(SymTridiag([0.0, 0, 0], [0.0, 0]), 1.0, 1e-12, backend)
        assert vals == pytest.approx([0, 0, 0], abs=1e-12)

    def test_random_median_count(self, rng, backend):
        d, e = rng.normal(size=20), rng.normal(size=19)
        m = SymTridiag(d, e)
        ev = np.linalg.eigvalsh(m.dense())
        tau = float(np.median(ev)) + 1e-9
        assert count_below(m, tau, backend) == int(np.sum(ev < tau))

    def test_fd_laplacian(self, backend):
        n, h = 999, 1e-3
        m = SymTridiag(np.full(n, 2 / h**2), np.full(n - 1, -1 / h**2))
        vals = eigs_below(m, 100.0, 1e-9, backend)
        k = np.arange(1, 4)
        assert vals.size == 3
        assert vals == pytest.approx((2 / h**2) * (1 - np.cos(k * np.pi * h)), rel=1e-10)
        assert vals == pytest.approx((k * np.pi) ** 2, rel=1e-3)

    def test_huge_dynamic_range(self, backend):
        # entries spanning 1e-2..1e24, as produced by strongly graded meshes
        n = 400
        d = np.geomspace(1e-2, 1e24, n)
        e = -0.4 * np.sqrt(d[:-1] * d[1:])
        m = SymTridiag(d, e)
        ref = np.linalg.eigvalsh(m.dense())
        got = eig_range(m, 0, 3, 1e-12, backend=backend)
        assert got == pytest.approx(ref[:3], rel=1e-8)

    def test_lowest_eig(self, backend):
        m = SymTridiag([3.0, 1.0, 4.0], [0.5, 0.2])
        assert lowest_eig(m, 1e-12) == pytest.approx(np.linalg.eigvalsh(m.dense())[0], abs=1e-11)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 40), st.integers(0, 2**32 - 1))
    def test_counts_match_dense(self, n, seed):
        r = np.random.default_rng(seed)
        m = SymTridiag(r.normal(size=n) * 10, r.normal(size=n - 1))
        ev = np.linalg.eigvalsh(m.dense())
        taus = np.sort(r.normal(size=5) * 10)
        expect = [int(np.sum(ev < t)) for t in taus]
        for name in BACKENDS:
            assert list(count_below_many(m, taus, name)) == expect

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 60), st.integers(0, 2**32 - 1))
    def test_backends_agree(self, n, seed):
        r = np.random.default_rng(seed)
        m = SymTridiag(r.normal(size=n), r.normal(size=n - 1))
        results = [eig_range(m, 0, n, 1e-12, backend=b) for b in sorted(BACKENDS)]
        for res in results[1:]:
            np.testing.assert_allclose(res, results[0], atol=1e-11)
        np.testing.assert_allclose(results[0], np.linalg.eigvalsh(m.dense()), atol=1e-10)


class TestSymTridiag:
    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            SymTridiag([1.0, 2.0], [1.0, 2.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SymTridiag([1.0, np.inf], [0.0])

    def test_read_only(self):
        m = SymTridiag([1.0, 2.0], [0.5])
        with pytest.raises(ValueError):
            m.diag[0] = 3.0

    def test_gershgorin_encloses_spectrum(self, rng):
        m = SymTridiag(rng.normal(size=30), rng.normal(size=29))
        lo, hi = m.gershgorin()
        ev = np.linalg.eigvalsh(m.dense())
        assert lo <= ev[0] and ev[-1] <= hi


def test_backend_switch():
    before = active_backend()
    try:
        set_backend("python")
        assert active_backend() == "python"
        with pytest.raises(ValueError):
            set_backend("fortran")
    finally:
        set_backend(before)


def test_bisect_increasing_brackets():
    targets = np.array([0.25, 1.0, 4.0])
    left, right = bisect_increasing(lambda x: x**2, targets, 0.0, 3.0, xtol=1e-13)
    assert np.all(left**2 <= targets) and np.all(right**2 >= targets)
    assert np.all(right - left <= 1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_backend_env_override(name):
    import os
    import subprocess
    import sys
    env = {**os.environ, "MAGSPEC_BACKEND": name}
    out = subprocess.run([sys.executable, "-c", "from magspec.numerics import active_backend; print(active_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == name


def test_backend_env_unknown():
    import os
    import subprocess
    import sys
    env = {**os.environ, "MAGSPEC_BACKEND": "fortran"}
    out = subprocess.run([sys.executable, "-c", "import magspec.numerics"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "MAGSPEC_BACKEND" in out.stderr
