"""Numba and numpy kernel backends must agree on the same problems."""

import numpy as np
import pytest

from conftest import make_blobs, make_blobs_with_noise
from drscreen._kernels import numpy_backend

try:
    from drscreen._kernels import numba_backend
except ImportError:  # pragma: no cover
    numba_backend = None

needs_numba = pytest.mark.skipif(numba_backend is None,
                                 reason="numba not importable")


@needs_numba
class TestBackendAgreement:
    def test_jacobi_same_decomposition(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 25))
            m = rng.standard_normal((n, n))
            a = m @ m.T
            tol = 1e-12 * max(1.0, float(np.linalg.norm(a)))
            d1, v1, s1 = numba_backend.jacobi_eigh(a, tol, 100)
            d2, v2, s2 = numpy_backend.jacobi_eigh(a, tol, 100)
            assert s1 >= 0 and s2 >= 0
            scale = 1.0 + np.max(np.abs(a))
            assert np.max(np.abs(v1 @ np.diag(d1) @ v1.T - a)) <= 1e-8 * scale
            assert np.max(np.abs(v2 @ np.diag(d2) @ v2.T - a)) <= 1e-8 * scale
            assert np.allclose(np.sort(d1), np.sort(d2), atol=1e-10 * scale)

    def test_hinge_cd_same_trajectory(self, rng):
        # identical permutation stream => near-identical iterates
        ds = make_blobs(rng, 25, 4)
        w = rng.uniform(0.5, 1.5, size=25)
        lam = 2.0
        xck = np.ascontiguousarray(ds.xcheck)
        tol = 1e-11
        a1, v1 = np.zeros(25), np.zeros(ds.d)
        g1, e1, s1 = numba_backend.hinge_l2_cd(xck, w, lam, a1, v1, 7, 100000, tol)
        a2, v2 = np.zeros(25), np.zeros(ds.d)
        g2, e2, s2 = numpy_backend.hinge_l2_cd(xck, w, lam, a2, v2, 7, 100000, tol)
        assert s1 == s2 == numpy_backend.STATUS_OK
        assert g1 <= tol and g2 <= tol
        assert np.max(np.abs(a1 - a2)) <= 1e-9
        assert np.max(np.abs(v1 - v2)) <= 1e-9

    def test_sqhinge_cd_same_solution(self, rng):
        ds = make_blobs_with_noise(rng, 24, 2, 4)
        w = rng.uniform(0.5, 1.5, size=24)
        lam = 3.0
        xck = np.ascontiguousarray(ds.xcheck)
        tol = 1e-11
        b1, m1 = np.zeros(ds.d), np.zeros(24)
        g1, e1, s1 = numba_backend.sqhinge_l1_cd(xck, w, lam, b1, m1, 100000,
                                                 tol, 1e-10)
        b2, m2 = np.zeros(ds.d), np.zeros(24)
        g2, e2, s2 = numpy_backend.sqhinge_l1_cd(xck, w, lam, b2, m2, 100000,
                                                 tol, 1e-10)
        assert s1 == s2 == numpy_backend.STATUS_OK
        assert np.max(np.abs(b1 - b2)) <= 1e-9
        assert (b1 == 0.0).tolist() == (b2 == 0.0).tolist()

    def test_shuffle_streams_identical(self):
        o1 = np.arange(17)
        o2 = np.arange(17)
        s1 = numba_backend._shuffle(o1, np.uint64(999))
        s2 = numpy_backend._shuffle(o2, 999)
        assert int(s1) == s2
        assert np.array_equal(o1, o2)
