import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as npoly

from integrax import kernels
from integrax.kernels import as_mults, as_roots

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")

mults = st.lists(st.integers(1, 4), min_size=1, max_size=5)


def _roots(rng, k):
    return as_roots(rng.normal(size=k) + 1j * rng.normal(size=k))


def _finite_difference(f, z, i, h=1e-7):
    dz = np.zeros_like(z)
    dz[i] = h
    return (f(z + dz) - f(z - dz)) / (2 * h)


class TestNumpyKernels:
    def test_poly_from_roots(self):
        c = kernels.np_poly_from_roots(as_roots([1, -1]), as_mults([2, 1]))
        assert np.allclose(c, [1, -1, -1, 1])

    def test_shabat_residual_of_star(self):
        # x^n with black roots at the n-th roots of unity
        n = 4
        black = as_roots(np.exp(2j * np.pi * np.arange(n) / n))
        res, _ = kernels.np_shabat_system(as_roots([0]), as_mults([n]), black, as_mults([1] * n), 1.0 + 0j)
        assert np.max(np.abs(res)) < 1e-12

    def test_shabat_jacobian_by_differences(self):
        rng = np.random.default_rng(1)
        alpha, beta = as_mults([2, 1, 1]), as_mults([1, 1, 2])
        white, black = _roots(rng, 3), _roots(rng, 3)
        z = np.r_[white, black, 0.7 + 0.2j]

        def res(z):
            return kernels.np_shabat_system(z[:3], alpha, z[3:6], beta, z[6])[0]

        _, jac = kernels.np_shabat_system(white, alpha, black, beta, z[6])
        for i in range(7):
            assert np.allclose(jac[:, i], _finite_difference(res, z, i), atol=1e-5)

    def test_conservative_jacobian_by_differences(self):
        rng = np.random.default_rng(2)
        gamma = as_mults([2, 1, 3])
        crit = _roots(rng, 3)

        def res(z):
            return kernels.np_conservative_system(z, gamma, 0.4)[0]

        _, jac = kernels.np_conservative_system(crit, gamma, 0.4)
        for i in range(3):
            assert np.allclose(jac[:, i], _finite_difference(res, crit, i), atol=1e-5)

    def test_conservative_residual_direct(self):
        crit, gamma = as_roots([0.5, -1]), as_mults([1, 2])
        res, _ = kernels.np_conservative_system(crit, gamma, 2.0)
        C = npoly.polyint(2.0 * npoly.polyfromroots([0.5, -1, -1]))
        assert np.allclose(res, npoly.polyval(crit, C) - crit)


@needs_numba
class TestBackendsAgree:
    @settings(max_examples=40)
    @given(mults, st.integers(0, 10_000))
    def test_poly_from_roots(self, m, seed):
        rng = np.random.default_rng(seed)
        roots = _roots(rng, len(m))
        assert np.allclose(kernels.jit_poly_from_roots(roots, as_mults(m)), kernels.np_poly_from_roots(roots, as_mults(m)))

    @settings(max_examples=40)
    @given(st.integers(0, 10_000), st.integers(1, 8))
    def test_polyval(self, seed, deg):
        rng = np.random.default_rng(seed)
        coeffs, x = _roots(rng, deg + 1), _roots(rng, 5)
        assert np.allclose(kernels.jit_polyval(coeffs, x), kernels.np_polyval(coeffs, x))

    @settings(max_examples=30)
    @given(mults, st.integers(0, 10_000))
    def test_shabat_system(self, alpha, seed):
        rng = np.random.default_rng(seed)
        n = sum(alpha)
        beta = [1] * n  # any black data of the same degree
        white, black = _roots(rng, len(alpha)), _roots(rng, n)
        c = complex(rng.normal(), rng.normal())
        r1, j1 = kernels.jit_shabat_system(white, as_mults(alpha), black, as_mults(beta), c)
        r2, j2 = kernels.np_shabat_system(white, as_mults(alpha), black, as_mults(beta), c)
        assert np.allclose(r1, r2) and np.allclose(j1, j2)

    @settings(max_examples=30)
    @given(mults, st.integers(0, 10_000))
    def test_conservative_system(self, gamma, seed):
        rng = np.random.default_rng(seed)
        crit = _roots(rng, len(gamma))
        scale = float(rng.uniform(0.1, 2))
        r1, j1 = kernels.jit_conservative_system(crit, as_mults(gamma), scale)
        r2, j2 = kernels.np_conservative_system(crit, as_mults(gamma), scale)
        assert np.allclose(r1, r2) and np.allclose(j1, j2)


def _backend_in_subprocess(flag):
    env = dict(os.environ, INTEGRAX_DISABLE_NUMBA=flag)
    code = "from integrax import kernels; print(kernels.BACKEND)"
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.strip()


def test_env_flag_forces_numpy():
    assert _backend_in_subprocess("1") == "numpy"


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess("0") == "numba"


def test_solvers_agree_across_backends():
    code = (
        "import json; from integrax.drawfuns import shabat_solve; from integrax.trees import decode;"
        "w = shabat_solve(decode('w(b(w,w),b,b(w))'), seed=1);"
        "print(json.dumps([[z.real, z.imag] for z in w.coeffs()]))"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, INTEGRAX_DISABLE_NUMBA=flag)
        run = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(np.array(json.loads(run.stdout)))
    assert np.allclose(outs[0], outs[1], atol=1e-9)
