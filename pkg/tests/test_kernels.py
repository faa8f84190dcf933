"""The compiled and pure-numpy kernels agree to round-off."""
import os
import subprocess
import sys

import numpy as np
import pytest

from crkdg import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def _euler_states(rng, n, dim):
    rho = rng.uniform(0.5, 2.0, n)
    vel = rng.normal(0, 1, (n, dim))
    p = rng.uniform(0.2, 3.0, n)
    E = p / 0.4 + 0.5 * rho * np.sum(vel ** 2, axis=1)
    return np.column_stack([rho, rho[:, None] * vel, E]).reshape(n // 10, 10, dim + 2)


@needs_numba
@pytest.mark.parametrize("dim", [1, 2])
def test_euler_kernels_agree(rng, dim):
    U = _euler_states(rng, 500, dim)
    for axis in range(dim):
        np.testing.assert_allclose(K.euler_flux_numba(U, axis, 1.4), K.euler_flux_numpy(U, axis, 1.4),
                                   rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(K.euler_speed_numba(U, axis, 1.4), K.euler_speed_numpy(U, axis, 1.4),
                                   rtol=1e-14)
    np.testing.assert_allclose(K.euler_extrema_numba(U, 1.4), K.euler_extrema_numpy(U, 1.4), rtol=1e-14)
    assert K.euler_first_bad_numba(U, 1.4) == K.euler_first_bad_numpy(U, 1.4) == -1
    bad = U.copy()
    bad[7, 3, 0] = -0.1
    bad[9, 1, -1] = np.nan
    assert K.euler_first_bad_numba(bad, 1.4) == K.euler_first_bad_numpy(bad, 1.4) == 73


@needs_numba
def test_minmod_kernels_agree(rng):
    a = rng.normal(size=(4, 1000))
    bound = np.abs(rng.normal(size=1000)) * 0.3
    np.testing.assert_array_equal(K.modified_minmod_numba(*a[:3], bound),
                                  K.modified_minmod_numpy(*a[:3], bound))
    np.testing.assert_array_equal(K.modified_minmod_numba(*a[:3], 0.0), K.modified_minmod_numpy(*a[:3], 0.0))


@needs_numba
@pytest.mark.parametrize("kind,g", [
    (K.SCALAR_BURGERS, lambda u: 0.5 * u * u),
    (K.SCALAR_BUCKLEY_LEVERETT, lambda u: 4 * u * u / (4 * u * u + (1 - u) ** 2)),
    (K.SCALAR_LINEAR, lambda u: 1.5 * u),
])
def test_godunov_kernels_agree(rng, kind, g):
    lo, hi = (0.0, 1.0) if kind == K.SCALAR_BUCKLEY_LEVERETT else (-2.0, 2.0)
    uL = rng.uniform(lo, hi, 300)
    uR = rng.uniform(lo, hi, 300)
    uR[:10] = uL[:10]
    np.testing.assert_allclose(K.godunov_numba(kind, 1.5, 1.0, uL, uR), K.godunov_numpy(g, uL, uR),
                               atol=1e-12)


def test_environment_switch_selects_numpy():
    code = "from crkdg import _kernels as K; print(K.USE_NUMBA, K.euler_flux is K.euler_flux_numpy)"
    env = dict(os.environ, CRKDG_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True"]
