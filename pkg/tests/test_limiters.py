import numpy as np
import pytest

from crkdg import _kernels as K
from crkdg.errors import ConfigurationError
from crkdg.limiters import (Limiter, LimiterConfig, apply_minmod_limiter_2d, apply_weno_limiter_1d,
                            detect_troubled_cells)
from crkdg.mesh import build_interval_mesh, build_rect_mesh
from crkdg.physics import BoundaryCondition, Burgers, Euler, LinearAdvection
from crkdg.spatial import DGSpace

SCALAR = LinearAdvection((1.0,))


def _space(n, k, a=0.0, b=1.0, periodic=False):
    return DGSpace(build_interval_mesh(a, b, n, periodic=periodic), k)


def test_modified_minmod_kernel():
    a1 = np.array([1.0, -1.0, 1.0, 0.2, 3.0])
    a2 = np.array([2.0, -0.5, -1.0, 5.0, 2.0])
    a3 = np.array([3.0, -2.0, 1.0, 5.0, 1.0])
    np.testing.assert_array_equal(K.modified_minmod(a1, a2, a3, 0.0), [1.0, -0.5, 0.0, 0.2, 1.0])
    # below the bound the first argument passes through
    np.testing.assert_array_equal(K.modified_minmod(a1, a2, a3, 1.5), [1.0, -1.0, 1.0, 0.2, 1.0])


def test_config_validation():
    with pytest.raises(ConfigurationError):
        LimiterConfig("superbee")
    with pytest.raises(ConfigurationError):
        LimiterConfig("tvb_minmod", M=-1.0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_linear_field_not_flagged(k):
    sp = _space(20, k)
    u = sp.project(lambda x: 3.0 * x[..., 0] - 1.0)
    assert not detect_troubled_cells(sp, SCALAR, u, M=0.0).any()


@pytest.mark.parametrize("k", [1, 2])
def test_step_flags_both_jump_neighbours(k):
    n = 20
    sp = _space(n, k)
    u = np.zeros((n, k + 1, 1))
    u[10:, 0, 0] = 1.0 / sp.basis.mean_factor
    # the two cells touching the jump carry the rise of the discrete profile
    u[9:11, 1, 0] = 0.2
    flags = detect_troubled_cells(sp, SCALAR, u, M=0.0)
    assert set(np.flatnonzero(flags)) == {9, 10}
    # a large enough TVB bound exempts them
    assert not detect_troubled_cells(sp, SCALAR, u, M=1e3).any()


def test_piecewise_constant_step_not_flagged():
    # with all interface deviations zero, minmod returns them unchanged
    sp = _space(20, 1)
    u = sp.project(lambda x: (x[..., 0] > 0.5).astype(float))
    assert not detect_troubled_cells(sp, SCALAR, u, M=0.0).any()


def test_k0_never_flags():
    sp = _space(10, 0)
    u = sp.project(lambda x: (x[..., 0] > 0.5).astype(float))
    assert not detect_troubled_cells(sp, SCALAR, u, M=0.0).any()


def test_smooth_sine_flags_vanish_under_refinement():
    counts = []
    for n in (80, 160, 320):
        sp = _space(n, 2, 0.0, 2 * np.pi, periodic=True)
        u = sp.project(lambda x: np.sin(x[..., 0]))
        counts.append(int(detect_troubled_cells(sp, SCALAR, u, M=1.0).sum()))
    assert counts[0] <= 4
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == 0


def test_characteristic_detection_on_euler_step():
    n = 40
    sp = _space(n, 1)
    law = Euler(1)
    left = law.to_conserved(np.array(1.0), [np.array(0.0)], np.array(1.0))
    right = law.to_conserved(np.array(0.125), [np.array(0.0)], np.array(0.1))
    u = np.zeros((n, 2, 3))
    u[:20, 0] = left / sp.basis.mean_factor
    u[20:, 0] = right / sp.basis.mean_factor
    u[19:21, 1] = 0.1 * (right - left)
    flags = detect_troubled_cells(sp, law, u, M=0.0, characteristic=True)
    assert set(np.flatnonzero(flags)) == {19, 20}


# -- WENO ---------------------------------------------------------------------------
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("periodic", [True, False])
def test_weno_preserves_means_and_unflagged_cells(rng, k, periodic):
    sp = _space(16, k, periodic=periodic)
    u = rng.normal(size=(16, k + 1, 1))
    flags = rng.random(16) < 0.5
    flags[0] = flags[-1] = True
    out = apply_weno_limiter_1d(sp, SCALAR, u, flags)
    assert np.max(np.abs(sp.cell_means(out) - sp.cell_means(u))) <= 1e-14
    np.testing.assert_array_equal(out[~flags], u[~flags])
    assert np.all(np.isfinite(out))


def test_weno_leaves_smooth_quadratic_nearly_unchanged():
    errs = []
    for n in (20, 40, 80):
        sp = _space(n, 2)
        u = sp.project(lambda x: 1.0 + x[..., 0] - 2.0 * x[..., 0] ** 2)
        flags = np.ones(n, bool)
        out = apply_weno_limiter_1d(sp, SCALAR, u, flags)
        errs.append(np.max(np.abs(out - u)[1:-1]))
    # weights approach the linear weights, which mix in exact copies of the same quadratic
    assert errs[-1] < 1e-6
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_weno_characteristic_mean_preservation(rng):
    sp = _space(12, 2, periodic=True)
    law = Euler(1)
    n = 12
    means = law.to_conserved(rng.uniform(0.8, 1.2, n), [rng.normal(0, 0.3, n)], rng.uniform(0.8, 1.2, n))
    u = np.zeros((n, 3, 3))
    u[:, 0, :] = means / sp.basis.mean_factor
    u[:, 1:, :] = 0.05 * rng.normal(size=(n, 2, 3))
    flags = np.ones(n, bool)
    out = apply_weno_limiter_1d(sp, law, u, flags, LimiterConfig("tvb_weno", characteristic=True))
    assert np.max(np.abs(sp.total(out) - sp.total(u))) <= 1e-14


def test_weno_rejected_in_2d():
    sp = DGSpace(build_rect_mesh((0, 1), (0, 1), 4, 4), 1)
    with pytest.raises(ConfigurationError):
        Limiter(sp, SCALAR, LimiterConfig("tvb_weno"))


# -- 2D minmod ------------------------------------------------------------------------
def _rect_space(k, n=6, periodic=(False, False)):
    return DGSpace(build_rect_mesh((0.0, 1.0), (0.0, 1.0), n, n, periodic=periodic), k)


@pytest.mark.parametrize("k", [1, 2])
def test_minmod_2d_unflagged_identity_and_idempotence(rng, k):
    sp = _rect_space(k)
    u = rng.normal(size=(36, sp.n_modes, 1))
    none = apply_minmod_limiter_2d(sp, SCALAR, u, np.zeros(36, bool))
    np.testing.assert_array_equal(none, u)
    flags = np.ones(36, bool)
    once = apply_minmod_limiter_2d(sp, SCALAR, u, flags)
    twice = apply_minmod_limiter_2d(sp, SCALAR, once, flags)
    np.testing.assert_array_equal(twice, once)
    np.testing.assert_array_equal(sp.cell_means(once), sp.cell_means(u))
    assert np.all(once[:, 3:] == 0)


def test_minmod_2d_idempotent_for_euler(rng):
    sp = _rect_space(2, periodic=(True, True))
    law = Euler(2)
    n = 36
    means = law.to_conserved(rng.uniform(0.8, 1.2, n), [rng.normal(0, 0.3, n), rng.normal(0, 0.3, n)],
                             rng.uniform(0.8, 1.2, n))
    u = np.zeros((n, sp.n_modes, 4))
    u[:, 0, :] = means / sp.basis.mean_factor
    u[:, 1:, :] = 0.05 * rng.normal(size=(n, sp.n_modes - 1, 4))
    flags = np.ones(n, bool)
    once = apply_minmod_limiter_2d(sp, law, u, flags)
    np.testing.assert_array_equal(apply_minmod_limiter_2d(sp, law, once, flags), once)


def test_minmod_2d_slope_selection():
    sp = _rect_space(1, n=3)
    lim = Limiter(sp, SCALAR, LimiterConfig("tvb_minmod", 0.0))
    a = lim.slope_scale
    h = 1.0 / 3
    # means increasing by h in x, flat in y
    u = sp.project(lambda x: x[..., 0])
    centre = 4  # middle cell of the 3x3 grid
    flags = np.zeros(9, bool)
    flags[centre] = True
    # own x-slope smaller than both (equal) mean differences: unchanged
    v = u.copy()
    v[centre, 1, 0] = 0.5 * h / a[0]
    out = apply_minmod_limiter_2d(sp, SCALAR, v, flags)
    assert out[centre, 1, 0] == pytest.approx(0.5 * h / a[0], rel=1e-14)
    # own x-slope against the mean differences: zero
    v[centre, 1, 0] = -0.5 * h / a[0]
    out = apply_minmod_limiter_2d(sp, SCALAR, v, flags)
    assert out[centre, 1, 0] == 0.0
    # y-slope with flat neighbours in y: zero
    v[centre, 2, 0] = 0.3
    out = apply_minmod_limiter_2d(sp, SCALAR, v, flags)
    assert out[centre, 2, 0] == 0.0


def test_limiter_callable_counts_and_none_kind(rng):
    sp = _space(20, 2, periodic=True)
    u = rng.normal(size=(20, 3, 1))
    off = Limiter(sp, Burgers(), LimiterConfig())
    assert off(u) is u and off.last_flagged == 0
    on = Limiter(sp, Burgers(), LimiterConfig("tvb_minmod", 0.0))
    out = on(u)
    assert on.last_flagged == int(on.detect(u).sum()) > 0
    np.testing.assert_array_equal(sp.cell_means(out), sp.cell_means(u))


def test_wall_neighbour_is_mirrored_cell():
    sp = _space(5, 1)
    law = Euler(1)
    means = law.to_conserved(np.linspace(1.0, 1.4, 5), [np.full(5, 0.5)], np.ones(5))
    walls = {"left": BoundaryCondition("reflective"), "right": BoundaryCondition("outflow")}
    fwd, bwd = Limiter(sp, law, LimiterConfig("tvb_minmod", 0.0), walls)._mean_differences(means, 0)
    # across the wall only the normal momentum jumps
    np.testing.assert_allclose(bwd[0], [0.0, 2 * means[0, 1], 0.0])
    # outflow side keeps the one-sided difference
    np.testing.assert_array_equal(fwd[-1], bwd[-1])
    _, plain = Limiter(sp, law, LimiterConfig("tvb_minmod", 0.0))._mean_differences(means, 0)
    np.testing.assert_array_equal(plain[0], fwd[0])
