import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crkdg.basis import build_basis, evaluate_field, gauss_rule, l2_project, tensor_rule
from crkdg.errors import NumericError, ParameterError


def test_gauss_one_point():
    r = gauss_rule(1)
    assert r.points.tolist() == [0.0]
    assert r.weights.tolist() == [2.0]


def test_gauss_two_points():
    r = gauss_rule(2)
    np.testing.assert_allclose(np.sort(r.points), [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(r.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_three_points_x4():
    r = gauss_rule(3)
    assert abs(np.sum(r.weights * r.points**4) - 0.4) <= 1e-15


@pytest.mark.parametrize("n", [0, 21, 2.5])
def test_gauss_out_of_range(n):
    with pytest.raises(ParameterError):
        gauss_rule(n)


@pytest.mark.parametrize("n", range(1, 21))
def test_gauss_exactness_and_weights(n):
    r = gauss_rule(n)
    assert np.all(r.weights > 0)
    assert abs(r.weights.sum() - 2.0) <= 1e-14
    for p in range(0, 2 * n):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        assert abs(np.sum(r.weights * r.points**p) - exact) <= 1e-13


def test_tensor_rule_measure():
    assert abs(tensor_rule(4, 2).weights.sum() - 4.0) <= 1e-14


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("k", range(5))
def test_orthonormal(dim, k):
    b = build_basis(dim, k)
    expected = k + 1 if dim == 1 else (k + 1) * (k + 2) // 2
    assert b.n_modes == expected
    G = b.values.T @ (b.volume_rule.weights[:, None] * b.values)
    np.testing.assert_allclose(G, np.eye(expected), atol=1e-13)
    # constant mode first; mean = c0 * mean_factor
    np.testing.assert_allclose(b.values[:, 0], b.mean_factor)
    np.testing.assert_allclose(b.grads[:, :, 0], 0.0, atol=1e-14)


def test_gram_with_independent_rule():
    b = build_basis(1, 2)
    r = gauss_rule(5)
    V = b.evaluate(r.points)
    np.testing.assert_allclose(V.T @ (r.weights[:, None] * V), np.eye(3), atol=1e-13)


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("k", range(5))
def test_volume_rule_exact_to_2k_plus_2(dim, k):
    b = build_basis(dim, k)
    r = b.volume_rule
    for p in range(2 * k + 3):
        ex1 = 0.0 if p % 2 else 2.0 / (p + 1)
        if dim == 1:
            assert abs(np.sum(r.weights * r.points[:, 0] ** p) - ex1) <= 1e-13
        else:
            for q in range(2 * k + 3 - p):
                ex2 = 0.0 if q % 2 else 2.0 / (q + 1)
                got = np.sum(r.weights * r.points[:, 0] ** p * r.points[:, 1] ** q)
                assert abs(got - ex1 * ex2) <= 1e-13


def test_bad_degree():
    with pytest.raises(ParameterError):
        build_basis(1, 5)
    with pytest.raises(ParameterError):
        build_basis(3, 1)


def test_2d_linear_modes():
    b = build_basis(2, 1)
    assert b.n_modes == 3
    g = b.gradient(np.array([[0.3, -0.2], [0.9, 0.1]]))
    np.testing.assert_allclose(g[:, :, 0], 0.0)


def _ref_cell():
    return np.array([[0.0]]), np.array([[2.0]])


def test_project_x_squared_linear_mode_vanishes():
    b = build_basis(1, 1)
    c, w = _ref_cell()
    coef = l2_project(lambda x: x[..., 0] ** 2, c, w, b)[0, :, 0]
    assert abs(coef[1]) <= 1e-15
    assert abs(coef[0] * b.mean_factor - 1.0 / 3.0) <= 1e-15


def test_project_third_mode():
    b = build_basis(1, 2)
    c, w = _ref_cell()
    coef = l2_project(lambda x: b.evaluate(x.reshape(-1, 1))[:, 2].reshape(x.shape[:-1]), c, w, b)
    np.testing.assert_allclose(coef[0, :, 0], [0, 0, 1], atol=1e-13)


def test_project_sine_matches_seven_point_oracle():
    b = build_basis(1, 2)
    h, xc = 0.1, 0.05
    coef = l2_project(lambda x: np.sin(x[..., 0]), np.array([[xc]]), np.array([[h]]), b)[0, :, 0]
    r = gauss_rule(7)
    ref = b.evaluate(r.points).T @ (r.weights * np.sin(xc + 0.5 * h * r.points))
    np.testing.assert_allclose(coef, ref, atol=1e-12)


def test_project_non_finite():
    b = build_basis(1, 1)
    centers = np.array([[0.0], [1.0]])
    widths = np.ones((2, 1))
    with pytest.raises(NumericError) as exc:
        l2_project(lambda x: np.where(x[..., 0] > 0.5, np.nan, 0.0), centers, widths, b)
    assert exc.value.cell == 1


@settings(max_examples=30, deadline=None)
@given(k=st.integers(0, 4), dim=st.integers(1, 2), seed=st.integers(0, 2**31 - 1))
def test_projection_idempotent(k, dim, seed):
    b = build_basis(dim, k)
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(1, b.n_modes, 1))
    center = np.zeros((1, dim))
    width = np.full((1, dim), 2.0)

    def sampler(x):
        return evaluate_field(c, b, x[0])[0]

    back = l2_project(lambda x: sampler(x)[None], center, width, b)
    np.testing.assert_allclose(back, c, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(0, 3), seed=st.integers(0, 2**31 - 1))
def test_residual_orthogonality(k, seed):
    b = build_basis(1, k)
    poly = np.random.default_rng(seed).normal(size=k + 3)
    f = np.polynomial.polynomial.Polynomial(poly)
    c, w = _ref_cell()
    coef = l2_project(lambda x: f(x[..., 0]), c, w, b, n_points=k + 3)[0, :, 0]
    r = gauss_rule(k + 4)
    resid = f(r.points) - b.evaluate(r.points) @ coef
    np.testing.assert_allclose(b.evaluate(r.points).T @ (r.weights * resid), 0.0, atol=1e-12)


def test_scaling_covariance():
    b = build_basis(1, 3)
    a, bb = 0.4, 1.1

    def f(x):
        return np.exp(x) * np.cos(3 * x)

    phys = l2_project(lambda x: f(x[..., 0]), np.array([[(a + bb) / 2]]), np.array([[bb - a]]), b)
    ref = l2_project(lambda x: f(a + (bb - a) * (x[..., 0] + 1) / 2), np.zeros((1, 1)), np.full((1, 1), 2.0), b)
    np.testing.assert_allclose(phys, ref, atol=1e-13)
