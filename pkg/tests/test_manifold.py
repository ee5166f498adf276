import math

import numpy as np
import pytest

from riemopt.core.exceptions import (
    AntipodalOrOutOfDomain,
    BaseMismatch,
    DimensionMismatch,
    NotOnManifold,
    NotTangent
)
from riemopt.models.manifold import (
    Euclidean,
    Point,
    RetractionKind,
    Sphere,
    Tangent,
    make_manifold
)


def test_projection_examples(projective_sphere, e1, e2):
    x = projective_sphere.point(e1)
    assert np.allclose(
        projective_sphere.project_tangent(x, e1).vec, 0.0
    ), 'Проекция нормали к сфере должна давать нулевой вектор.'
    assert np.allclose(
        projective_sphere.project_tangent(x, e2).vec, e2
    ), 'Касательный вектор не должен меняться при проекции.'
    diagonal = projective_sphere.point(
        np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    )
    assert np.allclose(
        projective_sphere.project_tangent(diagonal, e1).vec,
        [0.5, -0.5, 0.0]
    ), 'Проекция должна вычисляться как v - <x, v>x.'


def test_point_rejects_off_manifold(projective_sphere):
    with pytest.raises(NotOnManifold):
        projective_sphere.point([1.1, 0.0, 0.0])
    point = projective_sphere.point([1.0 + 1e-9, 0.0, 0.0])
    assert np.linalg.norm(point.coords) == pytest.approx(1.0, abs=1e-15), (
        'Точка в пределах допуска должна перенормироваться.'
    )


def test_point_is_read_only(e1):
    point = Point(e1)
    with pytest.raises(ValueError):
        point.coords[0] = 2.0


def test_dimension_mismatch(projective_sphere):
    with pytest.raises(DimensionMismatch):
        projective_sphere.point([1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        Sphere(0)


def test_tangent_rejects_normal_component(projective_sphere, e1):
    x = projective_sphere.point(e1)
    with pytest.raises(NotTangent):
        projective_sphere.tangent(x, [0.5, 1.0, 0.0])


def test_tangent_arithmetic_requires_same_base(projective_sphere, e1, e2, e3):
    x = projective_sphere.point(e1)
    y = projective_sphere.point(e2)
    eta = projective_sphere.tangent(x, e3)
    zeta = projective_sphere.tangent(y, e3)
    with pytest.raises(BaseMismatch):
        eta + zeta
    with pytest.raises(BaseMismatch):
        eta.inner(zeta)
    assert np.allclose((eta + 2.0 * eta).vec, 3.0 * e3), (
        'Векторы с общей точкой привязки должны складываться.'
    )


@pytest.mark.parametrize('kind', list(RetractionKind))
def test_retract_zero_is_identity(kind, rng):
    sphere = Sphere(6, kind)
    x = sphere.random_point(rng)
    assert sphere.retract(x, sphere.zero(x)) == x, (
        'R_x(0) должна возвращать x без изменений.'
    )


def test_retraction_examples(projective_sphere, exponential_sphere, e1, e2):
    x = projective_sphere.point(e1)
    moved = projective_sphere.retract(x, projective_sphere.tangent(x, e2))
    assert np.allclose(moved.coords, (e1 + e2) / math.sqrt(2)), (
        'Проективная ретракция должна нормировать x + η.'
    )
    quarter = exponential_sphere.retract(
        x, exponential_sphere.tangent(x, 0.5 * math.pi * e2)
    )
    assert np.allclose(quarter.coords, e2), (
        'Экспоненциальная ретракция на π/2 должна давать четверть '
        'большой окружности.'
    )


def test_inverse_retraction_examples(
        projective_sphere,
        exponential_sphere,
        e1,
        e2
):
    x = projective_sphere.point(e1)
    assert projective_sphere.inverse_retract(x, x).norm() == 0.0, (
        'R_x^{-1}(x) должна быть нулевым вектором.'
    )
    diagonal = projective_sphere.point((e1 + e2) / math.sqrt(2))
    assert np.allclose(
        projective_sphere.inverse_retract(x, diagonal).vec, e2
    ), 'Обратная проективная ретракция должна давать e₂.'
    y = exponential_sphere.point(e2)
    assert np.allclose(
        exponential_sphere.inverse_retract(x, y).vec, 0.5 * math.pi * e2
    ), 'Обратная экспоненциальная ретракция должна давать (π/2)e₂.'


def test_inverse_retraction_round_trip(sphere, rng):
    for _ in range(20):
        x = sphere.random_point(rng)
        eta = sphere.random_tangent(x, rng, scale=rng.uniform(0.0, 1.0))
        y = sphere.retract(x, eta)
        assert np.allclose(
            sphere.inverse_retract(x, y).vec, eta.vec, atol=1e-10
        ), 'R_x^{-1}(R_x(η)) должна возвращать η.'


def test_inverse_retraction_out_of_domain(
        projective_sphere,
        exponential_sphere,
        e1,
        e2
):
    x = projective_sphere.point(e1)
    with pytest.raises(AntipodalOrOutOfDomain):
        projective_sphere.inverse_retract(x, projective_sphere.point(e2))
    with pytest.raises(AntipodalOrOutOfDomain):
        exponential_sphere.inverse_retract(
            x, exponential_sphere.point(-e1)
        )


def test_differential_example(projective_sphere, e1, e2, e3):
    x = projective_sphere.point(e1)
    eta = projective_sphere.tangent(x, e2)
    zeta = projective_sphere.tangent(x, e3)
    assert np.allclose(
        projective_sphere.d_retract(x, eta, zeta).vec, e3 / math.sqrt(2)
    ), 'DR_x(η)[ζ] должен равняться (I - yyᵀ)ζ / ‖x + η‖.'


def test_differential_matches_finite_difference(sphere, rng):
    step = 1e-6
    for _ in range(10):
        x = sphere.random_point(rng)
        eta = sphere.random_tangent(x, rng, scale=0.5)
        zeta = sphere.random_tangent(x, rng)
        forward = sphere.retract(x, eta + step * zeta).coords
        backward = sphere.retract(x, eta - step * zeta).coords
        numeric = (forward - backward) / (2 * step)
        analytic = sphere.d_retract(x, eta, zeta).vec
        assert np.linalg.norm(analytic - numeric) <= 1e-6 * max(
            1.0, np.linalg.norm(analytic)
        ), 'Дифференциал ретракции должен совпадать с центральной разностью.'


def test_transports_at_zero_are_identity(sphere, rng):
    x = sphere.random_point(rng)
    zero = sphere.zero(x)
    xi = sphere.random_tangent(x, rng)
    for transport in (
            sphere.d_retract,
            sphere.d_retract_adjoint,
            sphere.d_retract_adjoint_inverse,
            sphere.d_retract_inverse,
    ):
        assert np.allclose(transport(x, zero, xi).vec, xi.vec), (
            f'{transport.__name__} при η = 0 должен быть тождественным.'
        )


def test_adjoint_pairing_and_inverses(sphere, rng):
    for _ in range(20):
        x = sphere.random_point(rng)
        eta = sphere.random_tangent(x, rng, scale=rng.uniform(0.0, 1.0))
        y = sphere.retract(x, eta)
        zeta = sphere.random_tangent(x, rng)
        xi = sphere.random_tangent(y, rng)
        left = sphere.d_retract(x, eta, zeta, y=y).inner(xi)
        right = zeta.inner(sphere.d_retract_adjoint(x, eta, xi, y=y))
        assert left == pytest.approx(right, abs=1e-12), (
            'Должно выполняться <DR[ζ], ξ> = <ζ, DR^*[ξ]>.'
        )
        inverse = sphere.d_retract_adjoint_inverse(x, eta, zeta, y=y)
        assert np.allclose(
            sphere.d_retract_adjoint(x, eta, inverse, y=y).vec,
            zeta.vec,
            atol=1e-10,
        ), 'DR^* ∘ (DR^*)^{-1} должен быть тождественным.'
        assert np.allclose(
            inverse.vec,
            sphere.solve_adjoint_inverse(x, eta, zeta, y=y).vec,
            atol=1e-9,
        ), 'Замкнутая формула должна совпадать с решением системы.'
        pulled = sphere.d_retract_inverse(x, eta, xi, y=y)
        assert np.allclose(
            sphere.d_retract(x, eta, pulled, y=y).vec, xi.vec, atol=1e-10
        ), 'DR ∘ DR^{-1} должен быть тождественным.'


def test_tangent_basis_is_orthonormal(sphere, rng):
    x = sphere.random_point(rng)
    basis = sphere.tangent_basis(x)
    assert basis.shape == (sphere.dim, sphere.tangent_dim)
    assert np.allclose(basis.T @ basis, np.eye(sphere.tangent_dim)), (
        'Базис касательного пространства должен быть ортонормированным.'
    )
    assert np.allclose(x.coords @ basis, 0.0), (
        'Базис должен быть ортогонален нормали x.'
    )


def test_euclidean_transports_are_identity(euclidean, rng):
    x = euclidean.random_point(rng)
    eta = euclidean.random_tangent(x, rng)
    y = euclidean.retract(x, eta)
    assert np.allclose(y.coords, x.coords + eta.vec)
    zeta = euclidean.random_tangent(x, rng)
    moved = euclidean.d_retract_adjoint_inverse(x, eta, zeta)
    assert moved.same_base(y) and np.array_equal(moved.vec, zeta.vec), (
        'В R^n перенос должен только менять точку привязки.'
    )
    assert euclidean.normal_vector(x) is None


def test_make_manifold():
    assert isinstance(make_manifold('sphere', 4), Sphere)
    assert isinstance(make_manifold('euclidean', 4), Euclidean)
    with pytest.raises(KeyError):
        make_manifold('torus', 4)


def test_tangent_division_and_negation(projective_sphere, e1, e2):
    x = projective_sphere.point(e1)
    eta = Tangent(x, 2.0 * e2)
    assert np.allclose((-eta / 2.0).vec, -e2)
