import numpy as np
import pytest

from fixtures.problems import distance_objective, sphere_instance
from riemopt.core.exceptions import (
    InexactCriterionUnreachable,
    MaxIterExceeded,
    NonConvexDetected,
    OracleDimensionTooLarge
)
from riemopt.core.rng import make_generator
from riemopt.models.manifold import Euclidean, Sphere, Tangent
from riemopt.models.objective import (
    CompositeObjective,
    LeastSquaresTerm,
    make_l1
)
from riemopt.schemas.solver import (
    InnerSolverConfig,
    SimplexSolver,
    SliceSolver
)
from riemopt.services.minimax import SliceProblem, solve_minimax
from riemopt.services.subproblem import (
    SubproblemSolution,
    active_set,
    brute_force_oracle,
    component_values,
    kkt_residual_check,
    p_eval,
    psi,
    solve_proximal_mapping
)

ORACLE_SEEDS = range(20)


def solve_or_best(*args, **kwargs):
    try:
        return solve_minimax(*args, **kwargs)
    except MaxIterExceeded as error:
        return error.best


def test_psi_vanishes_at_zero(small_sphere_objective, rng):
    x = small_sphere_objective.manifold.random_point(rng)
    zero = small_sphere_objective.manifold.zero(x)
    assert psi(small_sphere_objective, x, zero) == 0.0
    assert p_eval(small_sphere_objective, x, zero, 3.0) == 0.0


def test_psi_matches_hand_assembled_components(rng):
    obj = sphere_instance(3, n=4)
    sphere = obj.manifold
    x = sphere.random_point(rng)
    eta = sphere.random_tangent(x, rng, scale=0.3)
    y = sphere.retract(x, eta)
    expected = max(
        obj.riemannian_grad_f(index, x).inner(eta) +
        obj.nonsmooth[index].value(y.coords) -
        obj.nonsmooth[index].value(x.coords)
        for index in range(obj.m)
    )
    assert psi(obj, x, eta) == pytest.approx(expected, abs=1e-14)


def test_psi_single_smooth_objective(euclidean_distance, rng):
    x = euclidean_distance.manifold.random_point(rng)
    eta = euclidean_distance.manifold.random_tangent(x, rng)
    grad = euclidean_distance.riemannian_grad_f(0, x)
    assert psi(euclidean_distance, x, eta) == pytest.approx(grad.inner(eta))


def test_p_eval_arithmetic(euclidean):
    x = euclidean.point(np.zeros(4))
    obj = CompositeObjective(euclidean, [(
        LeastSquaresTerm(np.eye(4), [1.0, 0.0, 0.0, 0.0]), make_l1(0.0)
    )])
    eta = Tangent(x, [1.0, 0.0, 0.0, 0.0])
    assert psi(obj, x, eta) == -1.0
    assert p_eval(obj, x, eta, 1.0) == -0.5
    with pytest.raises(ValueError):
        p_eval(obj, x, eta, 0.0)


def test_active_set_relative_tolerance():
    assert active_set(np.array([1.0, 1.0 - 1e-12, 0.5]), 1e-8) == (0, 1)
    assert active_set(np.array([-2.0, -3.0]), 1e-8) == (0,)


def test_minimax_single_smooth_term(projective_sphere, e1):
    y = projective_sphere.point(e1)
    w = Tangent(y, [0.0, 2.0, -1.0])
    result = solve_minimax(
        projective_sphere, y, [w], [make_l1(0.0)], 4.0, InnerSolverConfig()
    )
    assert np.allclose(result.xi.vec, -w.vec / 4.0), (
        'При m = 1 и g ≡ 0 решение должно быть -w/L̃.'
    )
    assert result.weights.tolist() == [1.0]


def test_minimax_opposed_gradients(projective_sphere, e1):
    y = projective_sphere.point(e1)
    w = Tangent(y, [0.0, 1.0, 0.5])
    result = solve_minimax(
        projective_sphere, y, [w, -w], [make_l1(0.0)] * 2, 1.0,
        InnerSolverConfig()
    )
    assert result.weights == pytest.approx([0.5, 0.5]), (
        'Симметрия должна давать λ = (½, ½).'
    )
    assert result.xi.norm() <= 1e-12


def test_mirror_ascent_three_objectives():
    space = Euclidean(3)
    y = space.point(np.zeros(3))
    linear = [
        Tangent(y, [1.0, 0.0, 0.0]),
        Tangent(y, [0.0, 2.0, 0.0]),
        Tangent(y, [0.0, 0.0, 1.0]),
    ]
    result = solve_minimax(
        space, y, linear, [make_l1(0.0)] * 3, 2.0, InnerSolverConfig()
    )
    assert result.weights == pytest.approx([4 / 9, 1 / 9, 4 / 9], abs=1e-4), (
        'Веса должны задавать точку минимальной нормы выпуклой оболочки.'
    )
    assert np.allclose(result.xi.vec, -np.array([4, 2, 4]) / 18, atol=1e-4)


def test_simplex_solvers_agree(rng):
    sphere = Sphere(4)
    y = sphere.random_point(rng)
    linear = [sphere.random_tangent(y, rng) for _ in range(2)]
    terms = [make_l1(0.3), make_l1(0.1)]
    config = InnerSolverConfig(
        tol_kkt=1e-7, slice_solver=SliceSolver.MULTIPLIER
    )
    bisection = solve_or_best(
        sphere, y, linear, terms, 2.0, config,
        simplex_solver=SimplexSolver.DUAL_BISECTION
    )
    mirror = solve_or_best(
        sphere, y, linear, terms, 2.0, config,
        simplex_solver=SimplexSolver.MIRROR_DESCENT
    )
    assert np.allclose(bisection.xi.vec, mirror.xi.vec, atol=1e-4), (
        'Бисекция и зеркальный подъём должны давать одно решение.'
    )


def test_slice_solvers_agree(rng):
    sphere = Sphere(5)
    y = sphere.random_point(rng)
    linear = [sphere.random_tangent(y, rng) for _ in range(2)]
    terms = [make_l1(0.2), make_l1(0.4)]
    results = [
        solve_or_best(
            sphere, y, linear, terms, 3.0,
            InnerSolverConfig(slice_solver=solver)
        )
        for solver in SliceSolver
    ]
    assert np.allclose(results[0].xi.vec, results[1].xi.vec, atol=1e-6), (
        'Расщепление и точный множитель должны решать одну задачу на срезе.'
    )


def test_minimax_iteration_limit_keeps_best(rng):
    sphere = Sphere(5)
    y = sphere.random_point(rng)
    linear = [sphere.random_tangent(y, rng) for _ in range(2)]
    with pytest.raises(MaxIterExceeded) as error:
        solve_minimax(
            sphere, y, linear, [make_l1(0.5)] * 2, 1.0,
            InnerSolverConfig(max_inner=1, slice_solver=SliceSolver.SPLITTING)
        )
    assert error.value.best is not None, (
        'Исключение должно нести лучшее найденное решение.'
    )


def test_euclidean_prox_gradient_step():
    target = np.array([1.0, -2.0, 0.5])
    obj = distance_objective(Euclidean(3), target)
    x = obj.manifold.point([0.5, 0.5, 0.5])
    solution = solve_proximal_mapping(obj, x, 2.0, InnerSolverConfig())
    assert np.allclose(solution.eta.vec, (target - x.coords) / 2.0), (
        'Шаг должен равняться -grad f / L̃.'
    )
    assert solution.converged
    assert kkt_residual_check(obj, x, solution, 2.0) <= 1e-10


def test_stationary_point_gives_zero_step():
    b = np.array([1.0, 2.0])
    space = Euclidean(2)
    obj = CompositeObjective(space, [
        (LeastSquaresTerm(np.eye(2), b), make_l1(0.0)),
        (LeastSquaresTerm(np.eye(2), -b), make_l1(0.0)),
    ])
    x = space.point(np.zeros(2))
    solution = solve_proximal_mapping(obj, x, 1.0, InnerSolverConfig())
    assert solution.eta.norm() == 0.0, (
        'В Парето-стационарной точке шаг должен быть нулевым.'
    )
    assert kkt_residual_check(obj, x, solution, 1.0) <= 1e-8


def test_degenerate_objective_shortcut(e1):
    sphere = Sphere(3)
    obj = distance_objective(sphere, np.zeros(3))
    x = sphere.point(e1)
    solution = solve_proximal_mapping(obj, x, 1.0, InnerSolverConfig())
    assert solution.inner_iters == 0 and solution.eta.is_zero()


def test_sphere_mapping_properties(small_sphere_objective, rng):
    obj = small_sphere_objective
    x = obj.manifold.random_point(rng)
    Ltilde = 2.0 * obj.lipschitz_hint
    solution = solve_proximal_mapping(
        obj, x, Ltilde, InnerSolverConfig(tol_kkt=1e-7)
    )
    assert solution.p_value <= 0.0
    assert all(
        later <= earlier
        for earlier, later in zip(solution.ell_trace, solution.ell_trace[1:])
    ), 'ℓ_x должна монотонно убывать по итерациям переноса.'
    assert solution.weights.min() >= 0.0
    assert solution.weights.sum() == pytest.approx(1.0)
    active = active_set(
        component_values(obj, x, solution.eta), 1e-8
    )
    assert set(np.flatnonzero(solution.weights > 0)) <= set(active), (
        'Положительные веса допустимы только на активных целях.'
    )


def test_slice_solvers_give_same_mapping(sphere_objective_n8, rng):
    obj = sphere_objective_n8
    x = obj.manifold.random_point(rng)
    Ltilde = 2.0 * obj.lipschitz_hint
    values = [
        solve_proximal_mapping(
            obj, x, Ltilde,
            InnerSolverConfig(tol_kkt=1e-7, slice_solver=solver)
        ).p_value
        for solver in SliceSolver
    ]
    assert values[0] == pytest.approx(values[1], abs=1e-8)


@pytest.mark.parametrize('seed', ORACLE_SEEDS)
def test_mapping_matches_grid_oracle(seed):
    obj = sphere_instance(seed)
    x = obj.manifold.random_point(make_generator(seed, 5))
    Ltilde = 2.0 * obj.lipschitz_hint
    solution = solve_proximal_mapping(
        obj, x, Ltilde, InnerSolverConfig(tol_kkt=1e-7)
    )
    oracle = brute_force_oracle(
        obj, x, Ltilde,
        grid_radius=solution.eta.norm() + 0.1,
        grid_step=1e-2,
    )
    assert not oracle.boundary_hit
    assert solution.p_value == pytest.approx(oracle.p_value, abs=1e-4), (
        'Итеративный решатель должен совпадать с переборным оракулом.'
    )


def test_oracle_recovers_gradient_step():
    target = np.array([0.3, -0.2, 0.1])
    obj = distance_objective(Euclidean(3), target)
    x = obj.manifold.point(np.zeros(3))
    oracle = brute_force_oracle(obj, x, 1.0, grid_radius=0.5, grid_step=0.05)
    assert np.linalg.norm(oracle.eta.vec - target) <= 0.05
    assert not oracle.boundary_hit


def test_oracle_reports_boundary():
    obj = distance_objective(Euclidean(2), [3.0, 0.0])
    x = obj.manifold.point(np.zeros(2))
    oracle = brute_force_oracle(obj, x, 1.0, grid_radius=0.5, grid_step=0.05)
    assert oracle.boundary_hit, (
        'Минимум вне шара перебора должен отмечаться выходом на границу.'
    )


def test_oracle_dimension_limit(rng):
    obj = distance_objective(Sphere(6), np.ones(6))
    x = obj.manifold.random_point(rng)
    with pytest.raises(OracleDimensionTooLarge):
        brute_force_oracle(obj, x, 1.0, grid_radius=0.1, grid_step=0.05)


def test_acceptance_stops_early(sphere_objective_n8, rng):
    obj = sphere_objective_n8
    x = obj.manifold.random_point(rng)
    solution = solve_proximal_mapping(
        obj, x, obj.lipschitz_hint, InnerSolverConfig(),
        accept=lambda candidate: True
    )
    assert solution.inner_iters == 1
    assert solution.accepted_early or solution.converged


def test_unreachable_acceptance_keeps_partial(sphere_objective_n8, rng):
    obj = sphere_objective_n8
    x = obj.manifold.random_point(rng)
    with pytest.raises(InexactCriterionUnreachable) as error:
        solve_proximal_mapping(
            obj, x, obj.lipschitz_hint, InnerSolverConfig(max_outer=1),
            accept=lambda candidate: False
        )
    assert error.value.partial.eta.norm() > 0.0


def test_bisection_request_with_three_targets_uses_mirror_ascent():
    space = Euclidean(3)
    y = space.point(np.zeros(3))
    linear = [
        Tangent(y, [1.0, 0.0, 0.0]),
        Tangent(y, [0.0, 2.0, 0.0]),
        Tangent(y, [0.0, 0.0, 1.0]),
    ]
    result = solve_minimax(
        space, y, linear, [make_l1(0.0)] * 3, 2.0,
        InnerSolverConfig(simplex_solver=SimplexSolver.DUAL_BISECTION)
    )
    assert result.weights == pytest.approx([4 / 9, 1 / 9, 4 / 9], abs=1e-4), (
        'При трёх активных целях бисекция должна уступать зеркальному '
        'подъёму.'
    )


def test_non_monotone_dual_derivative_detected(monkeypatch, e1):
    sphere = Sphere(3)
    y = sphere.point(e1)
    linear = [Tangent(y, [0.0, 1.0, 0.0]), Tangent(y, [0.0, -1.0, 0.0])]
    monkeypatch.setattr(
        SliceProblem, 'solve', lambda self, weights: np.array(weights)
    )

    def components(self, xi):
        share = xi[0]
        if share in (0.0, 1.0):
            return np.array([1.0 - share, share])
        return np.array([10.0, 0.0])

    monkeypatch.setattr(SliceProblem, 'components', components)
    with pytest.raises(NonConvexDetected):
        solve_minimax(
            sphere, y, linear, [make_l1(0.0)] * 2, 1.0,
            InnerSolverConfig(simplex_solver=SimplexSolver.DUAL_BISECTION)
        )


@pytest.mark.parametrize('seed', range(10))
def test_sphere_kkt_residual_bounded_by_gap(seed):
    obj = sphere_instance(seed, n=8, rows=6)
    x = obj.manifold.random_point(make_generator(seed, 13))
    Ltilde = 2.0 * obj.lipschitz_hint
    solution = solve_proximal_mapping(
        obj, x, Ltilde, InnerSolverConfig(tol_kkt=1e-7)
    )
    residual = kkt_residual_check(obj, x, solution, Ltilde)
    assert residual <= 10 * solution.duality_gap + 1e-10, (
        'Невязка KKT должна оцениваться разрывом решения.'
    )


@pytest.mark.parametrize('seed', range(3))
def test_zero_step_at_non_stationary_point_has_residual(seed):
    obj = sphere_instance(seed, n=8, rows=6)
    x = obj.manifold.random_point(make_generator(seed, 17))
    Ltilde = 2.0 * obj.lipschitz_hint
    solution = solve_proximal_mapping(obj, x, Ltilde, InnerSolverConfig())
    assert solution.eta.norm() > 1e-3, 'Точка x не должна быть стационарной.'
    zero = SubproblemSolution(
        eta=obj.manifold.zero(x),
        weights=np.array([0.5, 0.5]),
        kkt_residual=0.0,
        p_value=0.0,
        inner_iters=0,
        active_set=(0, 1),
    )
    assert kkt_residual_check(obj, x, zero, Ltilde) > 1e-3, (
        'Нулевой шаг в нестационарной точке должен давать невязку.'
    )
