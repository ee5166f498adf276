import itertools
import logging
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from riemopt.core.exceptions import (
    ARMIJO_STALL,
    INEXACT_UNREACHABLE,
    ORACLE_DIMENSION,
    ArmijoStall,
    InexactCriterionUnreachable,
    MaxIterExceeded,
    OracleDimensionTooLarge
)
from riemopt.models.manifold import Point, Tangent
from riemopt.models.objective import CompositeObjective
from riemopt.schemas.solver import InnerSolverConfig
from riemopt.services.minimax import MinimaxResult, solve_minimax

logger = logging.getLogger(__name__)

NON_POSITIVE_LTILDE = 'L̃ должен быть положительным, получено {value}.'
TRANSFERRED_NOT_CONVERGED = (
    'Перенесённая подзадача решена неточно, используется лучшее '
    'приближение: {error}'
)
ROUNDOFF = 1e-13
ORACLE_MAX_DIM = 3
ORACLE_MAX_POINTS = 2_000_000


class SubproblemSolution:
    """
    Решение проксимальной подзадачи в точке x.

    Атрибуты:
        - eta (Tangent): шаг η в T_x.
        - weights (np.ndarray): множители λ на симплексе Δ_m.
        - kkt_residual (float): ‖ξ*‖ последней перенесённой подзадачи.
        - p_value (float): p_x(η) = ψ_x(η) + (L̃/2)‖η‖².
        - inner_iters (int): число итераций переноса.
        - active_set (tuple[int]): активные индексы I(η).
        - duality_gap (float): оценка неоптимальности η для p_x в единицах
          градиента: L̃‖ξ*‖ плюс разрыв последней минимакс-задачи.
          Нулевой ξ* означает выполнение условий KKT для p_x в точке η.
        - converged (bool): остановка по ‖ξ*‖ <= tol_kkt.
        - ell_trace (list[float]): значения ℓ_x по итерациям переноса.
        - work (int): суммарные итерации решателя среза.
        - accepted_early (bool): остановка по внешнему критерию приёмки.
    """
    __slots__ = (
        'eta', 'weights', 'kkt_residual', 'p_value', 'inner_iters',
        'active_set', 'duality_gap', 'converged', 'ell_trace', 'work',
        'accepted_early'
    )

    def __init__(
            self,
            eta: Tangent,
            weights: np.ndarray,
            kkt_residual: float,
            p_value: float,
            inner_iters: int,
            active_set: tuple,
            duality_gap: float = 0.0,
            converged: bool = True,
            ell_trace: Optional[list] = None,
            work: int = 0,
            accepted_early: bool = False
    ):
        self.eta = eta
        self.weights = weights
        self.kkt_residual = kkt_residual
        self.p_value = p_value
        self.inner_iters = inner_iters
        self.active_set = active_set
        self.duality_gap = duality_gap
        self.converged = converged
        self.ell_trace = ell_trace if ell_trace is not None else [p_value]
        self.work = work
        self.accepted_early = accepted_early

    def __repr__(self):
        return (
            f'SubproblemSolution(eta_norm={self.eta.norm():.3e}, '
            f'weights={self.weights}, p_value={self.p_value:.3e}, '
            f'kkt_residual={self.kkt_residual:.3e}, '
            f'inner_iters={self.inner_iters})'
        )


class OracleResult:
    """Результат переборного оракула: η̂, p̂ и признак выхода на границу."""
    __slots__ = ('eta', 'p_value', 'boundary_hit')

    def __init__(self, eta: Tangent, p_value: float, boundary_hit: bool):
        self.eta = eta
        self.p_value = p_value
        self.boundary_hit = boundary_hit


def _gradients(
        obj: CompositeObjective,
        x: Point,
        grads: Optional[Sequence[Tangent]]
) -> list[Tangent]:
    return list(grads) if grads is not None else obj.riemannian_grads(x)


def component_values(
        obj: CompositeObjective,
        x: Point,
        eta: Tangent,
        grads: Optional[Sequence[Tangent]] = None,
        y: Optional[Point] = None
) -> np.ndarray:
    """Компоненты <grad f_i(x), η> + g_i(R_x(η)) - g_i(x)."""
    eta.require_base(x)
    grads = _gradients(obj, x, grads)
    y = obj.manifold.retract(x, eta) if y is None else y
    return np.array([grad.inner(eta) for grad in grads]) + (
        obj.nonsmooth_values(y.coords) - obj.nonsmooth_values(x.coords)
    )


def psi(
        obj: CompositeObjective,
        x: Point,
        eta: Tangent,
        grads: Optional[Sequence[Tangent]] = None
) -> float:
    """ψ_x(η) = max_i <grad f_i(x), η> + g_i(R_x(η)) - g_i(x)."""
    return float(component_values(obj, x, eta, grads).max())


def p_eval(
        obj: CompositeObjective,
        x: Point,
        eta: Tangent,
        Ltilde: float,
        grads: Optional[Sequence[Tangent]] = None
) -> float:
    """
    p_x(η) = ψ_x(η) + (L̃/2)‖η‖².

    Вызывает:
        ValueError: если L̃ <= 0.
    """
    if not Ltilde > 0:
        raise ValueError(NON_POSITIVE_LTILDE.format(value=Ltilde))
    return psi(obj, x, eta, grads) + 0.5 * Ltilde * eta.norm() ** 2


def active_set(values: np.ndarray, tolerance: float) -> tuple:
    top = float(values.max())
    bound = top - tolerance * max(1.0, abs(top))
    return tuple(int(index) for index in np.flatnonzero(values >= bound))


def solve_transferred(
        obj: CompositeObjective,
        x: Point,
        eta: Tangent,
        Ltilde: float,
        config: InnerSolverConfig,
        grads: Optional[Sequence[Tangent]] = None,
        y: Optional[Point] = None
) -> MinimaxResult:
    """
    Решает перенесённую подзадачу в y = R_x(η) по активному множеству
    I(η): w_i = (DR_x(η)^*)^{-1}(grad f_i(x) + L̃η). Веса результата
    разложены на все m целей, вне I(η) они равны нулю.

    Вызывает:
        MaxIterExceeded: атрибут best хранит лучшее решение с полными
        весами.
    """
    manifold = obj.manifold
    grads = _gradients(obj, x, grads)
    y = manifold.retract(x, eta) if y is None else y
    active = active_set(
        component_values(obj, x, eta, grads, y), config.active_tol
    )
    linear = [
        manifold.d_retract_adjoint_inverse(
            x, eta, grads[index] + Ltilde * eta, y=y
        )
        for index in active
    ]
    nonsmooth = [obj.nonsmooth[index] for index in active]

    def expand(result: MinimaxResult) -> MinimaxResult:
        weights = np.zeros(obj.m)
        weights[list(active)] = result.weights
        result.weights = weights
        return result

    try:
        return expand(
            solve_minimax(manifold, y, linear, nonsmooth, Ltilde, config)
        )
    except MaxIterExceeded as error:
        error.best = expand(error.best)
        raise


def _is_degenerate(
        obj: CompositeObjective,
        x: Point,
        grads: Sequence[Tangent]
) -> bool:
    if not all(grad.is_zero() for grad in grads):
        return False
    for term in obj.nonsmooth:
        if not term.is_differentiable_at(x.coords):
            return False
        slope = obj.manifold.project_tangent(
            x, term.subgradient(x.coords)
        )
        if not slope.is_zero():
            return False
    return True


def solve_proximal_mapping(
        obj: CompositeObjective,
        x: Point,
        Ltilde: float,
        config: InnerSolverConfig,
        accept: Optional[Callable[[SubproblemSolution], bool]] = None
) -> SubproblemSolution:
    """
    Итеративный решатель проксимального отображения: перенос подзадачи
    в y_k = R_x(η_k), минимакс-решение ξ*_k, обратный перенос направления и
    линейный поиск Армихо по точной ℓ_x = p_x.

    Аргументы:
        - accept (Callable, необязательный): внешний критерий приёмки,
          проверяется перед каждым шагом Армихо, начиная со второй
          итерации; True останавливает итерации.

    Вызывает:
        - ValueError: если L̃ <= 0.
        - ArmijoStall: если шаг Армихо меньше armijo_min, а L̃‖ξ*‖² выше
          уровня ошибок округления ℓ_x; атрибут partial хранит текущее
          решение. На уровне округления итерации считаются сошедшимися.
        - InexactCriterionUnreachable: если критерий accept не выполнился
          до исчерпания max_outer; атрибут partial хранит решение.
    """
    if not Ltilde > 0:
        raise ValueError(NON_POSITIVE_LTILDE.format(value=Ltilde))
    manifold = obj.manifold
    grads = obj.riemannian_grads(x)
    eta = manifold.zero(x)
    if _is_degenerate(obj, x, grads):
        return SubproblemSolution(
            eta=eta,
            weights=np.full(obj.m, 1.0 / obj.m),
            kkt_residual=0.0,
            p_value=0.0,
            inner_iters=0,
            active_set=tuple(range(obj.m)),
        )
    roundoff = ROUNDOFF * (
        1.0 + float(np.abs(obj.nonsmooth_values(x.coords)).max())
    )
    ell = 0.0
    ell_trace = [ell]
    work = 0
    converged = False
    accepted_early = False
    result = None
    active = ()

    def snapshot() -> SubproblemSolution:
        return SubproblemSolution(
            eta=eta,
            weights=result.weights,
            kkt_residual=result.xi.norm(),
            p_value=ell,
            inner_iters=len(ell_trace) - 1,
            active_set=active,
            duality_gap=Ltilde * result.xi.norm() + result.gap,
            converged=converged,
            ell_trace=list(ell_trace),
            work=work,
            accepted_early=accepted_early,
        )

    for _ in range(config.max_outer):
        y = manifold.retract(x, eta)
        try:
            result = solve_transferred(
                obj, x, eta, Ltilde, config, grads=grads, y=y
            )
        except MaxIterExceeded as error:
            logger.debug(TRANSFERRED_NOT_CONVERGED.format(error=error))
            result = error.best
        work += result.work
        active = tuple(int(i) for i in np.flatnonzero(result.weights > 0))
        step_norm = result.xi.norm()
        if step_norm <= config.tol_kkt:
            converged = True
            break
        if accept is not None and len(ell_trace) > 1 and accept(snapshot()):
            accepted_early = True
            break
        direction = manifold.d_retract_inverse(x, eta, result.xi, y=y)
        alpha = 1.0
        while True:
            trial = eta + alpha * direction
            trial_ell = p_eval(obj, x, trial, Ltilde, grads)
            decrease = config.armijo_sigma * alpha * step_norm ** 2
            if trial_ell <= ell - decrease:
                break
            alpha *= 0.5
            if alpha < config.armijo_min:
                break
        if alpha < config.armijo_min:
            if Ltilde * step_norm ** 2 <= roundoff + ROUNDOFF * abs(ell):
                converged = True
                break
            raise ArmijoStall(
                ARMIJO_STALL.format(alpha=alpha, limit=config.armijo_min),
                partial=snapshot(),
            )
        eta, ell = trial, trial_ell
        ell_trace.append(ell)
    if accept is not None and not (converged or accepted_early):
        solution = snapshot()
        raise InexactCriterionUnreachable(
            INEXACT_UNREACHABLE.format(
                residual=solution.kkt_residual,
                eta_norm=solution.eta.norm()
            ),
            partial=solution,
        )
    return snapshot()


def kkt_residual_check(
        obj: CompositeObjective,
        x: Point,
        solution: SubproblemSolution,
        Ltilde: float,
        radius: float = 1e-6
) -> float:
    """
    Норма вектора стационарности
    Σ λ_i grad f_i(x) + L̃η + Σ λ_i DR_x(η)^*[P_y ζ_i], ζ_i ∈ ∂g_i(y).

    Для координат y, по модулю не превышающих radius, ζ_i выбирается из
    субдифференциала ближе всего к значению, которое обнуляет вектор:
    итерации на сфере оставляют в таких координатах остатки порядка
    точности решателя.
    """
    manifold = obj.manifold
    eta = solution.eta
    y = manifold.retract(x, eta)
    grads = obj.riemannian_grads(x)
    weights = solution.weights
    base = Ltilde * eta
    for weight, grad in zip(weights, grads):
        base = base + weight * grad
    total = float(weights.sum())
    target = None
    if total > 0:
        target = -manifold.d_retract_adjoint_inverse(x, eta, base, y=y).vec
    residual = base
    for weight, term in zip(weights, obj.nonsmooth):
        if weight == 0.0 or term.is_zero():
            continue
        toward = None if target is None else target / total
        selection = manifold.project_tangent(
            y, term.subgradient(y.coords, toward=toward, radius=radius)
        )
        residual = residual + weight * manifold.d_retract_adjoint(
            x, eta, selection, y=y
        )
    return residual.norm()


def brute_force_oracle(
        obj: CompositeObjective,
        x: Point,
        Ltilde: float,
        grid_radius: float,
        grid_step: float
) -> OracleResult:
    """
    Перебор p_x по равномерной сетке в шаре касательного пространства
    радиуса grid_radius с последующим уточнением симплекс-методом
    Нелдера-Мида из лучшего узла.

    Вызывает:
        OracleDimensionTooLarge: если касательная размерность больше 3 или
        сетка слишком велика.
    """
    manifold = obj.manifold
    basis = manifold.tangent_basis(x)
    dim = basis.shape[1]
    axis = np.arange(-grid_radius, grid_radius + 0.5 * grid_step, grid_step)
    if dim > ORACLE_MAX_DIM or axis.size ** dim > ORACLE_MAX_POINTS:
        raise OracleDimensionTooLarge(ORACLE_DIMENSION.format(
            limit=ORACLE_MAX_DIM, dim=dim
        ))
    grads = obj.riemannian_grads(x)

    def objective(coefficients: np.ndarray) -> float:
        return p_eval(
            obj, x, Tangent(x, basis @ coefficients), Ltilde, grads
        )

    best_value, best = np.inf, np.zeros(dim)
    for node in itertools.product(axis, repeat=dim):
        node = np.array(node)
        if node @ node > grid_radius ** 2:
            continue
        value = objective(node)
        if value < best_value:
            best_value, best = value, node
    simplex = best + np.vstack([
        np.zeros(dim), 0.1 * grid_step * np.eye(dim)
    ])
    refined = minimize(
        objective,
        best,
        method='Nelder-Mead',
        options={
            'initial_simplex': simplex,
            'xatol': 1e-12,
            'fatol': 1e-14,
            'maxiter': 20_000,
        },
    )
    if refined.fun < best_value:
        best_value, best = float(refined.fun), refined.x
    boundary_hit = np.linalg.norm(best) >= grid_radius - grid_step
    return OracleResult(
        eta=Tangent(x, basis @ best),
        p_value=float(best_value),
        boundary_hit=bool(boundary_hit),
    )
