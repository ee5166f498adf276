import logging
import math
import time
from typing import Callable, Optional

import numpy as np

from riemopt.core.exceptions import (
    NON_FINITE_OBJECTIVE,
    ArmijoStall,
    InexactCriterionUnreachable,
    MaxIterExceeded,
    NonFiniteObjective
)
from riemopt.core.rng import make_generator
from riemopt.models.manifold import (
    Point,
    RetractionKind,
    Tangent,
    make_manifold
)
from riemopt.models.objective import CompositeObjective, make_l1
from riemopt.schemas.run import IterationRecord, RunResult, RunStatus
from riemopt.schemas.solver import Algorithm, SolverConfig
from riemopt.services.minimax import solve_minimax
from riemopt.services.subproblem import (
    SubproblemSolution,
    kkt_residual_check,
    solve_proximal_mapping
)

logger = logging.getLogger(__name__)

RUN_STARTED = '{algorithm}: старт, m = {m}, n = {n}, max_iter = {max_iter}.'
RUN_FINISHED = (
    '{algorithm}: {status} после {iterations} итераций, '
    '‖η‖ = {eta_norm:.3e}, время {seconds:.3f} с.'
)
ITERATION = '{algorithm} k = {k}: F = {values}, ‖η‖ = {eta_norm:.3e}.'
SOLVER_RECOVERED = 'Итерация {k}: {error} Используется текущее приближение.'
DIRECTION_RECOVERED = 'Итерация {k}: {error} Направление взято как лучшее.'

Acceptance = Callable[[SubproblemSolution], bool]
AcceptanceFactory = Callable[
    [CompositeObjective, Point, float, int], Optional[Acceptance]
]


class _Trace:
    """Накопитель записей следа; время считается от начала прогона."""

    def __init__(self, algorithm: Algorithm):
        self.algorithm = algorithm
        self.records = []
        self._start = time.perf_counter_ns()

    def add(
            self,
            k: int,
            values: np.ndarray,
            eta_norm: float,
            param: float,
            accepted: bool,
            **fields
    ) -> None:
        self.records.append(IterationRecord(
            k=k,
            F_values=values.tolist(),
            eta_norm=eta_norm,
            param=param,
            accepted=accepted,
            wall_nanos=time.perf_counter_ns() - self._start,
            **fields
        ))
        logger.debug(ITERATION.format(
            algorithm=self.algorithm.value,
            k=k,
            values=np.array2string(values, precision=6),
            eta_norm=eta_norm
        ))

    def result(self, x: Point, status: RunStatus, **fields) -> RunResult:
        result = RunResult(
            algorithm=self.algorithm,
            trace=self.records,
            final_point=x,
            status=status,
            **fields
        )
        logger.info(RUN_FINISHED.format(
            algorithm=self.algorithm.value,
            status=status.value,
            iterations=result.iterations,
            eta_norm=result.final_eta_norm,
            seconds=result.wall_seconds
        ))
        return result


def _start(
        algorithm: Algorithm,
        obj: CompositeObjective,
        config: SolverConfig
) -> _Trace:
    logger.info(RUN_STARTED.format(
        algorithm=algorithm.value,
        m=obj.m,
        n=obj.manifold.dim,
        max_iter=config.max_iter
    ))
    return _Trace(algorithm)


def _evaluate(obj: CompositeObjective, x: Point, k: int) -> np.ndarray:
    """
    Вызывает:
        NonFiniteObjective: если хотя бы одно F_i(x) не конечно.
    """
    values = obj.eval_F(x)
    if not np.all(np.isfinite(values)):
        raise NonFiniteObjective(NON_FINITE_OBJECTIVE.format(
            k=k, values=values
        ))
    return values


def _solve(
        obj: CompositeObjective,
        x: Point,
        Ltilde: float,
        config: SolverConfig,
        k: int,
        accept: Optional[Acceptance] = None
) -> SubproblemSolution:
    try:
        return solve_proximal_mapping(obj, x, Ltilde, config.inner, accept)
    except (ArmijoStall, InexactCriterionUnreachable) as error:
        logger.warning(SOLVER_RECOVERED.format(k=k, error=error))
        return error.partial


def _initial_smoothness(
        obj: CompositeObjective,
        config: SolverConfig
) -> float:
    hint = obj.lipschitz_hint
    return hint if config.smoothness_from_hint and hint else 0.0


def _initial_scale(
        obj: CompositeObjective,
        config: SolverConfig,
        smoothness: float
) -> float:
    if config.Ltilde_init is not None:
        return config.Ltilde_init
    return max(obj.lipschitz_hint or 0.0, config.growth * smoothness) or 1.0


def observed_smoothness(
        obj: CompositeObjective,
        x: Point,
        eta: Tangent,
        candidate: Point
) -> float:
    """
    Наибольшая константа, которую шаг η требует от гладкости f_i ∘ R_x:
    max_i 2(f_i(R_x(η)) - f_i(x) - <grad f_i(x), η>) / ‖η‖².
    """
    size = eta.norm() ** 2
    if size == 0.0:
        return 0.0
    linear = np.array([grad.inner(eta) for grad in obj.riemannian_grads(x)])
    excess = (
        obj.smooth_values(candidate.coords) -
        obj.smooth_values(x.coords) - linear
    )
    return max(0.0, float(2.0 * excess.max() / size))


def _proximal_gradient_run(
        algorithm: Algorithm,
        obj: CompositeObjective,
        x0: Point,
        config: SolverConfig,
        acceptance: Optional[AcceptanceFactory] = None
) -> RunResult:
    """
    Общий цикл точного и неточного методов: шаг из проксимальной
    подзадачи, увеличение L̃ до выполнения сертификата
    F_i(R_x(η)) <= F_i(x) - ((L̃ - L̂)/2)‖η‖² при включённом backtracking.
    """
    manifold = obj.manifold
    trace = _start(algorithm, obj, config)
    smoothness = _initial_smoothness(obj, config)
    Ltilde = _initial_scale(obj, config, smoothness)
    x = x0
    values = _evaluate(obj, x, 0)
    work = 0
    status = RunStatus.MAX_ITER
    for k in range(config.max_iter + 1):
        final = k == config.max_iter
        while True:
            accept = acceptance(obj, x, Ltilde, k) if acceptance else None
            solution = _solve(obj, x, Ltilde, config, k, accept)
            work += solution.work
            eta_norm = solution.eta.norm()
            if eta_norm <= config.tol or final:
                break
            candidate = manifold.retract(x, solution.eta)
            candidate_values = _evaluate(obj, candidate, k + 1)
            smoothness = max(smoothness, observed_smoothness(
                obj, x, solution.eta, candidate
            ))
            beta = 0.5 * (Ltilde - smoothness)
            certified = beta > 0 and bool(np.all(
                candidate_values <= values - beta * eta_norm ** 2
            ))
            if certified or not config.backtracking:
                break
            Ltilde *= config.growth
        details = dict(
            inner_iters=solution.inner_iters,
            kkt_residual=solution.kkt_residual,
        )
        if eta_norm <= config.tol or final:
            if eta_norm <= config.tol:
                status = RunStatus.CONVERGED
            trace.add(k, values, eta_norm, Ltilde, False, **details)
            break
        if candidate == x:
            status = RunStatus.STALLED
            trace.add(k, values, eta_norm, Ltilde, False, **details)
            break
        trace.add(
            k, values, eta_norm, Ltilde, True,
            beta=beta if certified else None, **details
        )
        x, values = candidate, candidate_values
    return trace.result(
        x, status, inner_work=work, smoothness_estimate=smoothness
    )


def rmpgm_run(
        obj: CompositeObjective,
        x0: Point,
        config: SolverConfig
) -> RunResult:
    """Риманов многоцелевой проксимальный градиентный метод."""
    return _proximal_gradient_run(Algorithm.RMPGM, obj, x0, config)


def inexact_acceptance(config: SolverConfig) -> AcceptanceFactory:
    """
    Критерий неточного шага на итерации k: p_x(η̂) <= 0 и
    ‖v‖ <= ε_k‖η̂‖, где v - вектор стационарности подзадачи.
    """

    def factory(obj, x, Ltilde, k):
        epsilon = config.epsilon(k)
        if epsilon == 0.0:
            return None

        def accept(solution: SubproblemSolution) -> bool:
            if solution.p_value > 0.0:
                return False
            residual = kkt_residual_check(
                obj, x, solution, Ltilde, radius=config.inner.kink_radius
            )
            return residual <= epsilon * solution.eta.norm()

        return accept

    return factory


def inexact_rmpgm_run(
        obj: CompositeObjective,
        x0: Point,
        config: SolverConfig
) -> RunResult:
    """
    Неточный вариант: решатель подзадачи останавливается, как только
    выполнен критерий inexact_acceptance с расписанием ε_k из config.
    """
    return _proximal_gradient_run(
        Algorithm.INEXACT, obj, x0, config, inexact_acceptance(config)
    )


def tr_rmpgm_run(
        obj: CompositeObjective,
        x0: Point,
        config: SolverConfig
) -> RunResult:
    """
    Вариант с адаптивной регуляризацией σ_k. Отношение
    ρ_k = min_i (F_i(x_k) - F_i(R(η_k))) / (-p(η_k)) решает, принят ли шаг
    (ρ_k >= s₁), и управляет σ: очень успешный шаг (ρ_k >= s₂) уменьшает σ
    в τ₁ раз, неудачный увеличивает в τ₂ раз.
    """
    params = config.tr
    manifold = obj.manifold
    trace = _start(Algorithm.TR, obj, config)
    sigma = (
        params.sigma0 or config.Ltilde_init or obj.lipschitz_hint or 1.0
    )
    x = x0
    values = _evaluate(obj, x, 0)
    work = successful = unsuccessful = 0
    status = RunStatus.MAX_ITER
    for k in range(config.max_iter + 1):
        solution = _solve(obj, x, sigma, config, k)
        work += solution.work
        eta_norm = solution.eta.norm()
        details = dict(
            inner_iters=solution.inner_iters,
            kkt_residual=solution.kkt_residual,
        )
        if eta_norm <= config.tol or k == config.max_iter:
            if eta_norm <= config.tol:
                status = RunStatus.CONVERGED
            trace.add(k, values, eta_norm, sigma, False, **details)
            break
        candidate = manifold.retract(x, solution.eta)
        candidate_values = _evaluate(obj, candidate, k + 1)
        predicted = -solution.p_value
        reduction = float(np.min(values - candidate_values))
        rho = reduction / predicted if predicted > 0 else None
        accepted = rho is not None and rho >= params.s1
        beta = 0.5 * params.s1 * sigma
        certified = accepted and reduction >= beta * eta_norm ** 2
        trace.add(
            k, values, eta_norm, sigma, accepted,
            rho=rho, beta=beta if certified else None, **details
        )
        if accepted:
            x, values = candidate, candidate_values
            successful += 1
        else:
            unsuccessful += 1
        if rho is not None and rho >= params.s2:
            sigma = max(params.sigma_min, params.tau1 * sigma)
        elif not accepted:
            sigma = params.tau2 * sigma
    return trace.result(
        x, status,
        successful=successful,
        unsuccessful=unsuccessful,
        inner_work=work,
    )


def rmsd_run(
        obj: CompositeObjective,
        x0: Point,
        config: SolverConfig
) -> RunResult:
    """
    Субградиентный спуск: направление d_k - минимизатор
    max_i <ξ_i, d> + ½‖d‖², ξ_i = grad f_i + P_x ζ_i с субградиентом ζ_i
    минимальной нормы, шаг α_k = 1/√(k+1).
    """
    manifold = obj.manifold
    trace = _start(Algorithm.RMSD, obj, config)
    flat = [make_l1(0.0)] * obj.m
    x = x0
    values = _evaluate(obj, x, 0)
    work = 0
    status = RunStatus.MAX_ITER
    for k in range(config.max_iter + 1):
        slopes = [
            grad + manifold.project_tangent(x, term.subgradient(x.coords))
            for grad, term in zip(obj.riemannian_grads(x), obj.nonsmooth)
        ]
        try:
            result = solve_minimax(
                manifold, x, slopes, flat, 1.0, config.inner
            )
        except MaxIterExceeded as error:
            logger.warning(DIRECTION_RECOVERED.format(k=k, error=error))
            result = error.best
        work += result.work
        direction = result.xi
        size = direction.norm()
        step = 1.0 / math.sqrt(k + 1)
        if size <= config.tol or k == config.max_iter:
            if size <= config.tol:
                status = RunStatus.CONVERGED
            trace.add(k, values, size, step, False)
            break
        trace.add(k, values, size, step, True)
        x = manifold.retract(x, step * direction)
        values = _evaluate(obj, x, k + 1)
    return trace.result(x, status, inner_work=work)


ALGORITHMS = {
    Algorithm.RMPGM: rmpgm_run,
    Algorithm.INEXACT: inexact_rmpgm_run,
    Algorithm.TR: tr_rmpgm_run,
    Algorithm.RMSD: rmsd_run,
}


def with_retraction(
        obj: CompositeObjective,
        retraction: RetractionKind
) -> CompositeObjective:
    """Та же цель на многообразии с ретракцией retraction."""
    manifold = obj.manifold
    if manifold.retraction is RetractionKind(retraction):
        return obj
    return CompositeObjective(
        make_manifold(manifold.name, manifold.dim, retraction),
        list(zip(obj.smooth, obj.nonsmooth)),
    )


def run_algorithm(
        algorithm: Algorithm,
        obj: CompositeObjective,
        x0: Optional[Point],
        config: SolverConfig
) -> RunResult:
    """
    Запускает метод по его имени на многообразии с ретракцией
    config.retraction. Без x0 старт выбирается случайно по config.seed.
    """
    runner = ALGORITHMS[Algorithm(algorithm)]
    obj = with_retraction(obj, config.retraction)
    if x0 is None:
        x0 = obj.manifold.random_point(make_generator(config.seed))
    return runner(obj, x0, config)
