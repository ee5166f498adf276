"""
Выпуклая минимакс-задача на касательном пространстве

    min_{ξ ∈ T_y} max_i h_i(ξ) + (L̃/2)‖ξ‖²,
    h_i(ξ) = <w_i, ξ> + g_i(y + ξ) - g_i(y),

решается через двойственную: max по λ из симплекса вогнутой функции
φ(λ) = min_ξ Σ λ_i h_i(ξ) + (L̃/2)‖ξ‖². Внутренний минимум при фиксированных
весах ищется на аффинном срезе y + T_y.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from riemopt.core.exceptions import (
    MAX_ITER_EXCEEDED,
    NON_CONVEX_DETECTED,
    MaxIterExceeded,
    NonConvexDetected
)
from riemopt.models.manifold import Manifold, Point, Tangent
from riemopt.models.objective import NonsmoothTerm, weighted_sum
from riemopt.schemas.solver import (
    InnerSolverConfig,
    SimplexSolver,
    SliceSolver
)

logger = logging.getLogger(__name__)

UNSUPPORTED_BISECTION = (
    'Бисекция по λ применима только к двум активным целям, получено {count}.'
)
BISECTION_FALLBACK = (
    'Активных целей {count}, вместо бисекции используется зеркальный подъём.'
)
SLICE_NOT_CONVERGED = (
    'Расщепление на срезе не сошлось за {limit} итераций: невязки '
    '{primal:.3e} и {dual:.3e}.'
)
CONCAVITY_SLACK = 1e-6
MIRROR_GROWTH = 1.5
MIRROR_MAX_FAILURES = 60


class MinimaxResult:
    """
    Решение минимакс-задачи.

    Атрибуты:
        - xi (Tangent): ξ* в T_y.
        - weights (np.ndarray): веса λ на симплексе активных целей.
        - values (np.ndarray): h_i(ξ*).
        - gap (float): max_i h_i - Σ λ_i h_i.
        - work (int): суммарные итерации решателя среза.
        - converged (bool): разрыв и невязки среза в пределах допусков.
    """
    __slots__ = ('xi', 'weights', 'values', 'gap', 'work', 'converged')

    def __init__(self, xi, weights, values, gap, work, converged):
        self.xi = xi
        self.weights = weights
        self.values = values
        self.gap = gap
        self.work = work
        self.converged = converged

    def __repr__(self):
        return (
            f'MinimaxResult(weights={self.weights}, gap={self.gap:.3e}, '
            f'work={self.work}, converged={self.converged})'
        )


class SliceProblem:
    """
    Задача при фиксированных весах:
    min_{ξ ∈ T_y} <c, ξ> + (L̃/2)‖ξ‖² + G(y + ξ),
    где c = Σ λ_i w_i и G = Σ λ_i g_i.

    Хранит тёплый старт расщепления между вызовами с разными весами.
    """

    def __init__(
            self,
            manifold: Manifold,
            y: Point,
            linear: Sequence[Tangent],
            nonsmooth: Sequence[NonsmoothTerm],
            scale: float,
            config: InnerSolverConfig
    ):
        for vector in linear:
            vector.require_base(y)
        self.manifold = manifold
        self.y = y
        self.linear = np.array([vector.vec for vector in linear])
        self.nonsmooth = list(nonsmooth)
        self.scale = scale
        self.config = config
        self.normal = manifold.normal_vector(y)
        self.base_values = np.array([
            term.value(y.coords) for term in self.nonsmooth
        ])
        self.smooth_only = all(term.is_zero() for term in self.nonsmooth)
        self.state = None
        self.work = 0
        self.converged = True

    @property
    def count(self) -> int:
        return self.linear.shape[0]

    def components(self, xi: np.ndarray) -> np.ndarray:
        moved = self.y.coords + xi
        return self.linear @ xi + np.array([
            term.value(moved) for term in self.nonsmooth
        ]) - self.base_values

    def dual_value(self, weights: np.ndarray, xi: np.ndarray) -> float:
        return float(
            weights @ self.components(xi) + 0.5 * self.scale * (xi @ xi)
        )

    def _project(self, v: np.ndarray) -> np.ndarray:
        if self.normal is None:
            return v
        return v - (self.normal @ v) * self.normal

    def solve(self, weights: np.ndarray) -> np.ndarray:
        combined = self.linear.T @ weights
        if self.smooth_only:
            self.work += 1
            return self._project(-combined) / self.scale
        term = weighted_sum(self.nonsmooth, weights)
        if term.is_zero():
            self.work += 1
            return self._project(-combined) / self.scale
        if self.config.slice_solver is SliceSolver.MULTIPLIER:
            return self._solve_multiplier(combined, term)
        return self._solve_splitting(combined, term)

    def _solve_splitting(
            self,
            combined: np.ndarray,
            term: NonsmoothTerm
    ) -> np.ndarray:
        """
        Масштабированный ADMM с согласующей переменной z = y + ξ:
        квадратичный шаг по ξ в T_y, prox по z, обновление множителя.
        """
        y = self.y.coords
        rho = self.config.splitting_rho * self.scale
        tol = self.config.splitting_tol
        if self.state is None:
            consensus = term.prox(y - combined / self.scale, 1.0 / self.scale)
            dual = np.zeros_like(y)
        else:
            consensus, dual = self.state
        primal_norm = dual_norm = math.inf
        for iteration in range(1, self.config.max_inner + 1):
            xi = self._project(
                -(combined + rho * (y - consensus + dual))
            ) / (self.scale + rho)
            previous = consensus
            consensus = term.prox(y + xi + dual, 1.0 / rho)
            primal = y + xi - consensus
            dual = dual + primal
            primal_norm = np.linalg.norm(primal)
            dual_norm = rho * np.linalg.norm(consensus - previous)
            if primal_norm <= tol and dual_norm <= tol:
                break
        else:
            self.converged = False
            logger.debug(SLICE_NOT_CONVERGED.format(
                limit=self.config.max_inner,
                primal=primal_norm,
                dual=dual_norm
            ))
        self.work += iteration
        self.state = (consensus, dual)
        return xi

    def _solve_multiplier(
            self,
            combined: np.ndarray,
            term: NonsmoothTerm
    ) -> np.ndarray:
        """
        Точное решение для коразмерности не выше одного:
        z(ν) = prox_{G/L̃}(y - (c + νN)/L̃), ν - корень <N, z(ν) - y> = 0.
        """
        y = self.y.coords
        step = 1.0 / self.scale
        if self.normal is None:
            self.work += 1
            return term.prox(y - step * combined, step) - y
        normal = self.normal

        def moved(multiplier: float) -> np.ndarray:
            return term.prox(
                y - step * (combined + multiplier * normal), step
            )

        def offset(multiplier: float) -> float:
            return float(normal @ (moved(multiplier) - y))

        centre = -float(normal @ combined)
        spread = term.lipschitz_const(y.shape[0]) + 1.0
        multiplier, info = brentq(
            offset,
            centre - spread,
            centre + spread,
            xtol=1e-15,
            maxiter=self.config.max_inner,
            full_output=True,
            disp=False,
        )
        self.work += info.function_calls
        if not info.converged:
            self.converged = False
        return self._project(moved(multiplier) - y)


def _result(
        problem: SliceProblem,
        weights: np.ndarray,
        xi: np.ndarray,
        values: np.ndarray,
        tolerance: float
) -> MinimaxResult:
    gap = max(float(values.max() - weights @ values), 0.0)
    return MinimaxResult(
        xi=Tangent(problem.y, xi),
        weights=weights,
        values=values,
        gap=gap,
        work=problem.work,
        converged=problem.converged and gap <= tolerance,
    )


def _single(problem: SliceProblem, config: InnerSolverConfig):
    weights = np.ones(1)
    xi = problem.solve(weights)
    return _result(
        problem, weights, xi, problem.components(xi), config.tol_kkt
    )


def _dual_bisection(
        problem: SliceProblem,
        config: InnerSolverConfig
) -> MinimaxResult:
    """
    Корень φ'(t) = h_1(ξ_t) - h_2(ξ_t) для λ = (t, 1 - t) методом Брента
    с сохранением вилки: φ' не возрастает на [0, 1].

    Вызывает:
        - ValueError: если активных целей не две.
        - NonConvexDetected: если производная φ не монотонна.
    """
    if problem.count != 2:
        raise ValueError(UNSUPPORTED_BISECTION.format(count=problem.count))

    def evaluate(share: float):
        weights = np.array([share, 1.0 - share])
        xi = problem.solve(weights)
        values = problem.components(xi)
        return values[0] - values[1], weights, xi, values

    low = evaluate(0.0)
    if low[0] <= 0.0:
        return _result(problem, *low[1:], config.tol_kkt)
    high = evaluate(1.0)
    if high[0] >= 0.0:
        return _result(problem, *high[1:], config.tol_kkt)
    slack = CONCAVITY_SLACK * max(1.0, abs(low[0]), abs(high[0]))
    bracket = [low, high]

    def derivative(share: float) -> float:
        if share in (0.0, 1.0):
            return low[0] if share == 0.0 else high[0]
        current = evaluate(share)
        upper, lower = bracket[0][0], bracket[1][0]
        if current[0] > upper + slack or current[0] < lower - slack:
            raise NonConvexDetected(NON_CONVEX_DETECTED.format(
                value=current[0], low=lower, high=upper
            ))
        bracket[0 if current[0] >= 0.0 else 1] = current
        return current[0]

    brentq(
        derivative, 0.0, 1.0,
        xtol=config.dual_tol, maxiter=config.max_inner,
        full_output=True, disp=False,
    )
    candidates = [
        _result(problem, *side[1:], config.tol_kkt) for side in bracket
    ]
    return min(candidates, key=lambda result: result.gap)


def _mirror_ascent(
        problem: SliceProblem,
        config: InnerSolverConfig
) -> MinimaxResult:
    """
    Энтропийный зеркальный подъём по φ с адаптивным шагом: шаг растёт после
    удачного подъёма и делится пополам после неудачного.

    Вызывает:
        MaxIterExceeded: если разрыв не опустился до tol_kkt; атрибут best
        содержит лучшее найденное решение.
    """
    weights = np.full(problem.count, 1.0 / problem.count)
    xi = problem.solve(weights)
    values = problem.components(xi)
    dual = problem.dual_value(weights, xi)
    best = _result(problem, weights, xi, values, config.tol_kkt)
    spread = float(values.max() - values.min())
    step = 1.0 / spread if spread > 0 else 1.0
    failures = 0
    for _ in range(config.max_inner):
        if best.gap <= config.tol_kkt:
            return best
        trial = weights * np.exp(step * (values - values.max()))
        trial /= trial.sum()
        trial_xi = problem.solve(trial)
        trial_dual = problem.dual_value(trial, trial_xi)
        if trial_dual >= dual - 1e-15 * max(1.0, abs(dual)):
            weights, xi, dual = trial, trial_xi, trial_dual
            values = problem.components(xi)
            candidate = _result(problem, weights, xi, values, config.tol_kkt)
            if candidate.gap < best.gap:
                best = candidate
            step *= MIRROR_GROWTH
            failures = 0
        else:
            step *= 0.5
            failures += 1
            if failures > MIRROR_MAX_FAILURES:
                break
    best.converged = best.converged and best.gap <= config.tol_kkt
    if best.converged:
        return best
    raise MaxIterExceeded(
        MAX_ITER_EXCEEDED.format(
            solver=SimplexSolver.MIRROR_DESCENT.value,
            limit=config.max_inner,
            gap=best.gap
        ),
        best=best,
    )


def solve_minimax(
        manifold: Manifold,
        y: Point,
        linear: Sequence[Tangent],
        nonsmooth: Sequence[NonsmoothTerm],
        scale: float,
        config: InnerSolverConfig,
        simplex_solver: Optional[SimplexSolver] = None
) -> MinimaxResult:
    """
    Решает min_{ξ ∈ T_y} max_i <w_i, ξ> + g_i(y + ξ) - g_i(y) + (L̃/2)‖ξ‖².

    Аргументы:
        - linear (Sequence[Tangent]): векторы w_i в T_y.
        - nonsmooth (Sequence[NonsmoothTerm]): слагаемые g_i той же длины.
        - scale (float): L̃ > 0.
        - simplex_solver (SimplexSolver, необязательный): перекрывает
          config.simplex_solver.

    Вызывает:
        - MaxIterExceeded: если разрыв не достиг tol_kkt (best - лучшее
          решение).
        - NonConvexDetected: при нарушении вогнутости двойственной функции.
    """
    problem = SliceProblem(manifold, y, linear, nonsmooth, scale, config)
    solver = simplex_solver or config.simplex_solver
    if problem.count == 1:
        result = _single(problem, config)
    elif problem.count == 2 and solver is not SimplexSolver.MIRROR_DESCENT:
        result = _dual_bisection(problem, config)
    else:
        if solver is SimplexSolver.DUAL_BISECTION:
            logger.debug(BISECTION_FALLBACK.format(count=problem.count))
        result = _mirror_ascent(problem, config)
    if not result.converged:
        raise MaxIterExceeded(
            MAX_ITER_EXCEEDED.format(
                solver=config.slice_solver.value,
                limit=config.max_inner,
                gap=result.gap
            ),
            best=result,
        )
    return result
