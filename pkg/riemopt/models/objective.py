from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import svdvals

from riemopt.core.exceptions import (
    DIMENSION_MISMATCH,
    NEGATIVE_WEIGHT,
    OBJECTIVE_INDEX,
    DimensionMismatch,
    NegativeWeight,
    ObjectiveIndexError
)
from riemopt.models.manifold import Manifold, Point, Tangent

EMPTY_OBJECTIVE = 'Составная цель должна содержать хотя бы одну пару.'
UNSUPPORTED_SUM = (
    'Взвешенная сумма определена только для L1-слагаемых, получено {kind}.'
)


class SmoothTerm:
    """
    Гладкое слагаемое f_i с оракулом объемлющего градиента.

    Атрибуты:
        - lipschitz_hint (float, необязательный): оценка константы
          Липшица градиента, используется как начальная оценка гладкости.
    """
    dim: Optional[int] = None

    def __init__(
            self,
            value: Callable[[np.ndarray], float],
            gradient: Callable[[np.ndarray], np.ndarray],
            lipschitz_hint: Optional[float] = None
    ):
        self._value = value
        self._gradient = gradient
        self.lipschitz_hint = lipschitz_hint

    def value(self, coords: np.ndarray) -> float:
        return float(self._value(coords))

    def ambient_grad(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(self._gradient(coords), dtype=float)


class LeastSquaresTerm(SmoothTerm):
    """
    f(x) = ½‖Ax - b‖², градиент Aᵀ(Ax - b). Подсказка Липшица равна
    наибольшему собственному числу AᵀA, то есть квадрату спектральной
    нормы A.
    """

    def __init__(self, matrix, target):
        self.matrix = np.asarray(matrix, dtype=float)
        self.target = np.asarray(target, dtype=float)
        if self.matrix.shape[0] != self.target.shape[0]:
            raise DimensionMismatch(DIMENSION_MISMATCH.format(
                expected=self.matrix.shape[0], actual=self.target.shape[0]
            ))
        self.dim = self.matrix.shape[1]
        self.lipschitz_hint = float(svdvals(self.matrix)[0] ** 2)

    def residual(self, coords: np.ndarray) -> np.ndarray:
        return self.matrix @ coords - self.target

    def value(self, coords):
        residual = self.residual(coords)
        return 0.5 * float(residual @ residual)

    def ambient_grad(self, coords):
        return self.matrix.T @ self.residual(coords)


class NonsmoothTerm(ABC):
    """Выпуклое в R^n негладкое слагаемое g_i с оракулами prox и ∂g."""

    @abstractmethod
    def value(self, v: np.ndarray) -> float:
        """Значение g(v)."""

    @abstractmethod
    def subgradient(
            self,
            v: np.ndarray,
            toward: Optional[np.ndarray] = None,
            radius: float = 0.0
    ) -> np.ndarray:
        """
        Элемент ∂g, ближайший к toward (по умолчанию к нулю, то есть
        субградиент минимальной нормы). При radius > 0 берётся объединение
        субдифференциалов по шару радиуса radius вокруг v.
        """

    @abstractmethod
    def prox(self, v: np.ndarray, tau: float) -> np.ndarray:
        """argmin_u τ g(u) + ½‖u - v‖²."""

    @abstractmethod
    def lipschitz_const(self, dim: int) -> float:
        """Константа Липшица L_g в R^dim."""

    @abstractmethod
    def is_zero(self) -> bool:
        """Слагаемое тождественно равно нулю."""

    @abstractmethod
    def is_differentiable_at(self, v: np.ndarray) -> bool:
        """g дифференцируема в точке v."""


class L1Term(NonsmoothTerm):
    """
    g(v) = weight * ‖v‖₁.

    Атрибуты:
        - weight (float): неотрицательный вес λ.
    """

    def __init__(self, weight: float):
        self.weight = float(weight)

    def __repr__(self):
        return f'L1Term(weight={self.weight})'

    def value(self, v):
        return self.weight * float(np.abs(v).sum())

    def subgradient(self, v, toward=None, radius=0.0):
        selection = self.weight * np.sign(v)
        kinks = np.abs(v) <= radius
        if toward is None:
            selection[kinks] = 0.0
        else:
            selection[kinks] = np.clip(
                toward[kinks], -self.weight, self.weight
            )
        return selection

    def prox(self, v, tau):
        return np.sign(v) * np.maximum(np.abs(v) - tau * self.weight, 0.0)

    def lipschitz_const(self, dim):
        return self.weight * np.sqrt(dim)

    def is_zero(self):
        return self.weight == 0.0

    def is_differentiable_at(self, v):
        return self.is_zero() or bool(np.all(v != 0.0))


def make_l1(weight: float) -> L1Term:
    """
    Создаёт слагаемое λ‖·‖₁.

    Вызывает:
        NegativeWeight: если weight < 0.
    """
    if weight < 0:
        raise NegativeWeight(NEGATIVE_WEIGHT.format(value=weight))
    return L1Term(weight)


def weighted_sum(
        terms: Sequence[NonsmoothTerm],
        weights: Sequence[float]
) -> NonsmoothTerm:
    """
    Возвращает Σ w_i g_i как одно негладкое слагаемое.

    Вызывает:
        TypeError: если среди слагаемых есть не-L1.
    """
    for term in terms:
        if not isinstance(term, L1Term):
            raise TypeError(UNSUPPORTED_SUM.format(kind=type(term).__name__))
    return L1Term(sum(
        weight * term.weight for term, weight in zip(terms, weights)
    ))


class CompositeObjective:
    """
    Векторная цель F = (f_i + g_i), i = 1..m, на многообразии.

    Атрибуты:
        - manifold (Manifold): многообразие, на котором ищется минимум.
        - smooth (tuple[SmoothTerm]): гладкие слагаемые f_i.
        - nonsmooth (tuple[NonsmoothTerm]): негладкие слагаемые g_i.
    """

    def __init__(
            self,
            manifold: Manifold,
            terms: Sequence[tuple[SmoothTerm, NonsmoothTerm]]
    ):
        if not terms:
            raise ValueError(EMPTY_OBJECTIVE)
        for smooth, _ in terms:
            if smooth.dim is not None and smooth.dim != manifold.dim:
                raise DimensionMismatch(DIMENSION_MISMATCH.format(
                    expected=manifold.dim, actual=smooth.dim
                ))
        self.manifold = manifold
        self.smooth = tuple(smooth for smooth, _ in terms)
        self.nonsmooth = tuple(nonsmooth for _, nonsmooth in terms)

    @property
    def m(self) -> int:
        return len(self.smooth)

    @property
    def lipschitz_hint(self) -> Optional[float]:
        hints = [
            term.lipschitz_hint for term in self.smooth
            if term.lipschitz_hint is not None
        ]
        return max(hints) if hints else None

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.m:
            raise ObjectiveIndexError(OBJECTIVE_INDEX.format(
                index=index, size=self.m
            ))

    def smooth_values(self, coords: np.ndarray) -> np.ndarray:
        return np.array([term.value(coords) for term in self.smooth])

    def nonsmooth_values(self, coords: np.ndarray) -> np.ndarray:
        return np.array([term.value(coords) for term in self.nonsmooth])

    def value_pair(self, x: Point) -> tuple[np.ndarray, np.ndarray]:
        """Значения гладких и негладких слагаемых в точке x."""
        return self.smooth_values(x.coords), self.nonsmooth_values(x.coords)

    def eval_F(self, x: Point) -> np.ndarray:
        """Вектор значений F_i(x) = f_i(x) + g_i(x)."""
        smooth, nonsmooth = self.value_pair(x)
        return smooth + nonsmooth

    def riemannian_grad_f(self, index: int, x: Point) -> Tangent:
        """
        Риманов градиент f_i: проекция объемлющего градиента на T_x.

        Вызывает:
            ObjectiveIndexError: если index вне [0, m).
        """
        self._check_index(index)
        return self.manifold.project_tangent(
            x, self.smooth[index].ambient_grad(x.coords)
        )

    def riemannian_grads(self, x: Point) -> list[Tangent]:
        return [self.riemannian_grad_f(index, x) for index in range(self.m)]

    def weighted_nonsmooth(self, weights: Sequence[float]) -> NonsmoothTerm:
        return weighted_sum(self.nonsmooth, weights)


def least_squares_l1(
        manifold: Manifold,
        matrices: Sequence[np.ndarray],
        targets: Sequence[np.ndarray],
        weights: Sequence[float]
) -> CompositeObjective:
    """
    Собирает цель F_i(x) = ½‖A_i x - b_i‖² + λ_i‖x‖₁.
    """
    return CompositeObjective(manifold, [
        (LeastSquaresTerm(matrix, target), make_l1(weight))
        for matrix, target, weight in zip(matrices, targets, weights)
    ])
