import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    NonNegativeFloat,
    NonNegativeInt,
    field_validator
)

from riemopt.models.manifold import Point
from riemopt.schemas.solver import Algorithm

NON_FINITE_VALUES = 'Значения целей должны быть конечными!'


class RunStatus(str, Enum):
    CONVERGED = 'converged'
    MAX_ITER = 'max_iter'
    STALLED = 'stalled'


class IterationRecord(BaseModel):
    """
    Запись одной внешней итерации.

    Атрибуты:
        - k (int): номер итерации.
        - F_values (list[float]): F(x_k).
        - eta_norm (float): ‖η_k‖ шага, вычисленного в x_k.
        - param (float): L̃_k, σ_k или шаг α_k в зависимости от метода.
        - rho (float, необязательный): отношение ρ_k метода доверительной
          области.
        - accepted (bool): шаг η_k принят и дал x_{k+1}.
        - wall_nanos (int): время от начала прогона, нс.
        - beta (float, необязательный): сертифицированная константа спуска
          F_i(x_k) - F_i(x_{k+1}) >= β‖η_k‖².
        - inner_iters (int): итерации переноса при вычислении η_k.
        - kkt_residual (float, необязательный): невязка подзадачи.
    """
    k: NonNegativeInt
    F_values: list[float]
    eta_norm: NonNegativeFloat
    param: float
    rho: Optional[float] = None
    accepted: bool
    wall_nanos: NonNegativeInt
    beta: Optional[float] = None
    inner_iters: NonNegativeInt = 0
    kkt_residual: Optional[float] = None

    model_config = ConfigDict(extra='forbid')

    @field_validator('F_values')
    def check_finite(cls, value):
        """
        Проверяет, что все значения целей конечны.

        Вызывает:
            ValueError: если встретилось inf или NaN.
        """
        if not all(math.isfinite(item) for item in value):
            raise ValueError(NON_FINITE_VALUES)
        return value


class RunResult(BaseModel):
    """
    Итог прогона внешнего метода.

    Атрибуты:
        - algorithm (Algorithm): метод.
        - trace (list[IterationRecord]): след итераций.
        - final_point (Point): последняя точка.
        - status (RunStatus): причина остановки.
        - successful, unsuccessful (int): счётчики метода доверительной
          области.
        - inner_work (int): суммарные итерации решателя среза.
        - smoothness_estimate (float): наибольшая наблюдённая константа
          гладкости L̂.
    """
    algorithm: Algorithm
    trace: list[IterationRecord]
    final_point: Point
    status: RunStatus
    successful: NonNegativeInt = 0
    unsuccessful: NonNegativeInt = 0
    inner_work: NonNegativeInt = 0
    smoothness_estimate: NonNegativeFloat = 0.0

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1

    @property
    def converged(self) -> bool:
        return self.status is RunStatus.CONVERGED

    @property
    def wall_seconds(self) -> float:
        return self.trace[-1].wall_nanos / 1e9 if self.trace else 0.0

    @property
    def final_eta_norm(self) -> float:
        return self.trace[-1].eta_norm

    @property
    def values(self) -> np.ndarray:
        """Матрица (K+1) x m значений F по следу."""
        return np.array([record.F_values for record in self.trace])

    @property
    def Ltilde_max(self) -> float:
        return max(record.param for record in self.trace)
