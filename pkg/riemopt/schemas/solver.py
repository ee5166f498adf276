import math
from enum import Enum
from typing import Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator
)

from riemopt.models.manifold import RetractionKind

OPEN_UNIT_INTERVAL = 'Значение должно лежать в интервале (0, 1)!'
TAU_ORDER = 'Параметры должны удовлетворять 0 < τ₁ < 1 < τ₂ ≤ τ₃!'
THRESHOLD_ORDER = 'Пороги должны удовлетворять 0 < s₁ < s₂ < 1!'
SIGMA_ORDER = 'Начальный σ₀ должен быть больше σ_min!'
GROWTH_TOO_SMALL = 'Множитель роста L̃ должен быть больше 1!'


class Algorithm(str, Enum):
    """Внешние методы: три варианта RMPGM и субградиентный RMSD."""
    RMPGM = 'rmpgm'
    INEXACT = 'inexact'
    TR = 'tr'
    RMSD = 'rmsd'


class SimplexSolver(str, Enum):
    """Поиск весов λ на симплексе в двойственной задаче."""
    DUAL_BISECTION = 'dual_bisection'
    MIRROR_DESCENT = 'mirror_descent'


class SliceSolver(str, Enum):
    """Решатель внутренней задачи на аффинном срезе y + T_y."""
    SPLITTING = 'splitting'
    MULTIPLIER = 'multiplier'


class InnerSolverConfig(BaseModel):
    """
    Параметры решателя проксимального отображения.

    Атрибуты:
        - tol_kkt (float): порог ‖ξ*‖ для остановки итераций переноса.
        - max_outer (int): предел итераций переноса.
        - max_inner (int): предел итераций двойственного поиска и
          расщепления на одно решение.
        - armijo_sigma (float, 0 < σ < 1): параметр линейного поиска.
        - armijo_min (float): нижняя граница шага Армихо.
        - simplex_solver (SimplexSolver, необязательный): способ поиска λ;
          по умолчанию бисекция для двух активных целей и зеркальный
          подъём для большего числа.
        - slice_solver (SliceSolver): решатель задачи на срезе.
        - active_tol (float): относительный допуск активного множества.
        - dual_tol (float): точность бисекции по λ.
        - splitting_tol (float): порог невязок расщепления.
        - splitting_rho (float): штраф расщепления в долях L̃.
        - kink_radius (float): радиус, в котором координаты считаются
          изломами при выборе субградиента для KKT-невязки.
    """
    tol_kkt: PositiveFloat = 1e-8
    max_outer: PositiveInt = 100
    max_inner: PositiveInt = 1000
    armijo_sigma: float = 1e-4
    armijo_min: PositiveFloat = 1e-12
    simplex_solver: Optional[SimplexSolver] = None
    slice_solver: SliceSolver = SliceSolver.MULTIPLIER
    active_tol: NonNegativeFloat = 1e-8
    dual_tol: PositiveFloat = 1e-12
    splitting_tol: PositiveFloat = 1e-12
    splitting_rho: PositiveFloat = 1.0
    kink_radius: NonNegativeFloat = 1e-6

    model_config = ConfigDict(extra='forbid', frozen=True)

    @field_validator('armijo_sigma')
    def check_open_unit_interval(cls, value):
        """
        Проверяет, что параметр Армихо лежит в (0, 1).

        Вызывает:
            ValueError: если значение вне интервала.
        """
        if not 0 < value < 1:
            raise ValueError(OPEN_UNIT_INTERVAL)
        return value


class TrustRegionParams(BaseModel):
    """
    Параметры адаптивной регуляризации. Значения по умолчанию взяты из
    эксперимента на сфере.

    Атрибуты:
        - sigma0 (float, необязательный): начальный σ₀; по умолчанию
          подсказка Липшица цели.
        - sigma_min (float): нижняя граница σ.
        - tau1, tau2, tau3 (float): множители уменьшения и увеличения σ.
        - s1, s2 (float): пороги успешной и очень успешной итерации.
    """
    sigma0: Optional[PositiveFloat] = None
    sigma_min: PositiveFloat = 1e-6
    tau1: float = 0.5
    tau2: float = 2.0
    tau3: float = 4.0
    s1: float = 0.1
    s2: float = 0.75

    model_config = ConfigDict(extra='forbid', frozen=True)

    @model_validator(mode='after')
    def check_orders(self):
        """
        Проверяет порядок параметров τ, s и σ.

        Вызывает:
            ValueError: если нарушен хотя бы один из порядков.
        """
        if not 0 < self.tau1 < 1 < self.tau2 <= self.tau3:
            raise ValueError(TAU_ORDER)
        if not 0 < self.s1 < self.s2 < 1:
            raise ValueError(THRESHOLD_ORDER)
        if self.sigma0 is not None and self.sigma0 <= self.sigma_min:
            raise ValueError(SIGMA_ORDER)
        return self

    def max_unsuccessful_run(self, sigma_max: float) -> int:
        """Граница ⌈log_{τ₂}(σ_max / σ_min)⌉ числа неудач подряд."""
        return math.ceil(
            math.log(sigma_max / self.sigma_min) / math.log(self.tau2)
        )


class SolverConfig(BaseModel):
    """
    Параметры внешних методов.

    Атрибуты:
        - max_iter (int): предел внешних итераций.
        - tol (float): порог стационарности по ‖η_k‖.
        - Ltilde_init (float, необязательный): начальный L̃; по умолчанию
          подсказка Липшица цели.
        - backtracking (bool): увеличивать L̃ до выполнения сертификата
          спуска.
        - growth (float): множитель увеличения L̃.
        - smoothness_from_hint (bool): брать подсказку Липшица как начальную
          оценку L̂ в сертификате; иначе L̂ строится только по наблюдениям.
        - eps_scale, eps_power (float): расписание ε_k = scale / (k+1)^power
          неточного метода; scale = 0 даёт точный метод.
        - tr (TrustRegionParams): параметры адаптивной регуляризации.
        - inner (InnerSolverConfig): параметры решателя подзадачи.
        - retraction (RetractionKind): ретракция на сфере.
        - seed (int): зерно случайности.
    """
    max_iter: PositiveInt = 500
    tol: PositiveFloat = 1e-4
    Ltilde_init: Optional[PositiveFloat] = None
    backtracking: bool = True
    growth: float = 2.0
    smoothness_from_hint: bool = False
    eps_scale: NonNegativeFloat = 1.0
    eps_power: PositiveFloat = 1.0
    tr: TrustRegionParams = Field(default_factory=TrustRegionParams)
    inner: InnerSolverConfig = Field(default_factory=InnerSolverConfig)
    retraction: RetractionKind = RetractionKind.PROJECTIVE
    seed: int = 0

    model_config = ConfigDict(extra='forbid', frozen=True)

    @field_validator('growth')
    def check_growth(cls, value):
        """
        Проверяет, что множитель роста больше единицы.

        Вызывает:
            ValueError: если value <= 1.
        """
        if value <= 1:
            raise ValueError(GROWTH_TOO_SMALL)
        return value

    def epsilon(self, k: int) -> float:
        return self.eps_scale / (k + 1) ** self.eps_power
