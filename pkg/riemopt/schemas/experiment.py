import math

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator
)

from riemopt.models.manifold import RetractionKind
from riemopt.schemas.solver import Algorithm, SliceSolver

ROWS_NOT_BELOW_N = 'Число строк m_rows должно быть меньше n!'
SPARSITY_RANGE = 'Разреженность должна лежать в интервале (0, 1)!'
EMPTY_SEEDS = 'Нужен хотя бы один seed!'
EMPTY_ALGORITHMS = 'Нужен хотя бы один метод!'
DUPLICATE_SEEDS = 'Зёрна не должны повторяться!'
FORMAT_VERSION = 1


class ExperimentConfig(BaseModel):
    """
    Параметры эксперимента на сфере.

    Атрибуты:
        - n, m_rows (int): размеры A_i (m_rows x n), n > m_rows > 0.
        - sparsity (float): доля ненулевых элементов сигналов.
        - lambda1, lambda2 (float): веса L1-слагаемых.
        - noise_std (float): стандартное отклонение шума в b_i.
        - seeds (list[int]): зёрна экземпляров.
        - algorithms (list[Algorithm]): запускаемые методы.
        - max_iter (int), tol (float): бюджет и порог стационарности.
        - n_starts (int): число стартов в поиске фронта Парето.
        - slice_solver (SliceSolver): решатель задачи на срезе.
        - retraction (RetractionKind): ретракция на сфере.
        - record_timing (bool): записывать время; без него CSV
          воспроизводятся побайтно.
    """
    n: PositiveInt = 128
    m_rows: PositiveInt = 50
    sparsity: float = 0.05
    lambda1: NonNegativeFloat = 0.05
    lambda2: NonNegativeFloat = 0.05
    noise_std: NonNegativeFloat = 0.01
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    algorithms: list[Algorithm] = Field(
        default_factory=lambda: list(Algorithm)
    )
    max_iter: PositiveInt = 500
    tol: PositiveFloat = 1e-4
    n_starts: PositiveInt = 50
    slice_solver: SliceSolver = SliceSolver.MULTIPLIER
    retraction: RetractionKind = RetractionKind.PROJECTIVE
    record_timing: bool = True

    model_config = ConfigDict(extra='forbid', frozen=True)

    @field_validator('sparsity')
    def check_sparsity(cls, value):
        """
        Проверяет, что разреженность лежит в (0, 1).

        Вызывает:
            ValueError: если значение вне интервала.
        """
        if not 0 < value < 1:
            raise ValueError(SPARSITY_RANGE)
        return value

    @field_validator('seeds')
    def check_seeds(cls, value):
        if not value:
            raise ValueError(EMPTY_SEEDS)
        if len(set(value)) != len(value):
            raise ValueError(DUPLICATE_SEEDS)
        return value

    @field_validator('algorithms')
    def check_algorithms(cls, value):
        if not value:
            raise ValueError(EMPTY_ALGORITHMS)
        return list(dict.fromkeys(value))

    @model_validator(mode='after')
    def check_sizes(self):
        """
        Проверяет n > m_rows.

        Вызывает:
            ValueError: если строк не меньше, чем столбцов.
        """
        if self.m_rows >= self.n:
            raise ValueError(ROWS_NOT_BELOW_N)
        return self

    @property
    def nonzeros(self) -> int:
        return math.ceil(round(self.sparsity * self.n, 12))


class InstanceHeader(BaseModel):
    """Заголовок файла экземпляра: одна строка JSON."""
    n: PositiveInt
    m_rows: PositiveInt
    sparsity: float
    lambda1: NonNegativeFloat
    lambda2: NonNegativeFloat
    noise_std: NonNegativeFloat
    seed: int
    format_version: int = FORMAT_VERSION

    model_config = ConfigDict(extra='forbid')

    @classmethod
    def from_config(
            cls,
            config: ExperimentConfig,
            seed: int
    ) -> 'InstanceHeader':
        return cls(
            n=config.n,
            m_rows=config.m_rows,
            sparsity=config.sparsity,
            lambda1=config.lambda1,
            lambda2=config.lambda2,
            noise_std=config.noise_std,
            seed=seed,
        )


class ParetoPoint(BaseModel):
    """
    Конечное значение F одного старта.

    Атрибуты:
        - F_values (list[float]): вектор значений целей.
        - seed (int), algorithm (Algorithm), start (int): происхождение.
    """
    F_values: list[float]
    seed: int
    algorithm: Algorithm
    start: NonNegativeInt

    def dominates(self, other: 'ParetoPoint') -> bool:
        """u ⪯ v и u != v."""
        return all(
            mine <= theirs
            for mine, theirs in zip(self.F_values, other.F_values)
        ) and self.F_values != other.F_values


class SummaryRow(BaseModel):
    """Строка сводки одного прогона."""
    algorithm: Algorithm
    n: PositiveInt
    m_rows: PositiveInt
    seed: int
    iterations: NonNegativeInt
    converged: bool
    wall_seconds: NonNegativeFloat
    final_eta_norm: NonNegativeFloat
    inner_work: NonNegativeInt = 0


class AggregateRow(BaseModel):
    """
    Средние по зёрнам для одной пары (метод, размер).

    Атрибуты:
        - algorithm (Algorithm), n, m_rows (int): ячейка таблицы.
        - runs (int): число прогонов.
        - converged (int): число сошедшихся прогонов.
        - mean_iterations, mean_seconds (float): средние арифметические.
        - mean_inner_work (float): средняя работа решателя среза.
    """
    algorithm: Algorithm
    n: PositiveInt
    m_rows: PositiveInt
    runs: PositiveInt
    converged: NonNegativeInt
    mean_iterations: NonNegativeFloat
    mean_seconds: NonNegativeFloat
    mean_inner_work: NonNegativeFloat
