"""Иерархия исключений пакета riemopt."""
from typing import Any, Optional

BASE_MISMATCH = (
    'Касательный вектор привязан к другой точке: ожидалась {expected}, '
    'получена {actual}.'
)
DIMENSION_MISMATCH = 'Несовпадение размерностей: {expected} и {actual}.'
NOT_ON_MANIFOLD = (
    'Точка не лежит на многообразии: |‖x‖ - 1| = {deviation:.3e}.'
)
NOT_TANGENT = 'Вектор не касается многообразия: |<x, v>| = {deviation:.3e}.'
OUT_OF_DOMAIN = (
    'Точка вне области обратной ретракции {kind}: <x, y> = {inner:.6f}.'
)
SINGULAR_TRANSPORT = (
    'Число обусловленности переноса {condition:.3e} превышает {limit:.1e}.'
)
NON_FINITE_OBJECTIVE = 'Значение цели на итерации {k} не конечно: {values}.'
OBJECTIVE_INDEX = 'Индекс цели {index} вне диапазона [0, {size}).'
NEGATIVE_WEIGHT = 'Вес L1 не может быть отрицательным: {value}.'
MAX_ITER_EXCEEDED = (
    'Решатель {solver} исчерпал {limit} итераций, разрыв {gap:.3e}.'
)
NON_CONVEX_DETECTED = (
    'Производная двойственной функции {value:.3e} вне вилки '
    '[{low:.3e}, {high:.3e}]: оракул не выпуклый или сломан.'
)
ARMIJO_STALL = 'Шаг Армихо {alpha:.3e} меньше допустимого {limit:.1e}.'
INEXACT_UNREACHABLE = (
    'Критерий неточного шага недостижим: ‖v‖ = {residual:.3e}, '
    '‖η‖ = {eta_norm:.3e}.'
)
ORACLE_DIMENSION = (
    'Перебор по сетке возможен для касательной размерности не выше {limit}, '
    'получено {dim}.'
)
INSTANCE_FORMAT = 'Файл экземпляра повреждён: {reason}.'
SUPPORT_OVERLAP = (
    'Непересекающиеся носители невозможны: 2 * {nonzeros} > {n}.'
)
EMPTY_SUPPORT = (
    'Разреженность {sparsity} при n = {n} не даёт ни одного ненулевого '
    'элемента.'
)
CHECKS_FAILED = 'Не пройдено проверок: {count} из {total}.'


class RiemoptError(Exception):
    """Базовое исключение пакета."""


class GeometryError(RiemoptError):
    """Ошибки геометрии многообразия."""


class BaseMismatch(GeometryError):
    """Операция получила касательные векторы с разными точками привязки."""


class DimensionMismatch(GeometryError):
    """Размерности аргументов не согласованы."""


class NotOnManifold(GeometryError):
    """Координаты не задают точку многообразия."""


class NotTangent(GeometryError):
    """Вектор не лежит в касательном пространстве точки."""


class AntipodalOrOutOfDomain(GeometryError):
    """Обратная ретракция вызвана вне своей области определения."""


class SingularTransport(GeometryError):
    """Ограниченное линейное отображение переноса вырождено."""


class ObjectiveError(RiemoptError):
    """Ошибки оракулов целевых функций."""


class NonFiniteObjective(ObjectiveError):
    """Значение цели стало бесконечным или NaN."""


class ObjectiveIndexError(ObjectiveError, IndexError):
    """Номер цели вне диапазона."""


class NegativeWeight(ObjectiveError, ValueError):
    """Отрицательный вес негладкого слагаемого."""


class SolverError(RiemoptError):
    """Ошибки внутренних решателей."""


class MaxIterExceeded(SolverError):
    """
    Решатель исчерпал бюджет итераций. Атрибут best хранит лучший найденный
    результат, чтобы вызывающий код мог продолжить работу.
    """

    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message)
        self.best = best


class NonConvexDetected(SolverError):
    """Внутренняя цель ведёт себя как невыпуклая."""


class ArmijoStall(SolverError):
    """
    Линейный поиск Армихо не нашёл шаг. Атрибут partial хранит текущее
    приближение.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class InexactCriterionUnreachable(SolverError):
    """
    Неточный критерий не выполнился за бюджет внутреннего решателя.
    Атрибут partial хранит решение, полученное по точному допуску.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class OracleDimensionTooLarge(SolverError, ValueError):
    """Переборный оракул вызван на слишком большой размерности."""


class InstanceError(RiemoptError):
    """Ошибки генерации и чтения экземпляров задачи."""


class InstanceFormatError(InstanceError):
    """Файл экземпляра не соответствует формату."""


class SupportOverlap(InstanceError, ValueError):
    """Носители сигналов не могут быть непересекающимися."""


class EmptySupport(InstanceError, ValueError):
    """Разреженность не оставляет ни одного ненулевого элемента."""


class DiagnosticsFailed(RiemoptError):
    """Набор диагностических проверок содержит проваленные."""
