import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from riemopt.core.exceptions import (
    BASE_MISMATCH,
    DIMENSION_MISMATCH,
    NOT_ON_MANIFOLD,
    NOT_TANGENT,
    OUT_OF_DOMAIN,
    SINGULAR_TRANSPORT,
    AntipodalOrOutOfDomain,
    BaseMismatch,
    DimensionMismatch,
    NotOnManifold,
    NotTangent,
    SingularTransport
)

POINT_TOLERANCE = 1e-8
TANGENT_TOLERANCE = 1e-10
CONDITION_LIMIT = 1e12
ANTIPODAL_MARGIN = 1e-12


class RetractionKind(str, Enum):
    """Вид ретракции на сфере. Евклидово пространство его игнорирует."""
    EXPONENTIAL = 'exponential'
    PROJECTIVE = 'projective'


class Point:
    """
    Точка многообразия в объемлющих координатах. Массив координат доступен
    только для чтения.

    Атрибуты:
        - coords (np.ndarray): вектор длины n.
    """
    __slots__ = ('coords',)

    def __init__(self, coords):
        coords = np.array(coords, dtype=float)
        coords.setflags(write=False)
        self.coords = coords

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return (
            self.coords.shape == other.coords.shape and
            np.array_equal(self.coords, other.coords)
        )

    __hash__ = None

    def __repr__(self):
        return f'Point(coords={np.array2string(self.coords, precision=6)})'


class Tangent:
    """
    Касательный вектор, привязанный к своей точке. Арифметика допустима
    только между векторами с одной точкой привязки.

    Атрибуты:
        - base (Point): точка привязки.
        - vec (np.ndarray): объемлющее представление вектора.
    """
    __slots__ = ('base', 'vec')

    def __init__(self, base: Point, vec):
        vec = np.array(vec, dtype=float)
        vec.setflags(write=False)
        self.base = base
        self.vec = vec

    def same_base(self, base: Point) -> bool:
        return self.base is base or self.base == base

    def require_base(self, base: Point) -> None:
        """
        Проверяет точку привязки.

        Вызывает:
            BaseMismatch: если вектор привязан к другой точке.
        """
        if not self.same_base(base):
            raise BaseMismatch(BASE_MISMATCH.format(
                expected=base, actual=self.base
            ))

    def _combine(self, other: 'Tangent') -> np.ndarray:
        other.require_base(self.base)
        return other.vec

    def __add__(self, other: 'Tangent') -> 'Tangent':
        return Tangent(self.base, self.vec + self._combine(other))

    def __sub__(self, other: 'Tangent') -> 'Tangent':
        return Tangent(self.base, self.vec - self._combine(other))

    def __neg__(self) -> 'Tangent':
        return Tangent(self.base, -self.vec)

    def __mul__(self, scalar: float) -> 'Tangent':
        return Tangent(self.base, scalar * self.vec)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> 'Tangent':
        return Tangent(self.base, self.vec / scalar)

    def inner(self, other: 'Tangent') -> float:
        return float(self.vec @ self._combine(other))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def is_zero(self) -> bool:
        return not self.vec.any()

    def __repr__(self):
        return (
            f'Tangent(base={self.base!r}, '
            f'vec={np.array2string(self.vec, precision=6)})'
        )


class Manifold(ABC):
    """
    Вложенное подмногообразие R^n с индуцированной евклидовой метрикой.
    Все операции чистые: объект не хранит изменяемого состояния.

    Атрибуты:
        - dim (int): размерность объемлющего пространства n.
        - retraction (RetractionKind): ретракция по умолчанию.
    """
    name = 'manifold'

    def __init__(
            self,
            dim: int,
            retraction: RetractionKind = RetractionKind.PROJECTIVE
    ):
        if dim < 1:
            raise DimensionMismatch(DIMENSION_MISMATCH.format(
                expected='n >= 1', actual=dim
            ))
        self.dim = dim
        self.retraction = RetractionKind(retraction)

    def __repr__(self):
        return (
            f'{type(self).__name__}(dim={self.dim}, '
            f'retraction={self.retraction.value})'
        )

    @property
    @abstractmethod
    def tangent_dim(self) -> int:
        """Размерность касательного пространства."""

    def _kind(self, kind: Optional[RetractionKind]) -> RetractionKind:
        return self.retraction if kind is None else RetractionKind(kind)

    def _vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(DIMENSION_MISMATCH.format(
                expected=(self.dim,), actual=v.shape
            ))
        return v

    @abstractmethod
    def point(self, coords) -> Point:
        """Строит точку из координат с проверкой инвариантов."""

    def tangent(self, x: Point, v) -> Tangent:
        """
        Строит касательный вектор с проверкой касания.

        Вызывает:
            - DimensionMismatch: если длина v не равна n.
            - NotTangent: если v не лежит в T_x.
        """
        v = self._vector(v)
        deviation = self._normal_component(x, v)
        if deviation > TANGENT_TOLERANCE * max(1.0, np.linalg.norm(v)):
            raise NotTangent(NOT_TANGENT.format(deviation=deviation))
        return Tangent(x, v)

    def _normal_component(self, x: Point, v: np.ndarray) -> float:
        return 0.0

    def zero(self, x: Point) -> Tangent:
        return Tangent(x, np.zeros(self.dim))

    def inner(self, eta: Tangent, zeta: Tangent) -> float:
        return eta.inner(zeta)

    def norm(self, eta: Tangent) -> float:
        return eta.norm()

    @abstractmethod
    def project_tangent(self, x: Point, v) -> Tangent:
        """Ортогональная проекция объемлющего вектора на T_x."""

    @abstractmethod
    def retract(
            self,
            x: Point,
            eta: Tangent,
            kind: Optional[RetractionKind] = None
    ) -> Point:
        """Ретракция R_x(η)."""

    @abstractmethod
    def inverse_retract(
            self,
            x: Point,
            y: Point,
            kind: Optional[RetractionKind] = None
    ) -> Tangent:
        """Обратная ретракция R_x^{-1}(y)."""

    @abstractmethod
    def d_retract(
            self,
            x: Point,
            eta: Tangent,
            zeta: Tangent,
            y: Optional[Point] = None
    ) -> Tangent:
        """Дифференциал ретракции DR_x(η)[ζ] в T_y, y = R_x(η)."""

    @abstractmethod
    def d_retract_adjoint(
            self,
            x: Point,
            eta: Tangent,
            xi: Tangent,
            y: Optional[Point] = None
    ) -> Tangent:
        """Сопряжённое отображение DR_x(η)^*: T_y -> T_x."""

    @abstractmethod
    def d_retract_adjoint_inverse(
            self,
            x: Point,
            eta: Tangent,
            xi: Tangent,
            y: Optional[Point] = None
    ) -> Tangent:
        """Обратное к сопряжённому (DR_x(η)^*)^{-1}: T_x -> T_y."""

    @abstractmethod
    def d_retract_inverse(
            self,
            x: Point,
            eta: Tangent,
            xi: Tangent,
            y: Optional[Point] = None
    ) -> Tangent:
        """Обратный перенос DR_x(η)^{-1}: T_y -> T_x."""

    def normal_vector(self, x: Point) -> Optional[np.ndarray]:
        """
        Единичная нормаль к T_x для многообразий коразмерности один; None,
        если касательное пространство совпадает с R^n.
        """
        return None

    @abstractmethod
    def tangent_basis(self, x: Point) -> np.ndarray:
        """Ортонормированный базис T_x столбцами матрицы n x d."""

    @abstractmethod
    def random_point(self, rng: np.random.Generator) -> Point:
        """Случайная точка многообразия."""

    def random_tangent(
            self,
            x: Point,
            rng: np.random.Generator,
            scale: float = 1.0
    ) -> Tangent:
        """Случайный касательный вектор с нормой scale."""
        eta = self.project_tangent(x, rng.standard_normal(self.dim))
        norm = eta.norm()
        return eta * (scale / norm) if norm > 0 else eta

    def solve_adjoint_inverse(
            self,
            x: Point,
            eta: Tangent,
            xi: Tangent,
            y: Optional[Point] = None
    ) -> Tangent:
        """
        Обращает DR_x(η)^* решением ограниченной линейной системы в
        ортонормированных базисах T_x и T_y. Независимая проверка
        замкнутых формул d_retract_adjoint_inverse.

        Вызывает:
            SingularTransport: если число обусловленности системы больше
            1e12.
        """
        xi.require_base(x)
        y = self.retract(x, eta) if y is None else y
        basis_x = self.tangent_basis(x)
        basis_y = self.tangent_basis(y)
        matrix = np.column_stack([
            basis_x.T @ self.d_retract_adjoint(
                x, eta, Tangent(y, column), y=y
            ).vec
            for column in basis_y.T
        ])
        condition = np.linalg.cond(matrix)
        if not condition <= CONDITION_LIMIT:
            raise SingularTransport(SINGULAR_TRANSPORT.format(
                condition=condition, limit=CONDITION_LIMIT
            ))
        coefficients = np.linalg.solve(matrix, basis_x.T @ xi.vec)
        return Tangent(y, basis_y @ coefficients)


class Euclidean(Manifold):
    """Тривиальное многообразие R^n: все переносы тождественны."""
    name = 'euclidean'

    @property
    def tangent_dim(self) -> int:
        return self.dim

    def point(self, coords) -> Point:
        return Point(self._vector(coords))

    def project_tangent(self, x: Point, v) -> Tangent:
        return Tangent(x, self._vector(v))

    def retract(self, x, eta, kind=None):
        eta.require_base(x)
        if eta.is_zero():
            return x
        return Point(x.coords + eta.vec)

    def inverse_retract(self, x, y, kind=None):
        return Tangent(x, y.coords - x.coords)

    def _target(self, x, eta, y):
        eta.require_base(x)
        return self.retract(x, eta) if y is None else y

    def d_retract(self, x, eta, zeta, y=None):
        zeta.require_base(x)
        return Tangent(self._target(x, eta, y), zeta.vec)

    def d_retract_adjoint(self, x, eta, xi, y=None):
        xi.require_base(self._target(x, eta, y))
        return Tangent(x, xi.vec)

    def d_retract_adjoint_inverse(self, x, eta, xi, y=None):
        xi.require_base(x)
        return Tangent(self._target(x, eta, y), xi.vec)

    def d_retract_inverse(self, x, eta, xi, y=None):
        xi.require_base(self._target(x, eta, y))
        return Tangent(x, xi.vec)

    def tangent_basis(self, x):
        return np.eye(self.dim)

    def random_point(self, rng):
        return Point(rng.standard_normal(self.dim))


class Sphere(Manifold):
    """
    Единичная сфера S^{n-1} в R^n. Проективная ретракция нормирует x + η,
    экспоненциальная идёт по большой окружности.
    """
    name = 'sphere'

    @property
    def tangent_dim(self) -> int:
        return self.dim - 1

    def point(self, coords) -> Point:
        """
        Строит точку сферы, перенормируя координаты.

        Вызывает:
            NotOnManifold: если |‖coords‖ - 1| > 1e-8.
        """
        coords = self._vector(coords)
        norm = np.linalg.norm(coords)
        if abs(norm - 1.0) > POINT_TOLERANCE:
            raise NotOnManifold(NOT_ON_MANIFOLD.format(
                deviation=abs(norm - 1.0)
            ))
        return Point(coords / norm)

    def _normal_component(self, x, v):
        return abs(float(x.coords @ v))

    def project_tangent(self, x: Point, v) -> Tangent:
        v = self._vector(v)
        return Tangent(x, v - (x.coords @ v) * x.coords)

    def retract(self, x, eta, kind=None):
        eta.require_base(x)
        if eta.is_zero():
            return x
        if self._kind(kind) is RetractionKind.PROJECTIVE:
            moved = x.coords + eta.vec
        else:
            step = eta.norm()
            moved = math.cos(step) * x.coords + (
                math.sin(step) / step
            ) * eta.vec
        return Point(moved / np.linalg.norm(moved))

    def inverse_retract(self, x, y, kind=None):
        """
        Вызывает:
            AntipodalOrOutOfDomain: для проективной ретракции при
            <x, y> <= 0, для экспоненциальной при y = -x.
        """
        kind = self._kind(kind)
        inner = float(x.coords @ y.coords)
        if kind is RetractionKind.PROJECTIVE:
            if inner <= 0.0:
                raise AntipodalOrOutOfDomain(OUT_OF_DOMAIN.format(
                    kind=kind.value, inner=inner
                ))
            return self.project_tangent(x, y.coords / inner - x.coords)
        if inner <= -1.0 + ANTIPODAL_MARGIN:
            raise AntipodalOrOutOfDomain(OUT_OF_DOMAIN.format(
                kind=kind.value, inner=inner
            ))
        normal = y.coords - inner * x.coords
        normal_norm = np.linalg.norm(normal)
        if normal_norm == 0.0:
            return self.zero(x)
        angle = math.atan2(normal_norm, inner)
        return self.project_tangent(x, angle * normal / normal_norm)

    def _frame(self, x: Point, eta: Tangent):
        """
        Возвращает (u, v, s) для экспоненциальной ретракции: направление шага,
        его образ в T_y и множитель sin‖η‖ / ‖η‖.
        """
        step = eta.norm()
        u = eta.vec / step
        v = -math.sin(step) * x.coords + math.cos(step) * u
        return u, v, math.sin(step) / step

    def _check_condition(self, condition: float) -> None:
        if not condition <= CONDITION_LIMIT:
            raise SingularTransport(SINGULAR_TRANSPORT.format(
                condition=condition, limit=CONDITION_LIMIT
            ))

    def _target(self, x, eta, y):
        eta.require_base(x)
        return self.retract(x, eta) if y is None else y

    def d_retract(self, x, eta, zeta, y=None):
        zeta.require_base(x)
        y = self._target(x, eta, y)
        if eta.is_zero():
            return Tangent(y, zeta.vec)
        if self.retraction is RetractionKind.PROJECTIVE:
            scale = np.linalg.norm(x.coords + eta.vec)
            moved = zeta.vec - (y.coords @ zeta.vec) * y.coords
            return Tangent(y, moved / scale)
        u, v, s = self._frame(x, eta)
        along = u @ zeta.vec
        return Tangent(y, along * v + s * (zeta.vec - along * u))

    def d_retract_adjoint(self, x, eta, xi, y=None):
        y = self._target(x, eta, y)
        xi.require_base(y)
        projected = xi.vec - (x.coords @ xi.vec) * x.coords
        if eta.is_zero():
            return Tangent(x, projected)
        if self.retraction is RetractionKind.PROJECTIVE:
            scale = np.linalg.norm(x.coords + eta.vec)
            return Tangent(x, projected / scale)
        u, v, s = self._frame(x, eta)
        return Tangent(
            x, (v @ xi.vec) * u + s * (projected - (u @ xi.vec) * u)
        )

    def d_retract_adjoint_inverse(self, x, eta, xi, y=None):
        """
        Вызывает:
            SingularTransport: если обусловленность переноса больше 1e12.
        """
        xi.require_base(x)
        y = self._target(x, eta, y)
        if eta.is_zero():
            return Tangent(y, xi.vec)
        if self.retraction is RetractionKind.PROJECTIVE:
            scale = np.linalg.norm(x.coords + eta.vec)
            self._check_condition(scale)
            return Tangent(
                y,
                scale * xi.vec - scale ** 2 * (xi.vec @ y.coords) * x.coords
            )
        u, v, s = self._frame(x, eta)
        self._check_condition(1.0 / abs(s) if s else math.inf)
        along = u @ xi.vec
        return Tangent(y, along * v + (xi.vec - along * u) / s)

    def d_retract_inverse(self, x, eta, xi, y=None):
        """
        Вызывает:
            SingularTransport: если обусловленность переноса больше 1e12.
        """
        y = self._target(x, eta, y)
        xi.require_base(y)
        if eta.is_zero():
            return Tangent(x, xi.vec)
        if self.retraction is RetractionKind.PROJECTIVE:
            scale = np.linalg.norm(x.coords + eta.vec)
            self._check_condition(scale)
            return Tangent(
                x,
                scale * xi.vec - scale ** 2 * (xi.vec @ x.coords) * y.coords
            )
        u, v, s = self._frame(x, eta)
        self._check_condition(1.0 / abs(s) if s else math.inf)
        along = v @ xi.vec
        return Tangent(x, along * u + (xi.vec - along * v) / s)

    def normal_vector(self, x):
        return x.coords

    def tangent_basis(self, x):
        return null_space(x.coords[np.newaxis, :])

    def random_point(self, rng):
        coords = rng.standard_normal(self.dim)
        return Point(coords / np.linalg.norm(coords))


MANIFOLDS = {
    Sphere.name: Sphere,
    Euclidean.name: Euclidean,
}


def make_manifold(
        name: str,
        dim: int,
        retraction: RetractionKind = RetractionKind.PROJECTIVE
) -> Manifold:
    """
    Создаёт многообразие по имени ('sphere' или 'euclidean').

    Вызывает:
        KeyError: если имя неизвестно.
    """
    return MANIFOLDS[name](dim, retraction)
