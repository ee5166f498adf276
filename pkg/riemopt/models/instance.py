import numpy as np

from riemopt.models.manifold import RetractionKind, Sphere
from riemopt.models.objective import CompositeObjective, least_squares_l1
from riemopt.schemas.experiment import InstanceHeader


def _as_arrays(items) -> tuple:
    return tuple(np.asarray(item, dtype=float) for item in items)


class Instance:
    """
    Экземпляр двухцелевой задачи восстановления разреженных сигналов:
    F_i(x) = ½‖A_i x - b_i‖² + λ_i‖x‖₁ на сфере S^{n-1}.

    Атрибуты:
        - header (InstanceHeader): параметры генерации.
        - matrices (tuple[np.ndarray]): A₁, A₂ размера m_rows x n.
        - targets (tuple[np.ndarray]): b₁, b₂.
        - signals (tuple[np.ndarray]): x₁*, x₂*.
    """

    def __init__(self, header: InstanceHeader, matrices, targets, signals):
        self.header = header
        self.matrices = _as_arrays(matrices)
        self.targets = _as_arrays(targets)
        self.signals = _as_arrays(signals)

    def __repr__(self):
        return (
            f'Instance(n={self.header.n}, m_rows={self.header.m_rows}, '
            f'seed={self.header.seed})'
        )

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.header == other.header and all(
            np.array_equal(mine, theirs)
            for mine, theirs in zip(self.arrays(), other.arrays())
        )

    __hash__ = None

    def arrays(self) -> tuple:
        """Массивы в порядке хранения: A₁, A₂, b₁, b₂, x₁*, x₂*."""
        return self.matrices + self.targets + self.signals

    def objective(
            self,
            retraction: RetractionKind = RetractionKind.PROJECTIVE
    ) -> CompositeObjective:
        return least_squares_l1(
            Sphere(self.header.n, retraction),
            self.matrices,
            self.targets,
            [self.header.lambda1, self.header.lambda2],
        )
