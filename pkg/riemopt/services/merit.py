"""Меры стационарности u₀ и ū_k и оценки скорости по следу прогона."""
from typing import Sequence

import numpy as np

from riemopt.models.manifold import Manifold, Point
from riemopt.models.objective import CompositeObjective

EMPTY_REFERENCE = 'Опорное множество не может быть пустым.'


def _reference_values(
        obj: CompositeObjective,
        reference_set: Sequence[Point]
) -> np.ndarray:
    if not reference_set:
        raise ValueError(EMPTY_REFERENCE)
    return np.array([obj.eval_F(y) for y in reference_set])


def merit_u0_estimate(
        obj: CompositeObjective,
        x: Point,
        reference_set: Sequence[Point]
) -> float:
    """
    Нижняя оценка u₀(x) = sup_y min_i (F_i(x) - F_i(y)) по конечному
    опорному множеству.

    Вызывает:
        ValueError: если опорное множество пусто.
    """
    reference_values = _reference_values(obj, reference_set)
    gaps = obj.eval_F(x)[np.newaxis, :] - reference_values
    return float(gaps.min(axis=1).max())


def ergodic_merit(
        trace_values: np.ndarray,
        reference_values: np.ndarray
) -> np.ndarray:
    """
    Эргодическое среднее ū_k = max_y (1/k) Σ_{s<k} min_i (F_i(x_{s+1}) -
    F_i(y)) для k = 1..K по матрице значений следа размера (K+1) x m.
    """
    trace_values = np.asarray(trace_values, dtype=float)
    reference_values = np.atleast_2d(reference_values)
    gaps = (
        trace_values[1:, np.newaxis, :] - reference_values[np.newaxis, :, :]
    ).min(axis=2)
    counts = np.arange(1, gaps.shape[0] + 1)[:, np.newaxis]
    return (np.cumsum(gaps, axis=0) / counts).max(axis=1)


def nonergodic_gap(
        trace_values: np.ndarray,
        optimal_values: np.ndarray
) -> np.ndarray:
    """min_i (F_i(x_k) - F_i*) для k = 1..K."""
    trace_values = np.asarray(trace_values, dtype=float)
    return (trace_values[1:] - np.asarray(optimal_values)).min(axis=1)


def reference_radius(
        manifold: Manifold,
        x0: Point,
        reference_set: Sequence[Point]
) -> float:
    """D = max_y ‖R_{x₀}^{-1}(y)‖ по опорному множеству."""
    return max(
        manifold.inverse_retract(x0, y).norm() for y in reference_set
    )


def rate_bound(
        Ltilde: float,
        radius: float,
        curvature: float = 0.0,
        beta: float = 1.0,
        initial_gap: float = 0.0
) -> float:
    """
    Константа C в оценке k·ū_k <= C:
    (L̃/2)D² + (L̃κ/(2β))·initial_gap. В евклидовом случае κ = 0.
    """
    bound = 0.5 * Ltilde * radius ** 2
    if curvature:
        bound += Ltilde * curvature / (2.0 * beta) * initial_gap
    return bound
