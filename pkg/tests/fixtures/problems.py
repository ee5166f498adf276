import numpy as np
import pytest

from riemopt.core.rng import make_generator
from riemopt.models.manifold import Euclidean, Sphere
from riemopt.models.objective import (
    CompositeObjective,
    LeastSquaresTerm,
    least_squares_l1,
    make_l1
)
from riemopt.schemas.experiment import ExperimentConfig
from riemopt.schemas.solver import SolverConfig
from riemopt.services.diagnostics import quadratic_model


def sphere_instance(seed: int, n: int = 3, rows: int = 5, weight=0.05):
    rng = make_generator(seed, n)
    matrices = [rng.standard_normal((rows, n)) for _ in range(2)]
    targets = [rng.standard_normal(rows) for _ in range(2)]
    return least_squares_l1(Sphere(n), matrices, targets, [weight, weight])


def distance_objective(manifold, target, weight=0.0):
    """f(x) = ½‖x - b‖² с одной целью."""
    dim = manifold.dim
    return CompositeObjective(manifold, [(
        LeastSquaresTerm(np.eye(dim), np.asarray(target, dtype=float)),
        make_l1(weight),
    )])


@pytest.fixture
def small_sphere_objective():
    return sphere_instance(7)


@pytest.fixture
def sphere_objective_n8():
    return sphere_instance(11, n=8, rows=6)


@pytest.fixture
def euclidean_distance():
    return distance_objective(Euclidean(3), [1.0, -2.0, 0.5])


@pytest.fixture
def quadratic():
    return quadratic_model(6, 3)


@pytest.fixture
def fast_config():
    return SolverConfig(max_iter=200, tol=1e-5)


@pytest.fixture
def small_experiment():
    return ExperimentConfig(
        n=16,
        m_rows=8,
        sparsity=0.1,
        seeds=[0, 1],
        max_iter=40,
        tol=1e-3,
        n_starts=3,
        record_timing=False,
    )


@pytest.fixture
def start_point_factory():
    def factory(manifold, seed=0):
        return manifold.random_point(make_generator(seed, 99))
    return factory
