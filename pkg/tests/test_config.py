import pytest
from pydantic import ValidationError

from riemopt.cli.options import build_config
from riemopt.core.config import Settings
from riemopt.core.rng import make_generator
from riemopt.schemas.experiment import ExperimentConfig
from riemopt.schemas.solver import (
    Algorithm,
    InnerSolverConfig,
    SolverConfig,
    TrustRegionParams
)
from riemopt.services import benchmark


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv('RIEMOPT_THREADS', '3')
    monkeypatch.setenv('RIEMOPT_OUT_DIR', 'out')
    settings = Settings()
    assert settings.threads == 3 and settings.out_dir == 'out', (
        'Настройки должны читаться из переменных RIEMOPT_*.'
    )


def test_worker_count_respects_threads(monkeypatch):
    monkeypatch.setattr(benchmark, 'settings', Settings(threads=2))
    assert benchmark.worker_count() == 2


@pytest.mark.parametrize('fields', [
    {'n': 50, 'm_rows': 50},
    {'sparsity': 0.0},
    {'sparsity': 1.0},
    {'seeds': []},
    {'seeds': [1, 1]},
    {'algorithms': []},
    {'unknown': 1},
])
def test_experiment_config_rejects(fields):
    with pytest.raises(ValidationError):
        ExperimentConfig(**fields)


def test_experiment_defaults():
    config = ExperimentConfig()
    assert (config.n, config.m_rows, config.nonzeros) == (128, 50, 7)
    assert config.seeds == list(range(10))
    assert config.algorithms == list(Algorithm)
    assert ExperimentConfig(
        algorithms=['tr', 'tr', 'rmsd']
    ).algorithms == [Algorithm.TR, Algorithm.RMSD]


@pytest.mark.parametrize('model, fields', [
    (SolverConfig, {'growth': 1.0}),
    (SolverConfig, {'tol': 0.0}),
    (TrustRegionParams, {'tau1': 1.5}),
    (TrustRegionParams, {'s1': 0.8, 's2': 0.5}),
    (TrustRegionParams, {'sigma0': 1e-7}),
    (InnerSolverConfig, {'unknown': True}),
])
def test_solver_config_rejects(model, fields):
    with pytest.raises(ValidationError):
        model(**fields)


def test_epsilon_schedule():
    config = SolverConfig(eps_scale=2.0, eps_power=2.0)
    assert [config.epsilon(k) for k in range(3)] == [2.0, 0.5, 2.0 / 9]
    assert SolverConfig(eps_scale=0.0).epsilon(5) == 0.0


def test_build_config_skips_unset_options():
    config = build_config({
        'n': 32, 'm_rows': 10, 'seeds': (), 'algorithms': ('rmpgm',),
        'tol': None, 'out_dir': None,
    })
    assert config.seeds == list(range(10))
    assert config.algorithms == [Algorithm.RMPGM]
    assert config.tol == 1e-4


def test_generator_streams_are_independent():
    first = make_generator(0, 0).standard_normal(4)
    second = make_generator(0, 1).standard_normal(4)
    assert (first != second).any()
    assert (make_generator(0, 0).standard_normal(4) == first).all()
