"""Общие опции команд, повторяющие поля ExperimentConfig."""
from pathlib import Path

import click

from riemopt.core.config import settings
from riemopt.models.manifold import RetractionKind
from riemopt.schemas.experiment import ExperimentConfig
from riemopt.schemas.solver import Algorithm, SliceSolver

FORMATS = ('csv', 'svg', 'txt')
CONFIG_FIELDS = (
    'n', 'm_rows', 'sparsity', 'lambda1', 'lambda2', 'noise_std', 'seeds',
    'algorithms', 'max_iter', 'tol', 'n_starts', 'slice_solver',
    'retraction', 'record_timing',
)

_EXPERIMENT_OPTIONS = (
    click.option('--n', type=int, default=128, show_default=True),
    click.option('--m-rows', type=int, default=50, show_default=True),
    click.option('--sparsity', type=float, default=0.05, show_default=True),
    click.option('--lambda1', type=float, default=0.05, show_default=True),
    click.option('--lambda2', type=float, default=0.05, show_default=True),
    click.option('--noise-std', type=float, default=0.01, show_default=True),
    click.option(
        '--seed', 'seeds', type=int, multiple=True,
        help='Зерно экземпляра; можно повторять. По умолчанию 0..9.',
    ),
    click.option('--max-iter', type=int, default=500, show_default=True),
    click.option('--tol', type=float, default=1e-4, show_default=True),
    click.option('--n-starts', type=int, default=50, show_default=True),
    click.option(
        '--slice-solver',
        type=click.Choice([item.value for item in SliceSolver]),
        default=SliceSolver.MULTIPLIER.value,
        show_default=True,
    ),
    click.option(
        '--retraction',
        type=click.Choice([item.value for item in RetractionKind]),
        default=RetractionKind.PROJECTIVE.value,
        show_default=True,
    ),
    click.option(
        '--timing/--no-timing', 'record_timing', default=True,
        help='Без времени CSV воспроизводятся побайтно.',
    ),
    click.option(
        '--out-dir', type=click.Path(file_okay=False, path_type=Path),
        default=None, help='Каталог результатов (RIEMOPT_OUT_DIR).',
    ),
)

algorithm_option = click.option(
    '--algo', 'algorithms',
    type=click.Choice([item.value for item in Algorithm]),
    multiple=True,
    help='Метод; можно повторять. По умолчанию все.',
)
format_option = click.option(
    '--format', 'fmt', type=click.Choice(FORMATS), default='csv',
    show_default=True,
)
instance_option = click.option(
    '--instance', 'instance_paths',
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    multiple=True,
    help='Файл экземпляра вместо генерации по зёрнам.',
)


def experiment_options(command):
    for option in reversed(_EXPERIMENT_OPTIONS):
        command = option(command)
    return command


def build_config(options: dict) -> ExperimentConfig:
    """
    Собирает ExperimentConfig из опций команды; незаданные зёрна и методы
    берутся по умолчанию.

    Вызывает:
        pydantic.ValidationError: если параметры нарушают ограничения.
    """
    values = {
        name: options[name] for name in CONFIG_FIELDS
        if name in options and options[name] not in (None, ())
    }
    if 'seeds' in values:
        values['seeds'] = list(values['seeds'])
    if 'algorithms' in values:
        values['algorithms'] = list(values['algorithms'])
    return ExperimentConfig(**values)


def resolve_out_dir(out_dir) -> Path:
    return Path(out_dir) if out_dir is not None else Path(settings.out_dir)
