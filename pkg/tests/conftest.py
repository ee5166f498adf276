from pathlib import Path

try:
    from riemopt.main import cli_main  # noqa
except (NameError, ImportError):
    raise AssertionError(
        'Не обнаружена точка входа `cli_main`. '
        'Проверьте и поправьте: она должна быть доступна в модуле '
        '`riemopt.main`.',
    )

try:
    from riemopt.models.manifold import Euclidean, Sphere  # noqa
except (NameError, ImportError):
    raise AssertionError(
        'Не обнаружены многообразия `Euclidean, Sphere`. '
        'Проверьте и поправьте: они должны быть доступны в модуле '
        '`riemopt.models.manifold`.',
    )

try:
    from riemopt.schemas.solver import SolverConfig  # noqa
except (NameError, ImportError):
    raise AssertionError(
        'Не обнаружена схема параметров `SolverConfig`. '
        'Проверьте и поправьте: она должна быть доступна в модуле '
        '`riemopt.schemas.solver`.',
    )


BASE_DIR = Path(__file__).resolve(strict=True).parent.parent

pytest_plugins = [
    'fixtures.geometry',
    'fixtures.problems',
]
