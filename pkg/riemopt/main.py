import logging
import sys
from typing import Optional, Sequence

import click
from pydantic import ValidationError

from riemopt.cli.routers import main_group
from riemopt.core.exceptions import RiemoptError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
RUNTIME_FAILURE = 'Ошибка выполнения: {error}'


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Точка входа командной строки.

    Возвращает:
        0 при успехе, 1 при ошибке разбора аргументов, валидации
        параметров или недопустимых входных данных (ValueError), 2 при
        ошибке выполнения.
    """
    try:
        main_group.main(
            args=list(argv) if argv is not None else None,
            prog_name='riemopt',
            standalone_mode=False,
        )
    except click.UsageError as error:
        error.show()
        return EXIT_VALIDATION
    except ValidationError as error:
        click.echo(str(error), err=True)
        return EXIT_VALIDATION
    except (RiemoptError, OSError) as error:
        logger.error(RUNTIME_FAILURE.format(error=error))
        click.echo(RUNTIME_FAILURE.format(error=error), err=True)
        return EXIT_RUNTIME
    except ValueError as error:
        click.echo(str(error), err=True)
        return EXIT_VALIDATION
    except click.Abort:
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(cli_main())
