import click

from riemopt.cli.commands import (
    check_command,
    gen_command,
    pareto_command,
    run_command,
    table_command
)
from riemopt.core.config import settings
from riemopt.core.log import configure_logging


@click.group('riemopt')
@click.option(
    '--log-level', default=None,
    type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                      case_sensitive=False),
    help='Уровень журналирования (RIEMOPT_LOG_LEVEL).',
)
def main_group(log_level):
    """Многоцелевые проксимальные градиентные методы на многообразиях."""
    configure_logging(log_level or settings.log_level)


main_group.add_command(gen_command)
main_group.add_command(run_command)
main_group.add_command(pareto_command)
main_group.add_command(check_command)
main_group.add_command(table_command)
