from pathlib import Path

import click

from riemopt.cli.validators import check_summary_paths
from riemopt.services.report import render_summary_table, summarize
from riemopt.storage.results import summary_storage


@click.command('table')
@click.argument(
    'summaries', nargs=-1,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option(
    '--output', type=click.Path(dir_okay=False, path_type=Path),
    default=None, help='Записать таблицу в файл вместо вывода.',
)
def table_command(summaries, output):
    """Сводит CSV сводок в таблицу средних по методам и размерам."""
    check_summary_paths(summaries)
    text = render_summary_table(summarize(summary_storage.read_many(
        summaries
    )))
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding='utf-8')
