import click

from riemopt.cli.options import (
    algorithm_option,
    build_config,
    experiment_options,
    format_option,
    instance_option,
    resolve_out_dir
)
from riemopt.cli.validators import load_instances
from riemopt.services.benchmark import run_experiment
from riemopt.services.report import render_summary_table, summarize


@click.command('run')
@experiment_options
@algorithm_option
@instance_option
@format_option
def run_command(instance_paths, fmt, **options):
    """
    Прогоняет методы на экземплярах и пишет CSV следов и сводки.
    С --format txt дополнительно печатает таблицу средних, с svg пишет
    диаграммы log ‖η_k‖ по итерациям и по времени.
    """
    config = build_config(options)
    instances = load_instances(config, instance_paths)
    out_dir = resolve_out_dir(options['out_dir'])
    rows = run_experiment(instances, config, out_dir, plots=fmt == 'svg')
    if fmt == 'txt':
        click.echo(render_summary_table(summarize(rows)), nl=False)
    else:
        click.echo(str(out_dir))
