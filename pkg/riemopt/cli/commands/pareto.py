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
from riemopt.schemas.solver import Algorithm
from riemopt.services.benchmark import pareto_sweep
from riemopt.services.report import render_front_svg, render_front_table

SVG_FILE = 'front_n{n}_m{m_rows}_seed{seed}.svg'


@click.command('pareto')
@experiment_options
@algorithm_option
@instance_option
@format_option
def pareto_command(instance_paths, fmt, **options):
    """
    Многостартовый поиск фронта Парето. CSV фронта пишется всегда;
    svg добавляет диаграмму, txt печатает фронт таблицей.
    """
    if not options['algorithms']:
        options['algorithms'] = (Algorithm.RMPGM.value,)
    config = build_config(options)
    out_dir = resolve_out_dir(options['out_dir'])
    for instance in load_instances(config, instance_paths):
        fronts = {
            algorithm.value: pareto_sweep(
                instance, config, algorithm, out_dir
            )
            for algorithm in config.algorithms
        }
        if fmt == 'svg':
            path = out_dir / SVG_FILE.format(
                n=instance.header.n,
                m_rows=instance.header.m_rows,
                seed=instance.header.seed,
            )
            path.write_text(render_front_svg(fronts), encoding='utf-8')
            click.echo(str(path))
        elif fmt == 'txt':
            for front in fronts.values():
                click.echo(render_front_table(front), nl=False)
        else:
            click.echo(str(out_dir))
