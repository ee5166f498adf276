import click

from riemopt.cli.options import (
    build_config,
    experiment_options,
    resolve_out_dir
)
from riemopt.services.benchmark import generate_instance
from riemopt.storage.instance import instance_storage


@click.command('gen')
@experiment_options
def gen_command(**options):
    """Генерирует файлы экземпляров для каждого зерна."""
    config = build_config(options)
    out_dir = resolve_out_dir(options['out_dir'])
    for seed in config.seeds:
        path = instance_storage.write(generate_instance(config, seed), out_dir)
        click.echo(str(path))
