import logging

import click

from riemopt.cli.options import (
    build_config,
    experiment_options,
    format_option,
    instance_option,
    resolve_out_dir
)
from riemopt.cli.validators import check_format_allowed, load_instances
from riemopt.core.exceptions import CHECKS_FAILED, DiagnosticsFailed
from riemopt.services.diagnostics import run_check_suite
from riemopt.storage.results import check_storage

logger = logging.getLogger(__name__)

CHECK_FORMATS = ('csv', 'txt')
CHECK_FILE = 'checks_n{n}_m{m_rows}_seed{seed}.csv'


@click.command('check')
@experiment_options
@instance_option
@format_option
@click.option('--samples', type=int, default=50, show_default=True)
def check_command(instance_paths, fmt, samples, **options):
    """
    Набор диагностических проверок на экземплярах.

    Вызывает:
        DiagnosticsFailed: если хотя бы одна проверка не пройдена.
    """
    check_format_allowed(fmt, 'check', CHECK_FORMATS)
    config = build_config(options)
    out_dir = resolve_out_dir(options['out_dir'])
    reports = []
    for instance in load_instances(config, instance_paths):
        seed = instance.header.seed
        instance_reports = run_check_suite(
            instance.objective(config.retraction),
            seed=seed,
            n_samples=samples,
        )
        if fmt == 'csv':
            check_storage.write(out_dir / CHECK_FILE.format(
                n=instance.header.n,
                m_rows=instance.header.m_rows,
                seed=seed,
            ), instance_reports)
        for report in instance_reports:
            click.echo(report.as_line())
        reports.extend(instance_reports)
    failed = sum(not report.passed for report in reports)
    if failed:
        raise DiagnosticsFailed(CHECKS_FAILED.format(
            count=failed, total=len(reports)
        ))
