from pathlib import Path
from typing import Iterable, Optional, Sequence

import click

from riemopt.models.instance import Instance
from riemopt.schemas.experiment import ExperimentConfig
from riemopt.services.benchmark import generate_instance
from riemopt.storage.instance import instance_storage

FORMAT_NOT_SUPPORTED = (
    'Формат {fmt} не поддерживается командой {command}; доступны: {allowed}.'
)
NO_SUMMARY_FILES = 'Нужен хотя бы один CSV сводки!'
INSTANCE_SIZE_MISMATCH = (
    'Экземпляр {path} имеет размер ({n}, {m_rows}), а заданы '
    '({expected_n}, {expected_m_rows})!'
)


def check_format_allowed(
        fmt: str,
        command: str,
        allowed: Sequence[str]
) -> str:
    """
    Проверяет, что команда умеет выводить формат fmt.

    Вызывает:
        click.BadParameter: если формат не поддерживается.
    """
    if fmt not in allowed:
        raise click.BadParameter(FORMAT_NOT_SUPPORTED.format(
            fmt=fmt, command=command, allowed=', '.join(allowed)
        ), param_hint='--format')
    return fmt


def check_summary_paths(paths: Sequence[Path]) -> Sequence[Path]:
    if not paths:
        raise click.BadParameter(NO_SUMMARY_FILES, param_hint='SUMMARY')
    return paths


def load_instances(
        config: ExperimentConfig,
        paths: Iterable[Path] = ()
) -> list[Instance]:
    """
    Читает экземпляры из файлов или, если файлов нет, генерирует их по
    зёрнам конфигурации.

    Вызывает:
        click.BadParameter: если размер экземпляра из файла не совпадает с
        заданным в конфигурации.
    """
    paths = list(paths)
    if not paths:
        return [generate_instance(config, seed) for seed in config.seeds]
    instances = []
    for path in paths:
        instance = instance_storage.read(path)
        check_instance_size(instance, config, path)
        instances.append(instance)
    return instances


def check_instance_size(
        instance: Instance,
        config: ExperimentConfig,
        path: Optional[Path] = None
) -> None:
    header = instance.header
    if (header.n, header.m_rows) != (config.n, config.m_rows):
        raise click.BadParameter(INSTANCE_SIZE_MISMATCH.format(
            path=path,
            n=header.n,
            m_rows=header.m_rows,
            expected_n=config.n,
            expected_m_rows=config.m_rows,
        ), param_hint='--instance')
