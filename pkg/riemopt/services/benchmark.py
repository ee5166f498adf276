"""
Воспроизводимый эксперимент на сфере: генерация экземпляров, прогоны
методов по зёрнам, многостартовый поиск фронта Парето.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from riemopt.core.config import settings
from riemopt.core.exceptions import (
    EMPTY_SUPPORT,
    SUPPORT_OVERLAP,
    EmptySupport,
    SupportOverlap
)
from riemopt.core.rng import make_generator
from riemopt.models.instance import Instance
from riemopt.models.manifold import Point, Sphere
from riemopt.schemas.experiment import (
    ExperimentConfig,
    InstanceHeader,
    ParetoPoint,
    SummaryRow
)
from riemopt.schemas.run import RunResult
from riemopt.schemas.solver import Algorithm, InnerSolverConfig, SolverConfig
from riemopt.services.algorithms import run_algorithm
from riemopt.services.report import (
    CONVERGENCE_AXES,
    render_convergence_svg
)
from riemopt.storage.results import (
    front_storage,
    summary_storage,
    trace_storage
)

logger = logging.getLogger(__name__)

INSTANCE_STREAM = 0
START_STREAM = 1
EXPERIMENT_STARTED = (
    'Эксперимент n = {n}, m_rows = {m_rows}: {runs} прогонов в {workers} '
    'потоках.'
)
SWEEP_STARTED = 'Фронт Парето {algorithm}: {starts} стартов, seed = {seed}.'
SWEEP_FINISHED = 'Фронт Парето {algorithm}: {front} из {total} точек.'
FILES_WRITTEN = 'Записано файлов: {count} в {out_dir}.'


def worker_count() -> int:
    """Число потоков: RIEMOPT_THREADS или число логических ядер."""
    return max(1, settings.threads or os.cpu_count() or 1)


def generate_instance(config: ExperimentConfig, seed: int) -> Instance:
    """
    Генерирует экземпляр двухцелевой задачи восстановления сигналов.

    Элементы A_i независимы и имеют стандартное отклонение 1/√m_rows,
    сигналы x_i* единичной нормы с ⌈sparsity·n⌉ ненулевыми элементами на
    непересекающихся носителях, b_i = A_i x_i* + ε_i.

    Вызывает:
        EmptySupport: если sparsity·n < 1.
        SupportOverlap: если 2·⌈sparsity·n⌉ > n.
    """
    n = config.n
    if config.sparsity * n < 1:
        raise EmptySupport(EMPTY_SUPPORT.format(
            sparsity=config.sparsity, n=n
        ))
    nonzeros = config.nonzeros
    if 2 * nonzeros > n:
        raise SupportOverlap(SUPPORT_OVERLAP.format(nonzeros=nonzeros, n=n))
    rng = make_generator(seed, INSTANCE_STREAM)
    matrices = rng.normal(
        0.0, 1.0 / np.sqrt(config.m_rows), size=(2, config.m_rows, n)
    )
    order = rng.permutation(n)
    signals = np.zeros((2, n))
    for index in range(2):
        support = order[index * nonzeros:(index + 1) * nonzeros]
        values = rng.standard_normal(nonzeros)
        signals[index, support] = values / np.linalg.norm(values)
    targets = np.einsum('imn,in->im', matrices, signals)
    if config.noise_std:
        targets = targets + config.noise_std * rng.standard_normal(
            targets.shape
        )
    return Instance(
        InstanceHeader.from_config(config, seed),
        list(matrices),
        list(targets),
        list(signals),
    )


def start_point(n: int, seed: int, start: int = 0) -> Point:
    """Равномерная на сфере стартовая точка с номером start."""
    return Sphere(n).random_point(make_generator(seed, START_STREAM, start))


def solver_config(config: ExperimentConfig, seed: int) -> SolverConfig:
    return SolverConfig(
        max_iter=config.max_iter,
        tol=config.tol,
        inner=InnerSolverConfig(slice_solver=config.slice_solver),
        retraction=config.retraction,
        seed=seed,
    )


def _without_timing(result: RunResult) -> RunResult:
    return result.model_copy(update={'trace': [
        record.model_copy(update={'wall_nanos': 0})
        for record in result.trace
    ]})


def run_single(
        instance: Instance,
        algorithm: Algorithm,
        config: ExperimentConfig,
        start: int = 0
) -> RunResult:
    """
    Один прогон метода на экземпляре из старта с номером start.

    Аргументы:
        - instance (Instance): экземпляр задачи.
        - algorithm (Algorithm): метод.
        - config (ExperimentConfig): бюджет, порог и решатель среза.
        - start (int): номер стартовой точки.

    Возвращает:
        RunResult; без record_timing время в следе обнулено.
    """
    seed = instance.header.seed
    result = run_algorithm(
        algorithm,
        instance.objective(config.retraction),
        start_point(instance.header.n, seed, start),
        solver_config(config, seed),
    )
    return result if config.record_timing else _without_timing(result)


def summary_row(instance: Instance, result: RunResult) -> SummaryRow:
    return SummaryRow(
        algorithm=result.algorithm,
        n=instance.header.n,
        m_rows=instance.header.m_rows,
        seed=instance.header.seed,
        iterations=result.iterations,
        converged=result.converged,
        wall_seconds=result.wall_seconds,
        final_eta_norm=result.final_eta_norm,
        inner_work=result.inner_work,
    )


def trace_file_name(instance: Instance, algorithm: Algorithm) -> str:
    header = instance.header
    return (
        f'trace_{Algorithm(algorithm).value}_n{header.n}_m{header.m_rows}'
        f'_seed{header.seed}.csv'
    )


def summary_file_name(config: ExperimentConfig) -> str:
    return f'summary_n{config.n}_m{config.m_rows}.csv'


def front_file_name(instance: Instance, algorithm: Algorithm) -> str:
    header = instance.header
    return (
        f'front_{Algorithm(algorithm).value}_n{header.n}_m{header.m_rows}'
        f'_seed{header.seed}.csv'
    )


def run_grid(
        instances: Sequence[Instance],
        config: ExperimentConfig
) -> list[tuple[Instance, RunResult]]:
    """
    Прогоняет каждый метод config.algorithms на каждом экземпляре.
    Прогоны независимы и идут параллельно; порядок результатов совпадает
    с порядком (экземпляр, метод).
    """
    jobs = [
        (instance, algorithm)
        for instance in instances
        for algorithm in config.algorithms
    ]
    workers = min(worker_count(), len(jobs)) or 1
    logger.info(EXPERIMENT_STARTED.format(
        n=config.n, m_rows=config.m_rows, runs=len(jobs), workers=workers
    ))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(run_single, instance, algorithm, config)
            for instance, algorithm in jobs
        ]
        return [
            (instance, future.result())
            for (instance, _), future in zip(jobs, futures)
        ]


def convergence_file_name(instance: Instance, axis: str) -> str:
    header = instance.header
    return (
        f'convergence_{axis}_n{header.n}_m{header.m_rows}'
        f'_seed{header.seed}.svg'
    )


def write_convergence_plots(
        runs: Sequence[tuple[Instance, RunResult]],
        out_dir: Path
) -> list[Path]:
    """
    Пишет для каждого экземпляра две диаграммы log₁₀‖η_k‖ всех методов:
    по итерациям и по времени.
    """
    grouped = {}
    for instance, result in runs:
        traces = grouped.setdefault(id(instance), (instance, {}))[1]
        traces[result.algorithm.value] = result.trace
    paths = []
    for instance, traces in grouped.values():
        for axis in CONVERGENCE_AXES:
            path = Path(out_dir) / convergence_file_name(instance, axis)
            path.write_text(
                render_convergence_svg(traces, axis), encoding='utf-8'
            )
            paths.append(path)
    return paths


def run_experiment(
        instances: Sequence[Instance],
        config: ExperimentConfig,
        out_dir: Optional[Path] = None,
        plots: bool = False
) -> list[SummaryRow]:
    """
    Прогоны методов по экземплярам со сводкой.

    Если задан out_dir, записывает CSV следа каждого прогона и общий CSV
    сводки, а с plots ещё и диаграммы сходимости. Запись идёт в одном
    потоке после завершения всех прогонов.

    Возвращает:
        Строки сводки в порядке (экземпляр, метод).
    """
    runs = run_grid(instances, config)
    rows = [summary_row(instance, result) for instance, result in runs]
    if out_dir is not None:
        out_dir = Path(out_dir)
        for instance, result in runs:
            trace_storage.write(
                out_dir / trace_file_name(instance, result.algorithm),
                result.trace,
            )
        summary_storage.write(out_dir / summary_file_name(config), rows)
        written = len(runs) + 1
        if plots:
            written += len(write_convergence_plots(runs, out_dir))
        logger.info(FILES_WRITTEN.format(count=written, out_dir=out_dir))
    return rows


def nondominated(points: Iterable[ParetoPoint]) -> list[ParetoPoint]:
    """
    Оставляет точки, не доминируемые ни одной другой, в порядке
    возрастания F₁.
    """
    points = list(points)
    front = [
        point for point in points
        if not any(other.dominates(point) for other in points)
    ]
    return sorted(front, key=lambda point: tuple(point.F_values))


def dominated_fraction(
        candidates: Sequence[ParetoPoint],
        reference: Sequence[ParetoPoint]
) -> float:
    """Доля точек candidates, доминируемых хотя бы одной точкой reference."""
    if not candidates:
        return 0.0
    dominated = sum(
        any(point.dominates(candidate) for point in reference)
        for candidate in candidates
    )
    return dominated / len(candidates)


def pareto_sweep(
        instance: Instance,
        config: ExperimentConfig,
        algorithm: Algorithm,
        out_dir: Optional[Path] = None
) -> list[ParetoPoint]:
    """
    Запускает метод из config.n_starts стартов и возвращает
    недоминируемые конечные значения F, отсортированные по F₁.
    При заданном out_dir записывает CSV фронта.
    """
    seed = instance.header.seed
    logger.info(SWEEP_STARTED.format(
        algorithm=Algorithm(algorithm).value,
        starts=config.n_starts,
        seed=seed
    ))
    starts = range(config.n_starts)
    workers = min(worker_count(), config.n_starts)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(
            lambda start: run_single(instance, algorithm, config, start),
            starts,
        ))
    points = [
        ParetoPoint(
            F_values=result.trace[-1].F_values,
            seed=seed,
            algorithm=algorithm,
            start=start,
        )
        for start, result in zip(starts, results)
    ]
    front = nondominated(points)
    logger.info(SWEEP_FINISHED.format(
        algorithm=Algorithm(algorithm).value,
        front=len(front),
        total=len(points)
    ))
    if out_dir is not None:
        front_storage.write(
            Path(out_dir) / front_file_name(instance, algorithm), front
        )
    return front
