"""Текстовые таблицы и SVG-диаграммы по результатам эксперимента."""
import math
from itertools import groupby
from statistics import fmean
from typing import Mapping, Sequence

from riemopt.schemas.experiment import AggregateRow, ParetoPoint, SummaryRow
from riemopt.schemas.run import IterationRecord

EMPTY_SUMMARY = 'Нет строк сводки для таблицы.'
METHOD_TITLE = 'Метод'
SIZE_TITLE = '({n},{m_rows})'
ITERATIONS_TITLE = 'итер.'
SECONDS_TITLE = 'с'
FRONT_HEADER = ['F1', 'F2', 'seed', 'метод', 'старт']
SVG_WIDTH = 480
SVG_HEIGHT = 360
SVG_MARGIN = 48
SVG_COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd')
ITERATIONS_AXIS = 'iterations'
SECONDS_AXIS = 'seconds'
CONVERGENCE_AXES = (ITERATIONS_AXIS, SECONDS_AXIS)
ETA_FLOOR = 1e-16
UNKNOWN_AXIS = 'Ось {axis} не поддерживается; доступны: {allowed}.'


def _key(row: SummaryRow) -> tuple:
    return row.algorithm.value, row.n, row.m_rows


def summarize(rows: Sequence[SummaryRow]) -> list[AggregateRow]:
    """
    Средние арифметические по зёрнам для каждой пары (метод, размер).

    Вызывает:
        ValueError: если строк нет.
    """
    if not rows:
        raise ValueError(EMPTY_SUMMARY)
    aggregates = []
    for _, group in groupby(sorted(rows, key=_key), key=_key):
        group = list(group)
        aggregates.append(AggregateRow(
            algorithm=group[0].algorithm,
            n=group[0].n,
            m_rows=group[0].m_rows,
            runs=len(group),
            converged=sum(row.converged for row in group),
            mean_iterations=fmean(row.iterations for row in group),
            mean_seconds=fmean(row.wall_seconds for row in group),
            mean_inner_work=fmean(row.inner_work for row in group),
        ))
    return aggregates


def _render(table: Sequence[Sequence[str]]) -> str:
    widths = [
        max(len(line[index]) for line in table if index < len(line))
        for index in range(max(len(line) for line in table))
    ]
    return '\n'.join(
        '  '.join(
            cell.ljust(width) for cell, width in zip(line, widths)
        ).rstrip()
        for line in table
    ) + '\n'


def render_summary_table(aggregates: Sequence[AggregateRow]) -> str:
    """
    Таблица в духе сводки эксперимента: строки - методы, для каждого
    размера (n, m_rows) пара столбцов со средним числом итераций и средним
    временем.
    """
    sizes = sorted({(row.n, row.m_rows) for row in aggregates})
    methods = list(dict.fromkeys(row.algorithm for row in aggregates))
    cells = {(row.algorithm, row.n, row.m_rows): row for row in aggregates}
    header = [METHOD_TITLE]
    for n, m_rows in sizes:
        size = SIZE_TITLE.format(n=n, m_rows=m_rows)
        header += [f'{size} {ITERATIONS_TITLE}', f'{size} {SECONDS_TITLE}']
    table = [header]
    for method in methods:
        line = [method.value]
        for n, m_rows in sizes:
            row = cells.get((method, n, m_rows))
            line += (
                [f'{row.mean_iterations:.1f}', f'{row.mean_seconds:.3f}']
                if row else ['-', '-']
            )
        table.append(line)
    return _render(table)


def render_front_table(front: Sequence[ParetoPoint]) -> str:
    table = [FRONT_HEADER] + [
        [
            *(f'{value:.6f}' for value in point.F_values[:2]),
            str(point.seed),
            point.algorithm.value,
            str(point.start),
        ]
        for point in front
    ]
    return _render(table)


class _Axes:
    """Линейное отображение данных в область рисунка."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.x_low, self.x_span = min(xs), (max(xs) - min(xs)) or 1.0
        self.y_low, self.y_span = min(ys), (max(ys) - min(ys)) or 1.0
        self.bottom = SVG_HEIGHT - SVG_MARGIN
        self.right = SVG_WIDTH - SVG_MARGIN

    def position(self, x: float, y: float) -> tuple[str, str]:
        plot_width = SVG_WIDTH - 2 * SVG_MARGIN
        plot_height = SVG_HEIGHT - 2 * SVG_MARGIN
        left = SVG_MARGIN + (x - self.x_low) / self.x_span * plot_width
        top = self.bottom - (y - self.y_low) / self.y_span * plot_height
        return f'{left:.2f}', f'{top:.2f}'

    def frame(self, x_title: str, y_title: str) -> list[str]:
        bottom, right = self.bottom, self.right
        return [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
            f'height="{SVG_HEIGHT}">',
            f'<line x1="{SVG_MARGIN}" y1="{bottom}" x2="{right}" '
            f'y2="{bottom}" stroke="black"/>',
            f'<line x1="{SVG_MARGIN}" y1="{SVG_MARGIN}" x2="{SVG_MARGIN}" '
            f'y2="{bottom}" stroke="black"/>',
            f'<text x="{right}" y="{bottom + 32}" text-anchor="end">'
            f'{x_title} [{self.x_low:.4g}, '
            f'{self.x_low + self.x_span:.4g}]</text>',
            f'<text x="{SVG_MARGIN}" y="{SVG_MARGIN - 16}">'
            f'{y_title} [{self.y_low:.4g}, '
            f'{self.y_low + self.y_span:.4g}]</text>',
        ]


def _legend(index: int, label: str, color: str) -> str:
    return (
        f'<text x="{SVG_WIDTH - SVG_MARGIN}" y="{SVG_MARGIN + 16 * index}" '
        f'text-anchor="end" fill="{color}">{label}</text>'
    )


def render_front_svg(fronts: Mapping[str, Sequence[ParetoPoint]]) -> str:
    """
    Минимальная диаграмма рассеяния F₁ против F₂: оси, точки и легенда,
    по одному цвету на фронт.
    """
    points = [point for front in fronts.values() for point in front]
    if not points:
        raise ValueError(EMPTY_SUMMARY)
    axes = _Axes(
        [point.F_values[0] for point in points],
        [point.F_values[1] for point in points],
    )
    parts = axes.frame('F1', 'F2')
    for index, (label, front) in enumerate(fronts.items()):
        color = SVG_COLORS[index % len(SVG_COLORS)]
        for point in front:
            x, y = axes.position(*point.F_values[:2])
            parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
        parts.append(_legend(index, label, color))
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def convergence_series(
        trace: Sequence[IterationRecord],
        axis: str = ITERATIONS_AXIS
) -> list[tuple[float, float]]:
    """
    Точки (k или секунды, log₁₀‖η_k‖) одного следа; нулевая норма
    заменяется на ETA_FLOOR.

    Вызывает:
        ValueError: если axis не 'iterations' и не 'seconds'.
    """
    if axis not in CONVERGENCE_AXES:
        raise ValueError(UNKNOWN_AXIS.format(
            axis=axis, allowed=', '.join(CONVERGENCE_AXES)
        ))
    return [
        (
            float(record.k) if axis == ITERATIONS_AXIS
            else record.wall_nanos / 1e9,
            math.log10(max(record.eta_norm, ETA_FLOOR)),
        )
        for record in trace
    ]


def render_convergence_svg(
        traces: Mapping[str, Sequence[IterationRecord]],
        axis: str = ITERATIONS_AXIS
) -> str:
    """
    Ломаные log₁₀‖η_k‖ по итерациям или по времени, по одной на метод.
    """
    series = {
        label: convergence_series(trace, axis)
        for label, trace in traces.items()
    }
    points = [point for line in series.values() for point in line]
    if not points:
        raise ValueError(EMPTY_SUMMARY)
    axes = _Axes(
        [point[0] for point in points], [point[1] for point in points]
    )
    x_title = 'k' if axis == ITERATIONS_AXIS else SECONDS_TITLE
    parts = axes.frame(x_title, 'log10 ‖η‖')
    for index, (label, line) in enumerate(series.items()):
        color = SVG_COLORS[index % len(SVG_COLORS)]
        path = ' '.join(
            ','.join(axes.position(x, y)) for x, y in line
        )
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}"/>'
        )
        parts.append(_legend(index, label, color))
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'
