import pytest

from riemopt.schemas.experiment import AggregateRow, ParetoPoint, SummaryRow
from riemopt.schemas.run import IterationRecord
from riemopt.schemas.solver import Algorithm
from riemopt.services.report import (
    convergence_series,
    render_convergence_svg,
    render_front_svg,
    render_front_table,
    render_summary_table,
    summarize
)


def summary(algorithm, seed, iterations, seconds, converged=True):
    return SummaryRow(
        algorithm=algorithm,
        n=128,
        m_rows=50,
        seed=seed,
        iterations=iterations,
        converged=converged,
        wall_seconds=seconds,
        final_eta_norm=1e-5,
        inner_work=10 * iterations,
    )


def test_summary_means_are_exact():
    rows = [
        summary(Algorithm.RMPGM, 0, 100, 1.0),
        summary(Algorithm.RMPGM, 1, 200, 3.0),
        summary(Algorithm.RMSD, 0, 500, 2.0, converged=False),
    ]
    aggregates = summarize(rows)
    assert aggregates == [
        AggregateRow(
            algorithm=Algorithm.RMPGM, n=128, m_rows=50, runs=2,
            converged=2, mean_iterations=150.0, mean_seconds=2.0,
            mean_inner_work=1500.0,
        ),
        AggregateRow(
            algorithm=Algorithm.RMSD, n=128, m_rows=50, runs=1,
            converged=0, mean_iterations=500.0, mean_seconds=2.0,
            mean_inner_work=5000.0,
        ),
    ], 'Средние по зёрнам должны считаться точно.'


def test_summarize_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


def test_summary_table_layout():
    text = render_summary_table(summarize([
        summary(Algorithm.RMPGM, 0, 100, 1.0),
        summary(Algorithm.TR, 0, 30, 0.5),
    ]))
    lines = text.splitlines()
    assert lines[0].split() == ['Метод', '(128,50)', 'итер.', '(128,50)', 'с']
    assert lines[1].split() == ['rmpgm', '100.0', '1.000']
    assert lines[2].split() == ['tr', '30.0', '0.500']


def test_wide_and_long_tables_render():
    rows = [
        summary(Algorithm.RMPGM, 0, 100, 1.0).model_copy(
            update={'n': n, 'm_rows': n // 2}
        )
        for n in (16, 32, 64, 128, 256, 512, 1024)
    ]
    header = render_summary_table(summarize(rows)).splitlines()[0]
    assert len(header.split()) == 1 + 2 * 2 * 7, (
        'Таблица не должна ограничивать число размеров.'
    )
    front = [
        ParetoPoint(
            F_values=[index, 150 - index], seed=0,
            algorithm=Algorithm.RMPGM, start=index,
        )
        for index in range(150)
    ]
    assert len(render_front_table(front).splitlines()) == 151, (
        'Таблица фронта должна вмещать все точки.'
    )


def test_front_outputs():
    front = [
        ParetoPoint(
            F_values=[0.5, 1.5], seed=0, algorithm=Algorithm.RMPGM, start=2
        ),
        ParetoPoint(
            F_values=[1.0, 1.0], seed=0, algorithm=Algorithm.RMPGM, start=0
        ),
    ]
    table = render_front_table(front).splitlines()
    assert table[1].split() == ['0.500000', '1.500000', '0', 'rmpgm', '2']
    svg = render_front_svg({'rmpgm': front})
    assert svg.count('<circle') == 2 and svg.rstrip().endswith('</svg>')
    with pytest.raises(ValueError):
        render_front_svg({'rmpgm': []})


def record(k, eta_norm, seconds):
    return IterationRecord(
        k=k, F_values=[1.0, 1.0], eta_norm=eta_norm, param=1.0,
        accepted=True, wall_nanos=int(seconds * 1e9),
    )


def test_convergence_series_axes():
    trace = [record(0, 1.0, 0.0), record(1, 1e-3, 0.5), record(2, 0.0, 2.0)]
    assert convergence_series(trace) == [
        (0.0, 0.0), (1.0, -3.0), (2.0, -16.0)
    ], 'Нулевая норма должна заменяться на 1e-16.'
    seconds = [x for x, _ in convergence_series(trace, 'seconds')]
    assert seconds == [0.0, 0.5, 2.0]
    with pytest.raises(ValueError):
        convergence_series(trace, 'epochs')


def test_convergence_svg_has_line_per_method():
    traces = {
        'rmpgm': [record(0, 1.0, 0.0), record(1, 0.1, 0.2)],
        'tr': [record(0, 1.0, 0.0), record(1, 0.01, 0.4)],
        'rmsd': [record(0, 1.0, 0.0)],
    }
    for axis in ('iterations', 'seconds'):
        svg = render_convergence_svg(traces, axis)
        assert svg.count('<polyline') == 3, (
            'Каждому методу нужна своя ломаная.'
        )
        assert svg.startswith('<svg') and svg.rstrip().endswith('</svg>')
        assert 'log10' in svg and 'tr' in svg
    with pytest.raises(ValueError):
        render_convergence_svg({'rmpgm': []})
