import numpy as np
import pytest

from riemopt.core.exceptions import InstanceFormatError
from riemopt.schemas.check import CheckReport
from riemopt.schemas.run import IterationRecord
from riemopt.services.benchmark import generate_instance
from riemopt.storage.base import format_cell, parse_flag
from riemopt.storage.instance import instance_storage
from riemopt.storage.results import check_storage, trace_storage


def record(k, values, beta=None):
    return IterationRecord(
        k=k,
        F_values=values,
        eta_norm=0.1,
        param=2.0,
        accepted=True,
        wall_nanos=0,
        beta=beta,
    )


def test_instance_file_round_trip(small_experiment, tmp_path):
    instance = generate_instance(small_experiment, 4)
    path = instance_storage.write(instance, tmp_path)
    assert path.name == 'instance_n16_m8_seed4.rinst'
    assert instance_storage.read(path) == instance, (
        'Экземпляр должен читаться из файла без потерь.'
    )


def test_instance_header_is_json_line(small_experiment):
    data = instance_storage.to_bytes(generate_instance(small_experiment, 0))
    header, _, payload = data.partition(b'\n')
    assert header.startswith(b'{') and b'"format_version":1' in header
    assert len(payload) == 8 * (2 * 8 * 16 + 2 * 8 + 2 * 16)


@pytest.mark.parametrize('corrupt', [
    lambda data: data.replace(b'\n', b' ', 1),
    lambda data: b'{broken' + data[data.index(b'\n'):],
    lambda data: data[:-8],
    lambda data: data.replace(
        b'"format_version":1', b'"format_version":9', 1
    ),
])
def test_corrupted_instance_rejected(small_experiment, corrupt):
    data = instance_storage.to_bytes(generate_instance(small_experiment, 0))
    with pytest.raises(InstanceFormatError):
        instance_storage.from_bytes(corrupt(data))


def test_matrices_stored_column_major(small_experiment):
    instance = generate_instance(small_experiment, 0)
    data = instance_storage.to_bytes(instance)
    payload = data.partition(b'\n')[2]
    first = np.frombuffer(payload, dtype='<f8', count=8)
    assert np.array_equal(first, instance.matrices[0][:, 0]), (
        'Матрицы должны храниться по столбцам.'
    )


def test_trace_columns(tmp_path):
    rows = [record(0, [1.0, 2.0], beta=0.25), record(1, [0.5, 1.5])]
    text = trace_storage.render(rows)
    header = text.splitlines()[0].split(',')
    assert header[:4] == ['k', 'F1', 'F2', 'eta_norm'], (
        'Столбцы следа: k, F1..Fm, затем остальные поля.'
    )
    assert '\r' not in text
    path = trace_storage.write(tmp_path / 'trace.csv', rows)
    assert trace_storage.read(path) == rows


def test_cell_format():
    assert format_cell(0.1) == '0.1'
    assert format_cell(None) == ''
    assert format_cell(True) == 'true'
    assert parse_flag('TRUE') and not parse_flag('false')


def test_check_report_csv(tmp_path):
    reports = [
        CheckReport.evaluate('fd_gradient', 1e-9, 10, 1e-6),
        CheckReport.skip('tr_trace'),
    ]
    path = check_storage.write(tmp_path / 'checks.csv', reports)
    assert check_storage.read(path) == reports
