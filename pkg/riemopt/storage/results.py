from riemopt.schemas.check import CheckReport
from riemopt.schemas.experiment import ParetoPoint, SummaryRow
from riemopt.schemas.run import IterationRecord
from riemopt.storage.base import CSVStorage, VectorCSVStorage

trace_storage = VectorCSVStorage(
    IterationRecord, field='F_values', prefix='F', leading=('k',)
)
front_storage = VectorCSVStorage(ParetoPoint, field='F_values', prefix='F')
summary_storage = CSVStorage(SummaryRow)
check_storage = CSVStorage(CheckReport)
