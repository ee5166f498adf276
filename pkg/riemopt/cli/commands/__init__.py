from .check import check_command  # noqa
from .gen import gen_command  # noqa
from .pareto import pareto_command  # noqa
from .run import run_command  # noqa
from .table import table_command  # noqa
