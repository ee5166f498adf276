from pydantic import (
    BaseModel,
    NonNegativeFloat,
    NonNegativeInt,
    model_validator
)

PASSED_MISMATCH = (
    'Флаг passed должен совпадать с условием worst_violation <= tolerance!'
)


class CheckReport(BaseModel):
    """
    Результат одной диагностической проверки.

    Атрибуты:
        - name (str): имя проверки.
        - passed (bool): проверка пройдена.
        - worst_violation (float): наибольшее нарушение по выборке.
        - samples (int): число проверенных случаев.
        - tolerance (float): объявленный допуск.
        - skipped (bool): проверка неприменима к входу.
    """
    name: str
    passed: bool
    worst_violation: NonNegativeFloat
    samples: NonNegativeInt
    tolerance: NonNegativeFloat
    skipped: bool = False

    @model_validator(mode='after')
    def check_passed(self):
        if not self.skipped and self.passed != (
                self.worst_violation <= self.tolerance
        ):
            raise ValueError(PASSED_MISMATCH)
        return self

    @classmethod
    def evaluate(
            cls,
            name: str,
            worst_violation: float,
            samples: int,
            tolerance: float
    ) -> 'CheckReport':
        return cls(
            name=name,
            passed=worst_violation <= tolerance,
            worst_violation=worst_violation,
            samples=samples,
            tolerance=tolerance,
        )

    @classmethod
    def skip(cls, name: str) -> 'CheckReport':
        return cls(
            name=name,
            passed=True,
            worst_violation=0.0,
            samples=0,
            tolerance=0.0,
            skipped=True,
        )

    def as_line(self) -> str:
        status = 'SKIP' if self.skipped else (
            'PASS' if self.passed else 'FAIL'
        )
        return (
            f'{status} {self.name}: worst={self.worst_violation:.3e} '
            f'tol={self.tolerance:.1e} samples={self.samples}'
        )
