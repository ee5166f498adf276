import csv
import io
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

from pydantic import BaseModel

EMPTY_CELL = ''


def format_cell(value: Any) -> str:
    """
    Текстовое представление ячейки: числа с плавающей точкой в кратчайшей
    точной десятичной записи, флаги строчными буквами, None пустой строкой.
    """
    if value is None:
        return EMPTY_CELL
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_flag(cell: str) -> bool:
    return cell.strip().lower() == 'true'


class CSVStorage:
    """Базовый класс для чтения и записи строк-моделей в CSV."""

    def __init__(self, model: type[BaseModel]):
        """
        Инициализация CSVStorage со схемой строки.

        Аргументы:
            - model: pydantic-модель одной строки CSV.
        """
        self.model = model

    def columns(self, rows: Sequence[BaseModel]) -> list[str]:
        """Заголовок CSV; по умолчанию - поля модели в порядке объявления."""
        return list(self.model.model_fields)

    def serialize(self, row: BaseModel) -> dict[str, Any]:
        return {name: getattr(row, name) for name in self.model.model_fields}

    def deserialize(self, record: dict[str, str]) -> BaseModel:
        """
        Собирает модель из строки CSV; пустые ячейки считаются None.

        Вызывает:
            pydantic.ValidationError: если строка не проходит валидацию.
        """
        return self.model.model_validate({
            name: (None if cell == EMPTY_CELL else cell)
            for name, cell in record.items()
        })

    def render(self, rows: Sequence[BaseModel]) -> str:
        """
        Формирует текст CSV с заголовком и переводами строк LF.

        Аргументы:
            - rows (Sequence[BaseModel]): строки для записи.

        Возвращает:
            Текст CSV.
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        columns = self.columns(rows)
        writer.writerow(columns)
        for row in rows:
            record = self.serialize(row)
            writer.writerow(format_cell(record[name]) for name in columns)
        return buffer.getvalue()

    def write(self, path: Path, rows: Sequence[BaseModel]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(rows), encoding='utf-8', newline='')
        return path

    def read(self, path: Path) -> list[BaseModel]:
        with open(path, encoding='utf-8', newline='') as source:
            return [
                self.deserialize(record) for record in csv.DictReader(source)
            ]

    def read_many(self, paths: Iterable[Path]) -> list[BaseModel]:
        rows = []
        for path in paths:
            rows.extend(self.read(path))
        return rows


class VectorCSVStorage(CSVStorage):
    """
    CSVStorage, раскладывающий векторное поле модели по столбцам
    prefix1..prefixm перед остальными полями.

    Атрибуты:
        - field (str): имя векторного поля модели.
        - prefix (str): префикс столбцов вектора.
        - leading (tuple[str]): поля, которые идут до вектора.
    """

    def __init__(
            self,
            model: type[BaseModel],
            field: str,
            prefix: str,
            leading: tuple = ()
    ):
        super().__init__(model)
        self.field = field
        self.prefix = prefix
        self.leading = leading

    def _vector_columns(self, size: int) -> list[str]:
        return [f'{self.prefix}{index}' for index in range(1, size + 1)]

    def columns(self, rows):
        size = len(getattr(rows[0], self.field)) if rows else 0
        rest = [
            name for name in self.model.model_fields
            if name != self.field and name not in self.leading
        ]
        return [*self.leading, *self._vector_columns(size), *rest]

    def serialize(self, row):
        record = super().serialize(row)
        record.update(zip(
            self._vector_columns(len(record[self.field])),
            record.pop(self.field)
        ))
        return record

    def deserialize(self, record):
        vector = []
        index = 1
        while f'{self.prefix}{index}' in record:
            vector.append(float(record.pop(f'{self.prefix}{index}')))
            index += 1
        record[self.field] = vector
        return super().deserialize(record)
