import json
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from riemopt.core.exceptions import INSTANCE_FORMAT, InstanceFormatError
from riemopt.models.instance import Instance
from riemopt.schemas.experiment import FORMAT_VERSION, InstanceHeader

PAYLOAD_DTYPE = np.dtype('<f8')
INSTANCE_SUFFIX = '.rinst'
MISSING_HEADER = 'нет строки заголовка'
BAD_HEADER = 'заголовок не разобран ({error})'
BAD_VERSION = 'версия формата {version}, ожидалась {expected}'
BAD_LENGTH = 'длина данных {actual} байт, ожидалось {expected}'


class InstanceStorage:
    """
    Двоичный формат экземпляра: строка JSON с заголовком, перевод строки,
    затем A₁, A₂ (по столбцам), b₁, b₂, x₁*, x₂* в little-endian float64.
    """

    def file_name(self, header: InstanceHeader) -> str:
        return (
            f'instance_n{header.n}_m{header.m_rows}_seed{header.seed}'
            f'{INSTANCE_SUFFIX}'
        )

    def to_bytes(self, instance: Instance) -> bytes:
        header = instance.header.model_dump_json().encode('utf-8') + b'\n'
        payload = b''.join(
            np.asarray(array, dtype=PAYLOAD_DTYPE).tobytes(order='F')
            for array in instance.arrays()
        )
        return header + payload

    def from_bytes(self, data: bytes) -> Instance:
        """
        Разбирает экземпляр из байтов.

        Вызывает:
            InstanceFormatError: если заголовок, версия или длина данных не
            соответствуют формату.
        """
        line, separator, payload = data.partition(b'\n')
        if not separator:
            raise InstanceFormatError(INSTANCE_FORMAT.format(
                reason=MISSING_HEADER
            ))
        try:
            header = InstanceHeader.model_validate(json.loads(line))
        except (ValueError, ValidationError) as error:
            raise InstanceFormatError(INSTANCE_FORMAT.format(
                reason=BAD_HEADER.format(error=error)
            )) from error
        if header.format_version != FORMAT_VERSION:
            raise InstanceFormatError(INSTANCE_FORMAT.format(
                reason=BAD_VERSION.format(
                    version=header.format_version, expected=FORMAT_VERSION
                )
            ))
        shapes = [(header.m_rows, header.n)] * 2 + [(header.m_rows,)] * 2 + [
            (header.n,)
        ] * 2
        expected = sum(
            int(np.prod(shape)) for shape in shapes
        ) * PAYLOAD_DTYPE.itemsize
        if len(payload) != expected:
            raise InstanceFormatError(INSTANCE_FORMAT.format(
                reason=BAD_LENGTH.format(
                    actual=len(payload), expected=expected
                )
            ))
        arrays = []
        offset = 0
        for shape in shapes:
            size = int(np.prod(shape))
            flat = np.frombuffer(
                payload, dtype=PAYLOAD_DTYPE, count=size, offset=offset
            )
            arrays.append(flat.reshape(shape, order='F').astype(float))
            offset += size * PAYLOAD_DTYPE.itemsize
        return Instance(header, arrays[:2], arrays[2:4], arrays[4:])

    def write(self, instance: Instance, out_dir: Path) -> Path:
        path = Path(out_dir) / self.file_name(instance.header)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes(instance))
        return path

    def read(self, path: Path) -> Instance:
        return self.from_bytes(Path(path).read_bytes())


instance_storage = InstanceStorage()
