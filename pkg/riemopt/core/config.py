from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Настройки пакета. Значения загружаются из переменных окружения с
    префиксом RIEMOPT_ и из файла .env.

    Атрибуты:
        - threads (int, необязательный): верхняя граница числа потоков для
          параллельных прогонов (RIEMOPT_THREADS). По умолчанию - число
          логических ядер.
        - out_dir (str, по умолчанию = 'results'): каталог для CSV, SVG и
          файлов экземпляров.
        - log_level (str, по умолчанию = 'INFO'): уровень журналирования.
        - log_format (str): формат строки журнала.
    """
    threads: Optional[int] = None
    out_dir: str = 'results'
    log_level: str = 'INFO'
    log_format: str = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    model_config = SettingsConfigDict(
        env_prefix='RIEMOPT_',
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
    )


settings = Settings()
