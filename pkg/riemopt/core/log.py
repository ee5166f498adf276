import logging
from typing import Optional

from riemopt.core.config import settings

_configured = False


def configure_logging(level: Optional[str] = None) -> None:
    """
    Настраивает корневой журнал пакета riemopt: один потоковый обработчик
    с форматом из настроек. Повторный вызов только меняет уровень.

    Аргументы:
        - level (str, необязательно): уровень журналирования; по умолчанию
          берётся settings.log_level.
    """
    global _configured
    logger = logging.getLogger('riemopt')
    logger.setLevel((level or settings.log_level).upper())
    if _configured:
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(settings.log_format))
    logger.addHandler(handler)
    _configured = True
