"""
spinthermo - Главный модуль запуска
Спиновые сети с максимальной теплоёмкостью для равновесной термометрии
"""

import logging
import sys

from config.settings import settings
from src.cli import run
from src.exceptions import (
    NumericalTripwireError,
    RuntimeGateRefused,
    SpinThermoError,
    SpinThermoValidationError,
)

# Настройка логирования
settings.LOG_FILE.parent.mkdir(parents=True, exist_ok=True)
logging.basicConfig(
    level=settings.log_level,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(settings.LOG_FILE, encoding='utf-8'),
        logging.StreamHandler()
    ]
)

logger = logging.getLogger(__name__)

EXIT_CODES = (
    (SpinThermoValidationError, 2),
    (NumericalTripwireError, 3),
    (RuntimeGateRefused, 4),
    (SpinThermoError, 1),
)


def exit_code(error: SpinThermoError) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return 1


def main(argv=None) -> int:
    """Главная функция запуска CLI"""
    try:
        return run(argv)
    except SpinThermoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
