import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from config_data.config import settings
from handlers.figure import command_figure
from handlers.handlers import DEFAULT_COMMANDS, UsageError, describe_validation_error
from handlers.run_sweep import command_sweep
from handlers.simulate import command_simulate
from handlers.validate import command_validate
from loader import parser

logging.basicConfig(level=settings.LOG_LEVEL)
parser.epilog = "Команды: " + "; ".join(f"{name} - {text}" for name, text in DEFAULT_COMMANDS)


def main(argv: Optional[List[str]] = None) -> int:
    """Точка входа командной строки.
    :param argv: Аргументы без имени программы; по умолчанию sys.argv[1:].
    :return int: Код завершения: 0 - успех, 1 - ошибка расчёта или данных, 2 - ошибка использования.
    """
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.handler(args)
    except UsageError as e:
        logging.error(f"Ошибка в аргументах: {e}")
        return 2
    except ValidationError as e:
        logging.error(f"Недопустимая конфигурация: {describe_validation_error(e)}")
        return 1
    except FileNotFoundError as e:
        logging.error(f"{e}")
        return 1
    except Exception as e:
        logging.error(f"Ошибка при выполнении команды {args.command}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
