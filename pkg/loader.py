import argparse
from typing import Any, Callable, Dict, Tuple

Argument = Tuple[tuple, Dict[str, Any]]

parser = argparse.ArgumentParser(
    prog="otto",
    description="Статистика работы и теплоты когерентного квантового цикла Отто при измерениях TPM и DBN",
)
subparsers = parser.add_subparsers(dest="command", required=True, metavar="команда")


def argument(*names: str, **options: Any) -> Argument:
    return names, options


def command(name: str, help_text: str, *arguments: Argument) -> Callable:
    """Регистрирует обработчик подкоманды на общем парсере.
    :param name: Имя подкоманды.
    :param help_text: Описание для справки.
    :param arguments: Аргументы подкоманды, созданные argument().
    :return Callable: Декоратор обработчика.
    """

    def register(handler: Callable) -> Callable:
        subparser = subparsers.add_parser(name, help=help_text, description=help_text)
        for names, options in arguments:
            subparser.add_argument(*names, **options)
        subparser.set_defaults(handler=handler)
        return handler

    return register
