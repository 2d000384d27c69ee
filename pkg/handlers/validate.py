import logging
from argparse import Namespace

import pandas as pd

from handlers.handlers import PARALLELISM_ARGUMENT, resolve_parallelism
from loader import argument, command
from validation.suite import SUITE_CONFIGS, run_suite

FAULTS = ("skip-dephasing",)


def _status(result) -> str:
    if not result.passed:
        return "FAIL"
    return "PASS" if result.checked else "SKIP"


@command(
    "validate",
    "Проверка свойств на случайных конфигурациях",
    argument("--seed", type=int, default=0, help="Зерно случайных конфигураций"),
    PARALLELISM_ARGUMENT,
    argument("--configs", type=int, default=SUITE_CONFIGS, help="Число случайных конфигураций"),
    argument(
        "--inject-fault",
        choices=FAULTS,
        default=None,
        help="Тестовая неисправность: пропуск дефазировки после горячей изохоры в формулах TPM",
    ),
)
def command_validate(args: Namespace) -> int:
    """Обработчик команды validate: печатает таблицу свойств.
    :param args: Аргументы командной строки.
    :return int: 0, если все свойства выполнены, иначе 1.
    """
    results = run_suite(
        seed=args.seed,
        parallelism=resolve_parallelism(args.parallelism),
        count=args.configs,
        skip_dephasing=args.inject_fault == "skip-dephasing",
    )
    table = pd.DataFrame(
        {
            "invariant": [result.name for result in results],
            "checked": [result.checked for result in results],
            "failed": [result.failed for result in results],
            "worst": [f"{result.worst:.3e}" for result in results],
            "tolerance": [f"{result.tolerance:.0e}" for result in results],
            "status": [_status(result) for result in results],
        }
    )
    print(table.to_string(index=False))
    failed = [result.name for result in results if not result.passed]
    if failed:
        logging.error(f"Не выполнены свойства: {', '.join(failed)}")
        return 1
    logging.info("Все свойства выполнены")
    return 0
