import logging
from argparse import Namespace

from API.engine_api import analyze_cycle, summary_dict
from config_data.cycle import CycleConfig
from handlers.handlers import (
    CONFIG_ARGUMENT,
    OUT_ARGUMENT,
    SET_ARGUMENT,
    apply_overrides,
    parse_overrides,
    read_json,
)
from loader import command
from measurement_stats.distributions import QuantityKind
from sweep.storage import distribution_frame, write_csv, write_json

DISTRIBUTION_FILES = {
    QuantityKind.WORK: "work_dist",
    QuantityKind.HEAT_H: "heat_h_dist",
    QuantityKind.HEAT_C: "heat_c_dist",
}


@command(
    "simulate",
    "Расчёт одного цикла: сводка и распределения работы и теплот",
    CONFIG_ARGUMENT,
    SET_ARGUMENT,
    OUT_ARGUMENT,
)
def command_simulate(args: Namespace) -> int:
    """Обработчик команды simulate.
    Все величины рассчитываются до записи первого файла.
    :param args: Аргументы командной строки.
    :return int: Код завершения.
    """
    raw = apply_overrides(read_json(args.config), parse_overrides(args.overrides))
    config = CycleConfig.model_validate(raw)
    analysis = analyze_cycle(config)
    summary = summary_dict(analysis)

    args.out.mkdir(parents=True, exist_ok=True)
    write_json(summary, args.out / "summary.json")
    for scheme, distributions in analysis.distributions.items():
        for kind, prefix in DISTRIBUTION_FILES.items():
            write_csv(distribution_frame(distributions[kind]), args.out / f"{prefix}_{scheme.value}.csv")
    logging.info(
        f"W = {analysis.thermo.work:.6g}, режим {analysis.regime().value}, "
        f"KL(DBN‖TPM) = {analysis.kl[QuantityKind.WORK]:.6g}"
    )
    return 0
