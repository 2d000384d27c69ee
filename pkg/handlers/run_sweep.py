from argparse import Namespace

from config_data.config import resolve_cache_dir
from handlers.handlers import (
    CONFIG_ARGUMENT,
    OUT_ARGUMENT,
    PARALLELISM_ARGUMENT,
    SET_ARGUMENT,
    apply_overrides,
    parse_overrides,
    read_json,
    resolve_parallelism,
)
from loader import argument, command
from sweep.runner import run_sweep
from sweep.spec import SweepSpec
from sweep.storage import frame_records, results_frame, write_csv, write_json


@command(
    "sweep",
    "Расчёт сетки параметров",
    CONFIG_ARGUMENT,
    OUT_ARGUMENT,
    PARALLELISM_ARGUMENT,
    SET_ARGUMENT,
    argument("--json", action="store_true", help="Дополнительно записать sweep.json с тем же содержимым"),
    argument("--no-cache", action="store_true", help="Не использовать кэш точек"),
)
def command_sweep(args: Namespace) -> int:
    """Обработчик команды sweep.
    :param args: Аргументы командной строки.
    :return int: Код завершения.
    """
    raw = apply_overrides(read_json(args.config), parse_overrides(args.overrides), sweep=True)
    spec = SweepSpec.model_validate(raw)
    parallelism = resolve_parallelism(args.parallelism)
    cache_dir = None if args.no_cache else resolve_cache_dir(args.out)
    results = run_sweep(spec, parallelism, cache_dir)

    frame = results_frame(results, spec.axis_names, spec.outputs)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(frame, args.out / "sweep.csv")
    if args.json:
        write_json(frame_records(frame), args.out / "sweep.json")
    return 0
