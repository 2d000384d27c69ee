from argparse import Namespace

from config_data.config import resolve_cache_dir
from handlers.handlers import OUT_ARGUMENT, PARALLELISM_ARGUMENT, resolve_parallelism
from loader import argument, command
from sweep.figures import FIGURE_NAMES, figure_data
from sweep.storage import write_csv, write_json


@command(
    "figure",
    "Данные рисунка по встроенному пресету параметров",
    argument("name", choices=FIGURE_NAMES, help="Имя рисунка"),
    OUT_ARGUMENT,
    PARALLELISM_ARGUMENT,
    argument("--lambda-points", type=int, default=None, help="Число точек по λ"),
    argument("--g-points", type=int, default=None, help="Число точек по g для контурных рисунков"),
    argument("--no-cache", action="store_true", help="Не использовать кэш точек"),
)
def command_figure(args: Namespace) -> int:
    """Обработчик команды figure: пишет <name>.csv и <name>.meta.json.
    :param args: Аргументы командной строки.
    :return int: Код завершения.
    """
    cache_dir = None if args.no_cache else resolve_cache_dir(args.out)
    data = figure_data(
        args.name,
        parallelism=resolve_parallelism(args.parallelism),
        cache_dir=cache_dir,
        lambda_points=args.lambda_points,
        g_points=args.g_points,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(data.frame, args.out / f"{data.name}.csv")
    write_json(data.meta, args.out / f"{data.name}.meta.json")
    return 0
