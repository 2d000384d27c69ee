import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from API.engine_api import analyze_cycle, load_point, point_values, save_point
from config_data.cycle import CycleConfig
from database.model import close_cache, init_cache
from qcore.errors import ConvergenceError
from sweep.spec import (
    STATUS_FAILED,
    STATUS_NON_CONVERGED,
    SweepResult,
    SweepSpec,
    row_from_payload,
)

Task = List[Tuple[Tuple[int, ...], CycleConfig]]


def evaluate_point(config: CycleConfig) -> Dict[str, Any]:
    """Расчёт одной точки; ошибки сходимости и прочие сбои превращаются в статус, а не исключение."""
    try:
        return {"values": point_values(analyze_cycle(config)), "error": None}
    except ConvergenceError as e:
        logging.error(f"Точка {config.model_dump_json()} не сошлась: {e}")
        return {"values": None, "error": STATUS_NON_CONVERGED, "message": str(e)}
    except Exception as e:
        logging.error(f"Ошибка расчёта точки {config.model_dump_json()}: {e}")
        return {"values": None, "error": STATUS_FAILED, "message": str(e)}


def evaluate_task(task: Task) -> List[Tuple[Tuple[int, ...], Dict[str, Any]]]:
    """Точки с общими параметрами унитарных ходов: пропагаторы считаются один раз."""
    return [(index, evaluate_point(config)) for index, config in task]


def group_tasks(pending: Task, parallelism: int = 1) -> List[Task]:
    """Группирует точки по параметрам унитарных ходов; группы дробятся, если их меньше, чем процессов."""
    groups: Dict[tuple, Task] = {}
    for index, config in pending:
        groups.setdefault(config.stroke_key(), []).append((index, config))
    if not groups:
        return []
    splits = max(1, math.ceil(parallelism / len(groups)))
    tasks = []
    for group in groups.values():
        size = math.ceil(len(group) / splits)
        tasks.extend(group[start : start + size] for start in range(0, len(group), size))
    return sorted(tasks, key=lambda task: task[0][0])


def run_sweep(spec: SweepSpec, parallelism: int = 1, cache_dir: Optional[Path] = None) -> List[SweepResult]:
    """Вычисляет все точки сетки ровно один раз.
    :param spec: Описание сетки.
    :param parallelism: Число рабочих процессов.
    :param cache_dir: Каталог кэша точек; без него кэш не используется.
    :return List[SweepResult]: Результаты в лексикографическом порядке индексов.
    """
    points = list(spec.points())
    configs = {index: config for index, _, config in points}
    payloads: Dict[Tuple[int, ...], Dict[str, Any]] = {}

    if cache_dir is not None:
        init_cache(cache_dir)
        for index, config in configs.items():
            cached = load_point(config)
            if cached is not None:
                payloads[index] = cached
        logging.info(f"Из кэша взято {len(payloads)} из {len(points)} точек")

    tasks = group_tasks(
        [(index, config) for index, config in configs.items() if index not in payloads], parallelism
    )
    try:
        for done, results in enumerate(_execute(tasks, parallelism), start=1):
            for index, payload in results:
                payloads[index] = payload
                if cache_dir is not None and payload["error"] != STATUS_FAILED:
                    save_point(configs[index], payload)
            logging.info(f"Готово групп: {done}/{len(tasks)}")
    finally:
        if cache_dir is not None:
            close_cache()

    results = []
    for index, parameters, _ in points:
        values, status = row_from_payload(payloads[index], spec.outputs)
        results.append(SweepResult(index, parameters, values, status))
    return results


def _execute(tasks: List[Task], parallelism: int):
    if parallelism <= 1 or len(tasks) <= 1:
        for task in tasks:
            yield evaluate_task(task)
        return
    with ProcessPoolExecutor(max_workers=parallelism) as executor:
        futures = [executor.submit(evaluate_task, task) for task in tasks]
        for future in as_completed(futures):
            yield future.result()
