import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from API.engine_api import CATEGORICAL_OUTPUTS
from qcore.distribution import DiscreteDistribution
from sweep.spec import SweepResult

FLOAT_FORMAT = "%.17g"


def results_frame(results: Sequence[SweepResult], axis_names: Sequence[str], outputs: Sequence[str]) -> pd.DataFrame:
    """Таблица результатов сетки: параметры осей, выходные величины, статус."""
    records = [{**result.parameters, **result.values, "status": result.status} for result in results]
    frame = pd.DataFrame.from_records(records, columns=[*axis_names, *outputs, "status"])
    for column in [*axis_names, *outputs]:
        if column not in CATEGORICAL_OUTPUTS:
            frame[column] = pd.to_numeric(frame[column], errors="coerce").astype(np.float64)
    return frame


def distribution_frame(dist: DiscreteDistribution) -> pd.DataFrame:
    return pd.DataFrame({"value": dist.values, "probability": dist.probabilities})


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    """CSV в UTF-8, числа с 17 значащими цифрами, пустая ячейка вместо отсутствующего значения."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n", encoding="utf-8")
    logging.info(f"Записан файл {path}")


def frame_records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="records")


def write_json(data: Any, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as file:
        json.dump(data, file, ensure_ascii=False, indent=2, allow_nan=False)
        file.write("\n")
    logging.info(f"Записан файл {path}")
