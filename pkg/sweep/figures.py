import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from API.engine_api import analyze_cycle
from config_data.cycle import CycleConfig
from measurement_stats.distributions import QuantityKind
from measurement_stats.joints import Scheme
from sweep.runner import run_sweep
from sweep.spec import Axis, SweepSpec, linspace_values
from sweep.storage import results_frame

COHERENT_ENGINE = {"d": 3, "omega_h": 10.0, "T_h": 14.0, "omega_c": 0.5, "T_c": 0.1, "g": 9.0}
QUASISTATIC_ENGINE = {"d": 3, "omega_h": 1.0, "T_h": 1.2, "omega_c": 0.85, "T_c": 1.0, "g": 0.06}

LAMBDA_RANGE = (0.02, 1.0, 50)
G_RANGE = (0.0, 10.0, 51)
QUASISTATIC_G_RANGE = (0.0, 0.2, 51)

WORK_CASE_TIME = 0.92


@dataclass(frozen=True)
class FigurePreset:
    base: Dict[str, Any]
    outputs: Tuple[str, ...]
    g_range: Optional[Tuple[float, float, int]] = None


FIGURES: Dict[str, FigurePreset] = {
    "fig1": FigurePreset(COHERENT_ENGINE, ("kl", "coherence_rho1", "coherence_rho3")),
    "fig2": FigurePreset(COHERENT_ENGINE, ("trace_distance_tpm", "trace_distance_dbn")),
    "fig3a": FigurePreset(COHERENT_ENGINE, ("regime_unmeasured", "regime_dbn"), G_RANGE),
    "fig3b": FigurePreset(COHERENT_ENGINE, ("regime_tpm",), G_RANGE),
    "fig4": FigurePreset(
        QUASISTATIC_ENGINE, ("eta2_tpm", "eta2_dbn", "bound", "eta2_ratio_tpm", "eta2_ratio_dbn")
    ),
    "figS2": FigurePreset(COHERENT_ENGINE, ("kl", "coherence_rho1", "coherence_rho3"), G_RANGE),
    "figS3": FigurePreset(COHERENT_ENGINE, ("trace_distance_tpm",), G_RANGE),
    "figS4": FigurePreset(QUASISTATIC_ENGINE, ("eta2_ratio_dbn", "eta2_ratio_tpm"), QUASISTATIC_G_RANGE),
    "figS5": FigurePreset(QUASISTATIC_ENGINE, ("coherence_rho1", "coherence_rho3"), QUASISTATIC_G_RANGE),
}

FIGURE_NAMES = ("figS1", *FIGURES)


@dataclass(frozen=True)
class FigureData:
    name: str
    frame: pd.DataFrame
    meta: Dict[str, Any]


def figure_spec(name: str, lambda_points: Optional[int] = None, g_points: Optional[int] = None) -> SweepSpec:
    """Сетка параметров для рисунка по его пресету.
    :param name: Имя рисунка.
    :param lambda_points: Число точек по λ (по умолчанию 50 на [0.02, 1]).
    :param g_points: Число точек по g для контурных рисунков (по умолчанию 51).
    :return SweepSpec: Описание сетки.
    """
    if name not in FIGURES:
        raise ValueError(f"неизвестный рисунок: {name}; доступны {', '.join(FIGURE_NAMES)}")
    preset = FIGURES[name]
    start, stop, count = LAMBDA_RANGE
    axes = [Axis(param="lambda", values=linspace_values(start, stop, lambda_points or count))]
    if preset.g_range is not None:
        g_start, g_stop, g_count = preset.g_range
        axes.append(Axis(param="g", values=linspace_values(g_start, g_stop, g_points or g_count)))
    return SweepSpec(base=CycleConfig(**preset.base), axes=axes, outputs=list(preset.outputs))


def work_distribution_cases() -> Dict[str, CycleConfig]:
    """Три случая распределений работы: с накачкой, без накачки и при полной термализации."""
    base = CycleConfig(**COHERENT_ENGINE)
    return {
        "driven": base.with_values({"t_h": WORK_CASE_TIME, "t_c": WORK_CASE_TIME}),
        "undriven": base.with_values({"g": 0.0, "t_h": WORK_CASE_TIME, "t_c": WORK_CASE_TIME}),
        "thermalized": base.with_values({"lambda": 1.0}),
    }


def _work_distribution_frame(cases: Dict[str, CycleConfig]) -> pd.DataFrame:
    records: List[Dict[str, Any]] = []
    for case, config in cases.items():
        analysis = analyze_cycle(config)
        for scheme in Scheme:
            dist = analysis.distributions[scheme][QuantityKind.WORK]
            for value, probability in dist.atoms():
                records.append(
                    {
                        "case": case,
                        "scheme": scheme.value,
                        "value": value,
                        "probability": probability,
                        "mean": analysis.reports[scheme].mean_w,
                        "W": analysis.thermo.work,
                    }
                )
    return pd.DataFrame.from_records(records, columns=["case", "scheme", "value", "probability", "mean", "W"])


def figure_data(
    which: str,
    parallelism: int = 1,
    cache_dir: Optional[Path] = None,
    lambda_points: Optional[int] = None,
    g_points: Optional[int] = None,
) -> FigureData:
    """Данные рисунка: таблица результатов и использованный пресет параметров."""
    logging.info(f"Расчёт данных рисунка {which}")
    if which == "figS1":
        cases = work_distribution_cases()
        meta = {"figure": which, "cases": {case: config.model_dump() for case, config in cases.items()}}
        return FigureData(which, _work_distribution_frame(cases), meta)

    spec = figure_spec(which, lambda_points, g_points)
    results = run_sweep(spec, parallelism, cache_dir)
    meta = {"figure": which, **spec.model_dump()}
    return FigureData(which, results_frame(results, spec.axis_names, spec.outputs), meta)
