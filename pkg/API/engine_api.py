import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, Optional

from config_data.cycle import CycleConfig
from database.model import SweepPoint
from engine.cycle import (
    CycleCorners,
    CycleOperators,
    Regime,
    Thermodynamics,
    build_cycle,
    classify_regime,
    efficiency,
    limit_cycle,
    unmeasured_thermo,
)
from measurement_stats.distributions import QuantityKind, joint_distributions
from measurement_stats.joints import OutcomeJoint, Scheme, dbn_joint, tpm_joint
from measurement_stats.reports import (
    FluctuationRatio,
    SchemeReport,
    avg_post_measurement_state,
    check_equivalence_conditions,
    closed_form_report,
    fluctuation_ratio,
)
from qcore.distribution import DiscreteDistribution
from qcore.metrics import kl_divergence, rel_entropy_coherence, trace_distance

OUTPUT_NAMES = (
    "kl",
    "coherence_rho1",
    "coherence_rho3",
    "trace_distance_tpm",
    "trace_distance_dbn",
    "regime_tpm",
    "regime_dbn",
    "regime_unmeasured",
    "eta2_tpm",
    "eta2_dbn",
    "eta2_ratio_tpm",
    "eta2_ratio_dbn",
    "bound",
    "W",
    "Q_h",
    "Q_c",
    "mean_w_tpm",
    "var_w_tpm",
    "mean_qh_tpm",
    "var_qh_tpm",
    "mean_qc_tpm",
    "var_qc_tpm",
    "mean_w_dbn",
    "var_w_dbn",
    "mean_qh_dbn",
    "var_qh_dbn",
    "mean_qc_dbn",
    "var_qc_dbn",
)

CATEGORICAL_OUTPUTS = ("regime_tpm", "regime_dbn", "regime_unmeasured")


@dataclass(frozen=True)
class CycleAnalysis:
    """Полный разбор одного цикла: предельный цикл, обе схемы измерений и сравнительные метрики."""

    config: CycleConfig
    ops: CycleOperators
    corners: CycleCorners
    thermo: Thermodynamics
    joints: Dict[Scheme, OutcomeJoint]
    distributions: Dict[Scheme, Dict[QuantityKind, DiscreteDistribution]]
    reports: Dict[Scheme, SchemeReport]
    ratios: Dict[Scheme, FluctuationRatio]
    trace_distances: Dict[Scheme, float]
    kl: Dict[QuantityKind, float]
    coherence_rho1: float
    coherence_rho3: float
    equivalence_holds: bool
    equivalence_residual: float

    def regime(self, scheme: Optional[Scheme] = None) -> Regime:
        tol = self.config.regime_tol
        if scheme is None:
            return classify_regime(self.thermo.work, self.thermo.heat_hot, self.thermo.heat_cold, tol)
        report = self.reports[scheme]
        return classify_regime(report.mean_w, report.mean_qh, report.mean_qc, tol)


def analyze_cycle(config: CycleConfig, skip_dephasing: bool = False) -> CycleAnalysis:
    """Рассчитывает все величины одного цикла.
    :param config: Параметры цикла.
    :param skip_dephasing: Тестовая неисправность замкнутых формул схемы TPM.
    :return CycleAnalysis: Результаты для обеих схем и цикла без измерений.
    """
    ops = build_cycle(config)
    corners = limit_cycle(ops, config)
    joints = {
        Scheme.TPM: tpm_joint(corners, ops, config),
        Scheme.DBN: dbn_joint(corners, ops, config),
    }
    distributions = {scheme: joint_distributions(joint, config.merge_tol) for scheme, joint in joints.items()}
    reports = {
        scheme: closed_form_report(
            scheme, corners, ops, config, joint, skip_dephasing=skip_dephasing and scheme is Scheme.TPM
        )
        for scheme, joint in joints.items()
    }
    holds, worst = check_equivalence_conditions(ops, config)
    return CycleAnalysis(
        config=config,
        ops=ops,
        corners=corners,
        thermo=unmeasured_thermo(corners, ops, config),
        joints=joints,
        distributions=distributions,
        reports=reports,
        ratios={scheme: fluctuation_ratio(report, config) for scheme, report in reports.items()},
        trace_distances={
            scheme: trace_distance(avg_post_measurement_state(scheme, corners, ops, config), corners.rho1)
            for scheme in Scheme
        },
        kl={
            kind: kl_divergence(distributions[Scheme.DBN][kind], distributions[Scheme.TPM][kind])
            for kind in QuantityKind
        },
        coherence_rho1=rel_entropy_coherence(corners.rho1, ops.h_e),
        coherence_rho3=rel_entropy_coherence(corners.rho3, ops.h_k),
        equivalence_holds=holds,
        equivalence_residual=worst,
    )


def point_values(analysis: CycleAnalysis) -> Dict[str, Any]:
    """Значения всех выходных величин сетки; kl может быть inf, η² - None."""
    values: Dict[str, Any] = {
        "kl": analysis.kl[QuantityKind.WORK],
        "coherence_rho1": analysis.coherence_rho1,
        "coherence_rho3": analysis.coherence_rho3,
        "regime_unmeasured": analysis.regime().value,
        "bound": analysis.ratios[Scheme.TPM].bound,
        "W": analysis.thermo.work,
        "Q_h": analysis.thermo.heat_hot,
        "Q_c": analysis.thermo.heat_cold,
    }
    for scheme in Scheme:
        suffix = scheme.value
        report = analysis.reports[scheme]
        values[f"trace_distance_{suffix}"] = analysis.trace_distances[scheme]
        values[f"regime_{suffix}"] = analysis.regime(scheme).value
        values[f"eta2_{suffix}"] = analysis.ratios[scheme].eta2
        values[f"eta2_ratio_{suffix}"] = analysis.ratios[scheme].ratio
        for moment in ("mean_w", "var_w", "mean_qh", "var_qh", "mean_qc", "var_qc"):
            values[f"{moment}_{suffix}"] = getattr(report, moment)
    return values


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def summary_dict(analysis: CycleAnalysis) -> Dict[str, Any]:
    """Сводка для summary.json."""
    config = analysis.config
    thermo = analysis.thermo
    summary: Dict[str, Any] = {
        "config": config.model_dump(),
        "t_h": _finite_or_none(config.t_h),
        "t_c": _finite_or_none(config.t_c),
        "limit_cycle": {
            "iterations": analysis.corners.iterations,
            "residual": analysis.corners.residual,
        },
        "unmeasured": {
            "W": thermo.work,
            "Q_h": thermo.heat_hot,
            "Q_c": thermo.heat_cold,
            "regime": analysis.regime().value,
            "efficiency": efficiency(thermo.work, thermo.heat_hot, config.regime_tol),
        },
        "kl": {kind.value: _finite_or_none(value) for kind, value in analysis.kl.items()},
        "kl_infinite": [kind.value for kind, value in analysis.kl.items() if math.isinf(value)],
        "coherence_rho1": analysis.coherence_rho1,
        "coherence_rho3": analysis.coherence_rho3,
        "bound": analysis.ratios[Scheme.TPM].bound,
        "equivalence_conditions": {
            "holds": analysis.equivalence_holds,
            "worst_residual": analysis.equivalence_residual,
        },
    }
    for scheme in Scheme:
        report = analysis.reports[scheme]
        ratio = analysis.ratios[scheme]
        summary[scheme.value] = {
            **report.to_dict(),
            "regime": analysis.regime(scheme).value,
            "efficiency": efficiency(report.mean_w, report.mean_qh, config.regime_tol),
            "trace_distance": analysis.trace_distances[scheme],
            "eta2": ratio.eta2,
            "eta2_ratio": ratio.ratio,
            "violated": ratio.violated,
        }
    return summary


def save_point(config: CycleConfig, payload: Dict[str, Any]) -> None:
    """Сохраняет результат точки сетки в кэш.
    :param config: Конфигурация точки.
    :param payload: {"values": ..., "error": ...}; inf сохраняется как Infinity.
    :return None
    """
    SweepPoint.replace(
        config_hash=config.canonical_hash(),
        config_json=config.model_dump_json(),
        payload=json.dumps(payload, sort_keys=True),
        timestamp=datetime.now(),
    ).execute()


def load_point(config: CycleConfig) -> Optional[Dict[str, Any]]:
    point = SweepPoint.get_or_none(SweepPoint.config_hash == config.canonical_hash())
    if point is None:
        return None
    if point.config_json != config.model_dump_json():
        logging.warning(f"Коллизия ключа кэша {point.config_hash}, точка будет пересчитана")
        return None
    return json.loads(point.payload)
