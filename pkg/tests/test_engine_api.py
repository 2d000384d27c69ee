import json
import math

import pytest

from API.engine_api import OUTPUT_NAMES, analyze_cycle, load_point, point_values, save_point, summary_dict
from database.model import close_cache, init_cache
from engine.cycle import Regime
from measurement_stats.distributions import QuantityKind
from measurement_stats.joints import Scheme


def test_coherent_engine_analysis(make_config):
    analysis = analyze_cycle(make_config(**{"lambda": 0.3}))
    assert analysis.kl[QuantityKind.WORK] > 1e-3
    assert analysis.trace_distances[Scheme.DBN] < 1e-10
    assert analysis.trace_distances[Scheme.TPM] > 1e-3
    assert analysis.coherence_rho1 > 0.0
    assert analysis.coherence_rho3 > 0.0
    assert not analysis.equivalence_holds
    assert analysis.regime(Scheme.DBN) is analysis.regime()


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("values", [{"g": 0.0, "lambda": 0.4}, {"lambda": 1.0}])
def test_schemes_are_equivalent(make_config, d, values):
    analysis = analyze_cycle(make_config(d=d, **values))
    assert max(analysis.kl.values()) < 1e-10


def test_point_values_cover_all_outputs(make_config):
    values = point_values(analyze_cycle(make_config(d=2, **{"lambda": 0.5})))
    assert set(values) == set(OUTPUT_NAMES)
    assert values["regime_dbn"] in {regime.value for regime in Regime}
    assert math.isclose(values["W"], values["mean_w_dbn"], abs_tol=1e-9)


def test_summary_is_strict_json(make_config):
    summary = summary_dict(analyze_cycle(make_config(d=2, **{"lambda": 1.0})))
    text = json.dumps(summary, allow_nan=False)
    data = json.loads(text)
    assert data["t_h"] is None
    assert data["kl_infinite"] == []
    assert data["dbn"]["trace_distance"] < 1e-10
    assert data["limit_cycle"]["iterations"] >= 1
    assert set(data["kl"]) == {"work", "heat_h", "heat_c"}


def test_point_cache_round_trip(make_config, tmp_path):
    config = make_config(d=2, g=1.0)
    payload = {"values": {"kl": math.inf, "W": 0.5}, "error": None}
    init_cache(tmp_path)
    try:
        assert load_point(config) is None
        save_point(config, payload)
        loaded = load_point(config)
        assert loaded["values"]["W"] == 0.5
        assert math.isinf(loaded["values"]["kl"])
        assert load_point(make_config(d=2, g=1.5)) is None
    finally:
        close_cache()
    assert (tmp_path / "points.db").is_file()
