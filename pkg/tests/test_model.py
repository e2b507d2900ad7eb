import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from aoi_jamgame.model import (
    DegenerateBudget,
    GameConfig,
    InfeasibleMean,
    InvalidDistribution,
    InvalidPolicy,
    JamDistribution,
    Tabulated,
    Threshold,
    ZeroWait,
    check_feasibility,
    equilibrium_distribution,
    load_distribution,
    load_policy,
    mean,
    mix,
    point_mass,
    policy_from_dict,
    policy_to_dict,
    uniform,
    validate_config,
)

from conftest import jam_distributions


def test_validate_config_accepts_in_range():
    assert validate_config(4, 1) == GameConfig(4.0, 1.0)


def test_validate_config_rejects_mean_above_max():
    with pytest.raises(InfeasibleMean):
        validate_config(4, 5)


def test_validate_config_rejects_zero_budget():
    with pytest.raises(DegenerateBudget):
        validate_config(4, 0)


@pytest.mark.parametrize("a_max,a_avg", [(math.inf, 1), (4, math.nan), (-1, -2), (0, 0)])
def test_validate_config_rejects_bad_values(a_max, a_avg):
    with pytest.raises(ValueError):
        validate_config(a_max, a_avg)


def test_mean_examples(fstar41):
    assert fstar41.atoms == ((0.0, 0.75), (4.0, 0.25))
    assert mean(fstar41) == 1.0
    assert mean(point_mass(1)) == 1.0
    assert mean(JamDistribution(pieces=((0, 2, 0.5),))) == 1.0


def test_feasibility(cfg41, fstar41):
    rep = check_feasibility(fstar41, cfg41)
    assert rep.feasible and rep.mean == 1.0 and rep.total_mass == 1.0
    assert (rep.support_min, rep.support_max) == (0.0, 4.0)

    rep = check_feasibility(point_mass(4), cfg41)
    assert not rep.feasible and rep.mean == 4.0

    rep = check_feasibility(JamDistribution(((0, 0.5), (4, 0.5))), cfg41)
    assert not rep.feasible and rep.mean == 2.0


def test_feasibility_flags_support_outside_range(cfg41):
    rep = check_feasibility(JamDistribution(((0, 0.9), (5, 0.1))), cfg41)
    assert not rep.feasible
    assert any("support" in v for v in rep.violations)


def test_mix_examples(cfg41, fstar41):
    m = mix([(fstar41, 0.5), (point_mass(1), 0.5)])
    assert m.atoms == ((0.0, 0.375), (1.0, 0.5), (4.0, 0.125))
    assert mix([(fstar41, 1.0)]) == fstar41
    assert mix([(fstar41, 0.0), (point_mass(1), 1.0)]) == point_mass(1)


def test_mix_rejects_bad_weights(fstar41):
    with pytest.raises(InvalidDistribution):
        mix([(fstar41, 0.5), (point_mass(1), 0.4)])
    with pytest.raises(InvalidDistribution):
        mix([(fstar41, 1.5), (point_mass(1), -0.5)])


def test_mix_overlapping_pieces():
    m = mix([(uniform(0, 2), 0.5), (uniform(1, 3), 0.5)])
    assert m.pieces == ((0, 1, 0.25), (1, 2, 0.5), (2, 3, 0.25))
    assert mean(m) == pytest.approx(1.5, abs=1e-15)


def test_cdf_quantile_examples(fstar41):
    assert fstar41.cdf(0) == 0.75
    assert fstar41.cdf(3.9) == 0.75
    assert fstar41.cdf(4) == 1.0
    assert fstar41.cdf(-0.1) == 0.0
    assert fstar41.quantile(0.8) == 4.0
    assert fstar41.quantile(0.75) == 0.0
    with pytest.raises(ValueError):
        fstar41.quantile(1.5)
    with pytest.raises(ValueError):
        fstar41.quantile(-0.1)


def test_cdf_quantile_continuous():
    d = JamDistribution(((1.0, 0.5),), ((0, 2, 0.25),))
    assert d.cdf(0.5) == pytest.approx(0.125)
    assert d.cdf(1.0) == pytest.approx(0.75)
    assert d.cdf(2.0) == 1.0
    assert d.quantile(0.125) == pytest.approx(0.5)
    assert d.quantile(0.3) == 1.0
    assert d.quantile(0.875) == pytest.approx(1.5)


def test_construction_normalizes_and_coalesces():
    d = JamDistribution(((1.0, 0.5), (1.0 + 1e-13, 0.5 + 5e-10)))
    assert len(d.atoms) == 1
    assert d.total_mass == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidDistribution):
        JamDistribution(((1.0, 0.5),))
    with pytest.raises(InvalidDistribution):
        JamDistribution(((1.0, -0.5), (2.0, 1.5)))
    with pytest.raises(InvalidDistribution):
        JamDistribution(pieces=((0, 2, 0.25), (1, 3, 0.25)))
    with pytest.raises(InvalidDistribution):
        JamDistribution(pieces=((2, 1, 1.0),))


def test_equilibrium_distribution_degenerate_case():
    assert equilibrium_distribution(validate_config(1, 1)).atoms == ((1.0, 1.0),)
    d = equilibrium_distribution(validate_config(9, 1))
    assert d.atoms == ((0.0, 8 / 9), (9.0, 1 / 9))


def test_policies():
    a = np.array([0.0, 0.5, 1.0, 3.0])
    assert list(Threshold(1.0).delay(a)) == [1.0, 0.5, 0.0, 0.0]
    assert list(ZeroWait().delay(a)) == [0.0] * 4
    tab = Tabulated(((0, 2), (2, 0)))
    assert list(tab.delay(a)) == [2.0, 1.5, 1.0, 0.0]
    with pytest.raises(InvalidPolicy):
        Threshold(-1)
    with pytest.raises(InvalidPolicy):
        Tabulated(((1, 0), (1, 1)))
    with pytest.raises(InvalidPolicy):
        Tabulated(((0, -1),))


def test_json_round_trip(tmp_path, fstar41):
    p = tmp_path / "d.json"
    d = JamDistribution(((1.0, 0.5),), ((0, 2, 0.25),))
    p.write_text(json.dumps(d.to_dict()))
    assert load_distribution(p) == d
    for pol in (Threshold(4 / 3), ZeroWait(), Tabulated(((0, 1), (1, 0)))):
        q = tmp_path / "p.json"
        q.write_text(json.dumps(policy_to_dict(pol)))
        assert load_policy(q) == pol
    assert policy_from_dict({"kind": "zero-wait"}) == ZeroWait()
    with pytest.raises(InvalidPolicy):
        policy_from_dict({"kind": "random"})


def test_loader_rejects_malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidDistribution):
        load_distribution(p)
    p.write_text(json.dumps({"atoms": [[1, 2, 3]]}))
    with pytest.raises(InvalidDistribution):
        load_distribution(p)


@given(jam_distributions(), st.floats(0, 4), st.floats(1e-9, 0.5))
def test_quantile_inverts_cdf(dist, a, eps):
    p = dist.cdf(a) + eps
    assume(p <= 1.0)
    assert dist.quantile(p) >= a - 1e-9


@given(jam_distributions())
def test_cdf_monotone_and_normalized(dist):
    grid = np.linspace(-0.5, 4.5, 801)
    F = dist.cdf(grid)
    assert np.all(np.diff(F) >= -1e-15)
    assert dist.cdf(dist.support_max) == 1.0


@given(jam_distributions(), st.floats(0, 1))
def test_quantile_lands_in_support(dist, p):
    q = dist.quantile(p)
    assert dist.support_min - 1e-12 <= q <= dist.support_max + 1e-12
    assert dist.cdf(q) >= p - 1e-9


@given(jam_distributions(), jam_distributions(), st.floats(0, 1))
def test_mix_mean_is_convex_combination(d1, d2, w):
    m = mix([(d1, w), (d2, 1 - w)])
    assert mean(m) == pytest.approx(w * mean(d1) + (1 - w) * mean(d2), abs=1e-12)


@given(st.floats(0, 100), st.floats(0, 100))
def test_threshold_identity(a, beta):
    u = float(Threshold(beta).delay(a))
    assert u == max(beta - a, 0.0) >= 0
    if a >= beta:
        assert a + u == max(beta, a)
    else:
        assert a + u == pytest.approx(max(beta, a), rel=1e-15, abs=1e-300)


@given(st.floats(0, 100))
def test_threshold_zero_is_zero_wait(a):
    assert float(Threshold(0).delay(a)) == float(ZeroWait().delay(a))
