import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holderdecay.exceptions import DomainError, InvalidInputError
from holderdecay.weights import (
    EnvelopeResult,
    LowerConvexEnvelope,
    WeightProfile,
    check_weight_hypotheses,
    discretely_convex,
    eval_weight,
    lower_convex_envelope,
)

from conftest import brute_force_hull

FIVE = [(1, 0.5), (2, 0.9), (3, 0.2), (4, 0.7), (5, 0.1)]


def test_five_point_envelope():
    env = lower_convex_envelope(FIVE)
    assert env.hull_vertices == ((1, 0.5), (3, 0.2), (5, 0.1))
    assert env(2) == pytest.approx(0.35, abs=1e-15)
    assert env(4) == pytest.approx(0.15, abs=1e-15)
    assert eval_weight(env, 2) == pytest.approx(0.35, abs=1e-15)
    assert env.reliable_window == (1, 5)


def test_two_points_are_their_own_hull():
    assert lower_convex_envelope([(1, 1.0), (2, 0.5)]).hull_vertices == ((1, 1.0), (2, 0.5))


def test_rising_tail_is_truncated():
    env = lower_convex_envelope([(1, 1.0), (2, 0.2), (3, 0.5), (4, 0.9)])
    assert env.n_star == 2
    with pytest.raises(DomainError):
        env(3)


def test_left_extension_is_linear():
    env = lower_convex_envelope(FIVE)
    assert env.extension_slope == pytest.approx(-0.15)
    assert env(0) == pytest.approx(0.65)
    assert env(0.5) == pytest.approx(0.575)


def test_envelope_inverse_round_trip():
    env = lower_convex_envelope(FIVE)
    for t in (0.0, 0.7, 2.0, 3.5, 5.0):
        assert env.inverse(env(t)) == pytest.approx(t, abs=1e-12)


def test_golden_envelope_minorises_and_scales(golden_envelope_64):
    from holderdecay.dioph import sine_sequence
    seq = sine_sequence("golden", 64)
    env = golden_envelope_64
    n = np.arange(1, env.n_star + 1)
    u = seq.values[: env.n_star]
    assert np.all(env(n.astype(float)) <= u * (1 + 1e-12))
    assert np.min(env(n.astype(float)) * n**2) > 0.1


@pytest.mark.parametrize("bad", [
    [(1, 0.5)],
    [(1, 0.5), (2, 0.0)],
    [(1, 0.5), (2, -1.0)],
    [(2, 0.5), (1, 0.4)],
    [(1, 0.5), (1.5, 0.4)],
    [(0, 0.5), (1, 0.4)],
])
def test_envelope_rejects_bad_points(bad):
    with pytest.raises(InvalidInputError):
        lower_convex_envelope(bad)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-6, 1.0, allow_nan=False), min_size=2, max_size=20),
       st.lists(st.integers(1, 3), min_size=20, max_size=20))
def test_hull_matches_brute_force(values, gaps):
    idx = np.cumsum(gaps[: len(values)]).tolist()
    pts = list(zip(idx, values))
    env = lower_convex_envelope(pts)
    assert list(env.hull_vertices) == brute_force_hull(pts)
    ns = np.array([n for n, _ in env.hull_vertices], dtype=float)
    if ns.size >= 2:
        grid = np.linspace(ns[0], ns[-1], 50)
        vs = env(grid)
        assert discretely_convex(grid, vs, rtol=1e-9)
        assert np.all(np.diff(vs) <= 1e-15)
    for n, v in pts:
        if n <= env.n_star:
            assert env(float(n)) <= v * (1 + 1e-12)


def test_envelope_json_round_trip():
    env = lower_convex_envelope(FIVE)
    assert EnvelopeResult.from_dict(env.to_dict()) == env
    with pytest.raises(InvalidInputError):
        EnvelopeResult.from_dict({"vertices": []})


def test_closed_form_weights():
    assert eval_weight(WeightProfile.exp_decay(1.0), 0.0) == 1.0
    assert eval_weight(WeightProfile.power_growth(0.5, 2), 3.0) == pytest.approx(12.25)
    w = WeightProfile.power_decay(2.0, 3.0)
    assert w(2.0) == pytest.approx(0.25)
    assert w.inverse(0.25) == pytest.approx(2.0)
    e = WeightProfile.exp_decay(2.0)
    assert e.inverse(e(1.7)) == pytest.approx(1.7)
    g = WeightProfile.power_growth(0.5, 2)
    assert g.inverse(12.25) == pytest.approx(3.0)


def test_weight_validation():
    with pytest.raises(InvalidInputError):
        WeightProfile.power_growth(0.5, 0.5)
    with pytest.raises(InvalidInputError):
        WeightProfile.exp_decay(-1.0)
    with pytest.raises(DomainError):
        WeightProfile.power_decay(1.0, 1.0)(0.0)


def test_piecewise_linear_profile():
    w = WeightProfile.piecewise_linear([(1, 1), (2, 4), (3, 9)])
    assert w.direction == "increasing_to_infinity"
    assert w(2.5) == pytest.approx(6.5)
    assert w.inverse(4.0) == 2.0
    assert WeightProfile.from_dict(w.to_dict()) == w


@pytest.mark.parametrize("w", [WeightProfile.exp_decay(1.5), WeightProfile.power_decay(2.0, 1.5),
                               WeightProfile.power_growth(0.25, 3.0)])
def test_weight_serialisation(w):
    assert WeightProfile.from_dict(w.to_dict()) == w


def test_hypotheses_power_weights():
    rep = check_weight_hypotheses(WeightProfile.power_decay(1, 1), WeightProfile.power_growth(0, 2),
                                  np.geomspace(1, 1e4, 200))
    assert rep.all_passed


def test_hypotheses_exponential_weight():
    rep = check_weight_hypotheses(WeightProfile.exp_decay(1.0), WeightProfile.power_growth(0, 2),
                                  np.linspace(1, 1e3, 500))
    assert rep.all_passed


def test_hypotheses_wrong_slot():
    rep = check_weight_hypotheses(WeightProfile.power_growth(0, 2), WeightProfile.power_growth(0, 2),
                                  np.linspace(1, 100, 50))
    assert not rep.w1_decreasing
    assert not rep.all_passed


def test_hypotheses_empty_grid():
    with pytest.raises(InvalidInputError):
        check_weight_hypotheses(WeightProfile.exp_decay(1), WeightProfile.power_growth(0, 2), [])


def test_estimator_api():
    est = LowerConvexEnvelope().fit(np.array(FIVE))
    assert est.n_star_ == 5
    assert est.predict([2.0, 4.0]) == pytest.approx([0.35, 0.15])
    est2 = LowerConvexEnvelope().fit([1, 2, 3, 4, 5], [0.5, 0.9, 0.2, 0.7, 0.1])
    assert est2.envelope_ == est.envelope_
    assert est.get_params() == {"clip": False}
    assert math.isfinite(est.envelope_.extension_slope)
