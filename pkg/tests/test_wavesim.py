import math

import numpy as np
import pytest

from holderdecay.exceptions import DomainError, InvalidInputError
from holderdecay.interp import power_decay_pair, shifted_power_pair
from holderdecay.rng import SplitMix64
from holderdecay.wavesim import (
    DecayRateEstimator,
    ModalState,
    assemble_model,
    chain_check,
    decay_report,
    energy,
    norms_squared,
    observability_check,
    observability_lhs,
    project_initial_data,
    random_initial_data,
    sample_steps,
    simulate,
    step,
    weak_and_strong_energies,
    with_trace,
)

PI = math.pi


def damped_mode_one(t):
    """q'' + pi^2 q + 2 q' = 0 with q(0) = 1, q'(0) = 0."""
    w = math.sqrt(PI * PI - 1.0)
    e = math.exp(-t)
    q = e * (math.cos(w * t) + math.sin(w * t) / w)
    v = -e * (PI * PI / w) * math.sin(w * t)
    return q, v


def test_assemble_examples():
    m = assemble_model("dirichlet_wave", "1/2", 3)
    assert np.allclose(m.frequencies, [PI, 2 * PI, 3 * PI])
    assert np.allclose(m.trace, [1, 0, -1], atol=1e-16)
    b = assemble_model("beam", 0.5, 2)
    assert np.allclose(b.frequencies, [PI**2, 4 * PI**2])
    assert np.allclose(b.trace, [1, 0], atol=1e-16)
    x = assemble_model("mixed_wave", "0.5", 2)
    assert np.allclose(x.frequencies, [PI / 2, 3 * PI / 2])
    assert np.allclose(x.trace, [math.sqrt(2) / 2] * 2, atol=1e-16)
    with pytest.raises(InvalidInputError):
        assemble_model("plate", 0.5, 2)
    with pytest.raises(InvalidInputError):
        assemble_model("beam", 0.5, 0)


def test_energy_examples():
    d = assemble_model("dirichlet", 0.3, 4)
    assert energy(d, project_initial_data(d, [1], [0])) == pytest.approx(PI**2 / 4)
    assert energy(d, project_initial_data(d, [0], [1])) == pytest.approx(PI**2 / 4)
    assert energy(d, project_initial_data(d, [], [])) == 0.0
    b = assemble_model("beam", 0.3, 4)
    assert energy(b, project_initial_data(b, [1], [0])) == pytest.approx(PI**4 / 4)
    x = assemble_model("mixed", 0.3, 4)
    assert energy(x, project_initial_data(x, [1], [0])) == pytest.approx(PI**2 / 16)


def test_weak_and_strong(golden_envelope):
    d = assemble_model("dirichlet", "golden", 64)
    em, ep = weak_and_strong_energies(d, [1], [0], golden_envelope)
    assert em == pytest.approx(PI**2 / 2 * float(golden_envelope(1.0)))
    assert ep == pytest.approx(PI**4 / 4)
    a, b = random_initial_data(d, 32, 5)
    em, _ = weak_and_strong_energies(d, a, b, golden_envelope)
    e0 = energy(d, project_initial_data(d, a, b))
    assert 0 < em <= 2 * float(golden_envelope(1.0)) * e0 * (1 + 1e-12)


def test_weak_energy_window(golden_envelope_64):
    d = assemble_model("dirichlet", "golden", 128)
    a = np.zeros(128)
    a[-1] = 1.0
    with pytest.raises(DomainError):
        weak_and_strong_energies(d, a, np.zeros(128), golden_envelope_64)


def test_step_matches_analytic_oracle():
    m = assemble_model("dirichlet", "1/2", 1)
    traj = simulate(m, project_initial_data(m, [1], [0]), 1e-4, 5.0, keep_states=True)
    q, v = damped_mode_one(5.0)
    st = traj.final_state
    assert abs(st.q[0] - q) <= 1e-6 and abs(st.v[0] - v) <= 1e-6
    assert traj.energies[-1] / traj.energies[0] == pytest.approx((q * q + v * v / PI**2), abs=1e-6)


def test_single_step_function():
    m = assemble_model("dirichlet", "1/2", 1)
    s0 = project_initial_data(m, [1], [0])
    s1 = step(m, s0, 1e-3)
    assert s1.time == pytest.approx(1e-3)
    assert energy(m, s1) < energy(m, s0)


def test_undamped_conserves_energy():
    m = with_trace(assemble_model("dirichlet", 0.3, 4), np.zeros(4))
    init = project_initial_data(m, [1, 0.5, -0.2, 0.1], [0.3, 0, 0, 0.2])
    traj = simulate(m, init, 1e-3, 100.0, sample_stride=10_000)
    # exact in exact arithmetic; rounding of the step coefficients adds ~eps per step
    nsteps = 100_000
    assert np.max(np.abs(traj.energies / traj.energies[0] - 1)) <= 2 * nsteps * np.finfo(float).eps


def test_nodal_mode_keeps_energy():
    m = assemble_model("dirichlet", "1/2", 2)
    traj = simulate(m, project_initial_data(m, [0, 1], [0, 0]), 1e-4, 10.0, sample_stride=1000)
    assert np.max(np.abs(traj.energies - traj.energies[0])) <= 1e-10 * traj.energies[0]


def test_zero_horizon():
    m = assemble_model("beam", 0.3, 3)
    init = project_initial_data(m, [1], [0])
    traj = simulate(m, init, 1e-3, 0.0)
    assert len(traj.times) == 1 and traj.energies[0] == energy(m, init)


def test_energy_decreases_for_golden():
    m = assemble_model("dirichlet", "golden", 64)
    a, b = random_initial_data(m, 32, 11)
    traj = simulate(m, project_initial_data(m, a, b), 1e-3, 50.0, sample_stride=1000)
    assert np.all(np.diff(traj.energies) < 0)
    assert traj.identity_defect() <= 1e-10


def test_sample_steps():
    assert sample_steps(10, 4).tolist() == [0, 4, 8, 10]
    assert sample_steps(0).tolist() == [0]
    s = sample_steps(1000, log_samples=5)
    assert s[0] == 0 and s[-1] == 1000


def _quadrature_lhs(model, a, b, T, n=200_000):
    t = (np.arange(n) + 0.5) * (T / n)
    lam = model.frequencies
    vt = (model.trace * lam)[None, :] * (-a[None, :] * np.sin(np.outer(t, lam))
                                        + b[None, :] * np.cos(np.outer(t, lam)))
    return float(np.sum(vt.sum(axis=1) ** 2) * (T / n))


@pytest.mark.parametrize("kind", ["dirichlet", "mixed", "beam"])
def test_observability_matches_quadrature(kind):
    m = assemble_model(kind, "golden", 8)
    a, b = random_initial_data(m, 8, 3)
    exact = observability_lhs(m, a, b, 10.0)
    assert exact == pytest.approx(_quadrature_lhs(m, a, b, 10.0, 400_000), rel=1e-6)


def test_observability_examples():
    m = assemble_model("dirichlet", "1/2", 2)
    lhs, rhs, ok = observability_check(m, [1], [0.5], 2.0)
    assert lhs == pytest.approx(rhs, rel=1e-14) and ok
    assert rhs == pytest.approx(PI**2 * 1.25)
    lhs, rhs, ok = observability_check(m, [0, 1], [0, 0], 10.0)
    assert rhs == 0 and ok
    g = assemble_model("dirichlet", "golden", 32)
    a, b = random_initial_data(g, 16, 9)
    assert observability_check(g, a, b, 10.0)[2]
    with pytest.raises(InvalidInputError):
        observability_check(g, a, b, 1.0)


def test_random_data_is_normalised_and_seeded():
    m = assemble_model("mixed", "sqrt2m1", 16)
    a1, b1 = random_initial_data(m, 8, 123)
    a2, b2 = random_initial_data(m, 8, SplitMix64(123))
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    assert norms_squared(m, a1, b1)[1] == pytest.approx(1.0)
    assert np.all(a1[8:] == 0)


def test_chain_dirichlet(golden_envelope):
    m = assemble_model("dirichlet", "golden", 64)
    pair = shifted_power_pair(golden_envelope, 2.0, 0.0)
    for seed in range(5):
        a, b = random_initial_data(m, 32, seed)
        em, bound, ok = chain_check(m, a, b, pair, golden_envelope)
        assert ok and em >= bound


def test_decay_report_flags_undamped():
    m = with_trace(assemble_model("dirichlet", 0.3, 2), np.zeros(2))
    traj = simulate(m, project_initial_data(m, [1], [0]), 1e-2, 100.0, sample_stride=100)
    rep = decay_report(traj, power_decay_pair(1.0, 0.0), norms_squared(m, [1], [0])[1])
    assert not rep.decaying
    assert rep.upward_trend
    assert rep.sup_time == pytest.approx(100.0)
    d = rep.to_dict()
    assert {"sup_ratio", "loglog_slope", "samples"} <= set(d)


def test_decay_estimator_recovers_power_law():
    t = np.linspace(0, 200, 401)
    e = 3.0 * (t + 1) ** -1.25
    est = DecayRateEstimator().fit(t, e)
    assert est.slope_ == pytest.approx(-1.25, abs=1e-12)
    assert est.predict([10.0])[0] == pytest.approx(3.0 * 11**-1.25)
    assert est.get_params() == {"window": (0.1, 1.0)}


def test_state_shape_checked():
    m = assemble_model("dirichlet", 0.3, 3)
    with pytest.raises(InvalidInputError):
        energy(m, ModalState(0.0, np.zeros(2), np.zeros(2)))
    with pytest.raises(InvalidInputError):
        project_initial_data(m, [1, 2, 3, 4], [])
