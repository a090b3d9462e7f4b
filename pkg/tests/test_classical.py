import math

import numpy as np
import pytest

from qmetro import NotApplicable
from qmetro.channel import I2, SZ, choi, phase_encode
from qmetro.classical import (
    Classification, classical_fisher, classify_phi_extremality, cs_bound, epsilon_max, mu_condition,
    tangent_simulation,
)

from conftest import model, random_channel


def eps_by_bisection(P, D, sign, hi=1e3, iters=200):
    """Independent oracle: bisection on the minimum eigenvalue of the pencil."""
    def ok(e):
        return np.linalg.eigvalsh(P + sign * e * D).min() >= -1e-13
    if not ok(1e-9):
        return 0.0
    lo = 0.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


@pytest.mark.parametrize("eta", [0.3, 0.5, 0.8])
def test_epsilon_dephasing(eta):
    cp = choi(model("dephasing", eta))
    expected = math.sqrt(1 - eta**2) / eta
    for s in (1, -1):
        assert epsilon_max(cp, s) == pytest.approx(expected, abs=1e-12)
        assert eps_by_bisection(cp.P, cp.D, s) == pytest.approx(expected, abs=1e-9)


def test_epsilon_dephasing_08():
    cp = choi(model("dephasing", 0.8))
    assert epsilon_max(cp, 1) == pytest.approx(0.75, abs=1e-12)


def test_epsilon_depolarizing_05():
    cp = choi(model("depolarizing", 0.5))
    assert epsilon_max(cp, 1) == pytest.approx(math.sqrt(1.25), abs=1e-12)
    assert epsilon_max(cp, -1) == pytest.approx(math.sqrt(1.25), abs=1e-12)
    assert eps_by_bisection(cp.P, cp.D, 1) == pytest.approx(math.sqrt(1.25), abs=1e-9)


def test_epsilon_unitary_is_zero(unitary_channel):
    cp = choi(unitary_channel)
    assert epsilon_max(cp, 1) == 0.0 and epsilon_max(cp, -1) == 0.0


def test_epsilon_rejects_bad_sign():
    with pytest.raises(ValueError):
        epsilon_max(choi(model("dephasing", 0.5)), 0)


def test_pencil_maximality(rng):
    checked = 0
    for _ in range(60):
        ch = random_channel(rng, kind=["full", "diagonal"][checked % 2])
        cp = choi(ch)
        for s in (1, -1):
            e = epsilon_max(cp, s)
            assert 0 < e < math.inf
            assert np.linalg.eigvalsh(cp.P + s * e * cp.D).min() >= -1e-9
            assert np.linalg.eigvalsh(cp.P + s * (1 + 1e-6) * e * cp.D).min() < 0
            assert e == pytest.approx(eps_by_bisection(cp.P, cp.D, s), rel=1e-7)
        checked += 1


@pytest.mark.parametrize("name,eta,expected", [
    ("dephasing", 0.8, Classification.PHI_NONEXTREMAL),
    ("depolarizing", 0.5, Classification.PHI_NONEXTREMAL),
    ("spontaneous_emission", 0.5, Classification.PHI_EXTREMAL),
    ("lossy_interferometer", 0.62, Classification.PHI_EXTREMAL),
])
def test_classification(name, eta, expected):
    assert classify_phi_extremality(model(name, eta)) is expected


def test_unitary_classification(unitary_channel):
    assert classify_phi_extremality(unitary_channel) is Classification.UNITARY_LIKE_EXTREMAL


def test_mu_dephasing():
    ch = model("dephasing", 0.8)
    sol = mu_condition(ch)
    assert sol.exists
    np.testing.assert_allclose(sol.mu, sol.mu.conj().T, atol=1e-14)
    # D = sum mu_ij |K_i><K_j| reconstructs exactly; mu is purely off-diagonal here
    V = ch.kraus.reshape(2, -1)
    np.testing.assert_allclose(V.T @ sol.mu @ V.conj(), choi(ch).D, atol=1e-12)
    assert abs(sol.mu[0, 0]) < 1e-12 and abs(sol.mu[1, 1]) < 1e-12
    assert abs(sol.mu[0, 1]) > 0.1
    assert sol.trace_condition < 1e-12


@pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
def test_mu_spontaneous_emission_absent(eta):
    sol = mu_condition(model("spontaneous_emission", eta))
    assert not sol.exists
    assert sol.relative_residual > 1e-3


def test_mu_unitary_absent(unitary_channel):
    assert not mu_condition(unitary_channel).exists


def test_eps_and_mu_agree_on_random_channels(rng):
    seen = set()
    for i in range(90):
        ch = random_channel(rng, kind=["generic", "full", "diagonal"][i % 3])
        seen.add(classify_phi_extremality(ch))  # raises on disagreement
    assert Classification.PHI_NONEXTREMAL in seen and Classification.PHI_EXTREMAL in seen


def test_classical_fisher_examples():
    assert classical_fisher([0.5, 0.5], [0.5, -0.5]) == pytest.approx(1.0)
    e = 0.75
    p = [0.5, 0.5]
    pd = [1 / (2 * e), -1 / (2 * e)]
    assert classical_fisher(p, pd) == pytest.approx(1 / 0.75**2, rel=1e-12)
    assert classical_fisher([1, 0], [1, -1]) == math.inf
    assert classical_fisher([1, 0], [0, 0]) == 0.0
    with pytest.raises(ValueError):
        classical_fisher([0.5, 0.5], [1, 1])


@pytest.mark.parametrize("name,eta,f_cl", [("dephasing", 0.8, 1 / 0.5625), ("depolarizing", 0.5, 0.8)])
def test_tangent_simulation(name, eta, f_cl):
    ch = model(name, eta, 0.4)
    sim = tangent_simulation(ch)
    cp = choi(ch)
    assert sim.p_plus + sim.p_minus == pytest.approx(1.0, abs=1e-15)
    assert sim.p_dot_plus + sim.p_dot_minus == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(sim.p_plus * sim.P_plus + sim.p_minus * sim.P_minus, cp.P, atol=1e-10)
    np.testing.assert_allclose(sim.p_dot_plus * sim.P_plus + sim.p_dot_minus * sim.P_minus, cp.D, atol=1e-10)
    assert sim.fisher() == pytest.approx(f_cl, abs=1e-10)
    # endpoints are channels on the boundary
    for Q in (sim.P_plus, sim.P_minus):
        assert np.linalg.eigvalsh(Q).min() > -1e-9


def test_tangent_symmetric_derivatives():
    sim = tangent_simulation(model("dephasing", 0.8))
    assert sim.p_plus == pytest.approx(0.5)
    assert sim.p_dot_plus == pytest.approx(1 / (2 * 0.75))
    p_a, _ = sim.probabilities(sim.phi0 + 1e-3)
    assert (p_a - sim.p_plus) / 1e-3 == pytest.approx(sim.p_dot_plus)


def test_tangent_simulation_rejects_extremal():
    with pytest.raises(NotApplicable):
        tangent_simulation(model("spontaneous_emission", 0.5))


def test_tangent_random_fisher_consistency(rng):
    for _ in range(30):
        ch = random_channel(rng, kind="full")
        sim = tangent_simulation(ch)
        cp = choi(ch)
        np.testing.assert_allclose(sim.p_dot_plus * sim.P_plus + sim.p_dot_minus * sim.P_minus, cp.D, atol=1e-10)
        assert sim.fisher() * sim.eps_plus * sim.eps_minus == pytest.approx(1.0, abs=1e-9)


def test_cs_bound_values():
    r = cs_bound(model("dephasing", 0.8))
    assert r.bound_const == pytest.approx(0.75, abs=1e-12)
    assert r.bound_const**2 * r.f_cl == pytest.approx(1.0)
    r = cs_bound(model("depolarizing", 0.5))
    assert r.bound_const == pytest.approx(math.sqrt(1.25), abs=1e-12)
    r = cs_bound(model("lossy_interferometer", 0.62))
    assert not r.applicable and r.bound_const is None
    d = r.to_dict()
    assert d["classification"] == "phi_extremal" and d["f_cl"] is None
