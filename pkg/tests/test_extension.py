import math

import numpy as np
import pytest

from qmetro.channel import I2, SX, SZ, mix_kraus, random_unitary
from qmetro.classical import Classification, classify_phi_extremality, cs_bound
from qmetro.extension import (
    alpha_beta, alpha_norm, assemble_lmi, beta_constraint_solve, ce_sdp_bound, finite_n_bound,
    minimize_alpha_direct,
)
from qmetro.models import ModelSpec, reference_bound, reference_h
from qmetro.sdp import solve_lmi

from conftest import model, random_channel


def test_alpha_beta_unitary(unitary_channel):
    alpha, beta = alpha_beta(unitary_channel, np.zeros((1, 1)))
    np.testing.assert_allclose(alpha, I2 / 4, atol=1e-15)
    np.testing.assert_allclose(beta, SZ / 2, atol=1e-15)
    assert np.linalg.norm(beta, 2) == pytest.approx(0.5)


def test_alpha_beta_dephasing_paper_h():
    eta = 0.8
    ch = model("dephasing", eta)
    h = SX / (2 * math.sqrt(1 - eta**2))
    alpha, beta = alpha_beta(ch, h)
    assert np.linalg.norm(beta, 2) < 1e-12
    assert np.linalg.norm(alpha, 2) == pytest.approx(1 / (4 * 0.75**2), abs=1e-12)


def test_alpha_beta_spontaneous_emission():
    ch = model("spontaneous_emission", 0.5)
    _, beta = alpha_beta(ch, np.diag([0.5, -1.5]))
    assert np.linalg.norm(beta, 2) < 1e-12


def test_alpha_beta_hermitian(rng):
    for _ in range(10):
        ch = random_channel(rng)
        H = rng.standard_normal((ch.k, ch.k)) + 1j * rng.standard_normal((ch.k, ch.k))
        alpha, beta = alpha_beta(ch, H + H.conj().T)
        np.testing.assert_allclose(alpha, alpha.conj().T, atol=1e-12)
        np.testing.assert_allclose(beta, beta.conj().T, atol=1e-10)


def test_alpha_beta_size_mismatch():
    with pytest.raises(ValueError):
        alpha_beta(model("dephasing", 0.5), np.zeros((3, 3)))


def test_beta_solve_unitary_infeasible(unitary_channel):
    sol = beta_constraint_solve(unitary_channel)
    assert not sol.feasible


def test_beta_solve_spontaneous_emission_unique():
    eta = 0.3
    ch = model("spontaneous_emission", eta)
    sol = beta_constraint_solve(ch)
    assert sol.feasible and len(sol.nullspace) == 0
    np.testing.assert_allclose(sol.h0, (SZ - eta * I2) / (2 * (1 - eta)), atol=1e-12)


def test_beta_solve_lossy_family():
    eta = 0.62
    ch = model("lossy_interferometer", eta)
    sol = beta_constraint_solve(ch)
    assert sol.feasible and len(sol.nullspace) == 5
    rng = np.random.default_rng(0)
    for _ in range(5):
        h = sol.h(rng.standard_normal(5))
        assert np.linalg.norm(alpha_beta(ch, h)[1], 2) < 1e-9
        np.testing.assert_allclose(h, h.conj().T, atol=1e-14)
    # the reference generator lies in the solution family: |h00| = |h11| = 1/(2(1-eta))
    href = reference_h(ModelSpec("lossy_interferometer", eta))
    assert abs(href[0, 0]) == pytest.approx(1 / (2 * (1 - eta)))
    assert abs(href[0, 0]) == pytest.approx(1.3158, abs=1e-4)
    assert np.linalg.norm(alpha_beta(ch, href)[1], 2) < 1e-12


def test_assemble_lmi_schur_equivalence(rng):
    for _ in range(10):
        ch = random_channel(rng)
        H = rng.standard_normal((ch.k, ch.k)) + 1j * rng.standard_normal((ch.k, ch.k))
        h = H + H.conj().T
        a = alpha_norm(ch, h)
        assert np.linalg.eigvalsh(assemble_lmi(ch, h, a * 1.001)).min() >= 0
        assert np.linalg.eigvalsh(assemble_lmi(ch, h, a * 0.999)).min() < 0
        assert np.linalg.eigvalsh(assemble_lmi(ch, h, 1e6)).min() > 0


def test_assemble_lmi_boundaries(unitary_channel):
    A = assemble_lmi(unitary_channel, np.zeros((1, 1)), 0.25)
    assert abs(np.linalg.eigvalsh(A).min()) < 1e-14
    ch = model("dephasing", 0.8)
    A = assemble_lmi(ch, SX / 1.2, 1 / 2.25)
    assert abs(np.linalg.eigvalsh(A).min()) < 1e-12
    with pytest.raises(ValueError):
        assemble_lmi(ch, SX, -1)


@pytest.mark.parametrize("name,eta,const", [
    ("dephasing", 0.8, 0.75),
    ("depolarizing", 0.5, math.sqrt(2)),
    ("lossy_interferometer", 0.62, math.sqrt(0.38 / 0.62)),
    ("spontaneous_emission", 0.9, 0.5 * math.sqrt(0.1 / 0.9)),
])
def test_ce_sdp_examples(name, eta, const):
    r = ce_sdp_bound(model(name, eta))
    assert r.solver_status == "optimal"
    assert r.bound_const == pytest.approx(const, rel=1e-8)
    assert np.linalg.norm(alpha_beta(model(name, eta), r.h_opt)[1], 2) < 1e-9
    assert r.t_opt == pytest.approx(r.alpha_norm, abs=1e-8)
    assert 4 * r.bound_const**2 * r.alpha_norm == pytest.approx(1.0)
    assert r.dual_gap < 1e-8


def test_ce_unitary_not_certified(unitary_channel):
    r = ce_sdp_bound(unitary_channel)
    assert not r.feasible and r.bound_const is None
    assert r.qfi_bound(5) == math.inf


def test_direct_route_agrees_with_interior_point(rng):
    for _ in range(15):
        ch = random_channel(rng, kind="full", d_in=2, d_out=2)
        r = ce_sdp_bound(ch)
        sol = beta_constraint_solve(ch)
        _, a = minimize_alpha_direct(ch, sol)
        assert r.solver_status == "optimal"
        assert a == pytest.approx(r.alpha_norm, rel=1e-6)


def test_cvxpy_cross_check():
    cp = pytest.importorskip("cvxpy")
    for name, eta in [("depolarizing", 0.3), ("lossy_interferometer", 0.7)]:
        ch = model(name, eta)
        k = ch.k
        h = cp.Variable((k, k), hermitian=True)
        K, Kd = ch.kraus, ch.kraus_dot
        Kt = [Kd[i] - 1j * sum(h[i, j] * K[j] for j in range(k)) for i in range(k)]
        B = cp.vstack(Kt)
        t = cp.Variable()
        M = cp.bmat([[t * np.eye(ch.d_in), B.H], [B, np.eye(k * ch.d_out)]])
        lhs = sum(h[i, j] * (K[i].conj().T @ K[j]) for i in range(k) for j in range(k))
        rhs = 1j * sum(Kd[q].conj().T @ K[q] for q in range(k))
        prob = cp.Problem(cp.Minimize(t), [M >> 0, lhs == rhs])
        prob.solve()
        assert ce_sdp_bound(ch).alpha_norm == pytest.approx(t.value, rel=1e-4)


def test_gauge_covariance(rng):
    for _ in range(5):
        ch = random_channel(rng, kind="full", d_in=2, d_out=2)
        ch2 = mix_kraus(ch, random_unitary(ch.k, rng))
        assert ce_sdp_bound(ch2).t_opt == pytest.approx(ce_sdp_bound(ch).t_opt, abs=1e-7)


def test_optimality_under_nullspace_perturbations(rng):
    for name in ("depolarizing", "lossy_interferometer"):
        ch = model(name, 0.6)
        r = ce_sdp_bound(ch)
        sol = beta_constraint_solve(ch)
        for _ in range(50):
            v = rng.standard_normal(len(sol.nullspace))
            v /= np.linalg.norm(v)
            h = r.h_opt + 1e-3 * np.tensordot(v, sol.nullspace, axes=1)
            assert alpha_norm(ch, h) >= r.alpha_norm - 1e-8


def test_paper_h_is_optimal(model_name):
    for eta in (0.3, 0.5, 0.8):
        spec = ModelSpec(model_name, eta)
        ch = model(model_name, eta)
        h = reference_h(spec)
        assert np.linalg.norm(alpha_beta(ch, h)[1], 2) <= 1e-9
        assert alpha_norm(ch, h) == pytest.approx(ce_sdp_bound(ch).t_opt, abs=1e-6)


def test_ce_dominates_cs(rng):
    for _ in range(25):
        ch = random_channel(rng, kind=["full", "diagonal"][_ % 2])
        cs = cs_bound(ch)
        assert cs.applicable
        assert ce_sdp_bound(ch).bound_const >= cs.bound_const - 1e-6


def test_finite_n_bound():
    ch = model("dephasing", 0.8)
    h = SX / 1.2
    assert finite_n_bound(ch, h, 1) == pytest.approx(4 / 2.25)
    assert finite_n_bound(ch, h, 10) == pytest.approx(40 / 2.25)
    assert finite_n_bound(ch, h, 10) == pytest.approx(17.78, abs=5e-3)
    u = model("dephasing", 0.5)  # beta != 0 for h = 0 adds the N(N-1) term
    assert finite_n_bound(u, np.zeros((2, 2)), 3) > 3 * finite_n_bound(u, np.zeros((2, 2)), 1)


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_finite_n_bound_unitary_heisenberg(unitary_channel, n):
    assert finite_n_bound(unitary_channel, np.zeros((1, 1)), n) == pytest.approx(n**2, abs=1e-12)


def test_solve_lmi_simple():
    # min t s.t. [[t, 1], [1, 1]] >= 0  ->  t = 1
    F0 = np.array([[0, 1], [1, 1]], complex)
    Ft = np.array([[[1, 0], [0, 0]]], complex)
    r = solve_lmi([1.0], F0, Ft, [3.0])
    assert r.converged
    assert r.objective == pytest.approx(1.0, abs=1e-8)
    assert r.dual_objective == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        solve_lmi([1.0], F0, Ft, [0.5])
