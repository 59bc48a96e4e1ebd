"""Smoke tests of the python bindings against a handful of known values."""

import math

import numpy as np
import pytest

import crosskerr as ck


def test_operators_and_states():
    sys2 = ck.ModeSystem([("m", 12)])
    a = ck.annihilation(sys2, "m").matrix
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(math.sqrt(2.0))

    d = ck.displacement(sys2, "m", 0.0).matrix
    assert np.allclose(d, np.eye(12))

    vac = ck.basis_state(sys2, [0])
    par = ck.parity_operator(sys2, "m")
    assert vac.expectation(par).real == pytest.approx(1.0)


def test_wigner_vacuum_origin():
    sys1 = ck.ModeSystem([("m", 10)])
    w = ck.wigner(ck.basis_state(sys1, [0]), "m", [0.0], [0.0])
    assert w[0, 0] == pytest.approx(2.0 / math.pi)


def test_device_and_effective_numbers():
    assert ck.squid_ej(0.0, 19.0, 5.2) == pytest.approx(24.2)
    assert ck.squid_ej(0.5, 19.0, 5.2) == pytest.approx(13.8)

    p2 = ck.fig2_bias()
    assert ck.drive_frequency(p2, 0.0, 1) == pytest.approx(5200.0)

    swt = ck.SwtInputs(g1_MHz=0.8, delta_MHz=-6.0, chi_b_MHz=0.5)
    assert ck.engineered_crosskerr(swt) == pytest.approx(-0.1261, abs=2e-4)
    assert ck.max_coupler_excitation(0.8, -6.0) == pytest.approx(0.0175, abs=2e-4)
    assert ck.gate_time(0.09535, 1, 1, math.pi) == pytest.approx(5.244, abs=1e-3)


def test_cphase_bell():
    sys2 = ck.two_mode_system(2, 2)
    plus2 = ck.superposition_ket(sys2, [[0, 0], [0, 1], [1, 0], [1, 1]],
                                 [0.5, 0.5, 0.5, 0.5])
    rho0 = ck.from_state(sys2, plus2)
    out = ck.cphase_gate(rho0, 0.09535, math.pi, 1, 1)
    bell = ck.superposition_ket(sys2, [[0, 0], [0, 1], [1, 0], [1, 1]],
                                [0.5, 0.5, 0.5, -0.5])
    assert ck.fidelity_to_pure(out, bell) > 0.9999

    bars = ck.pauli_bars(out, (0, 1), (0, 1))
    assert bars["XZ"] == pytest.approx(1.0, abs=1e-6)
    assert bars["ZX"] == pytest.approx(1.0, abs=1e-6)


def test_lindblad_damping():
    sys1 = ck.ModeSystem([("m", 3)])
    h = ck.build_effective_crosskerr(ck.two_mode_system(2, 2), 0.0)
    # single-mode decay instead: use number operator observable
    zero_h = ck.fock_projector(sys1, "m", 1)  # placeholder Hermitian
    traj = ck.evolve_lindblad(
        ck.number(sys1, "m"),
        [(ck.annihilation(sys1, "m"), 1.0 / 800.0)],
        ck.basis_state(sys1, [1]),
        [0.0, 800.0],
        {"p1": ck.fock_projector(sys1, "m", 1)},
    )
    assert traj["p1"][-1] == pytest.approx(math.exp(-1.0), abs=1e-4)
    del h, zero_h


def test_fit_damped_cosine():
    t = np.linspace(0.0, 4.0, 240)
    g1 = 1.024
    values = 0.5 * np.exp(-t / 94.0) * (1 + np.exp(-t / 28.0) * np.cos(
        2 * math.pi * 2 * g1 * t)) + 0.01
    fit = ck.fit_damped_cosine(list(t), list(values))
    assert fit["g1_MHz"] == pytest.approx(g1, rel=1e-3)


def test_tomography_round_trip():
    plan = ck.optimize_displacements(2, 25, seed=4)
    sys2 = ck.two_mode_system(2, 2)
    bell = ck.superposition_ket(sys2, [[0, 0], [0, 1], [1, 0], [1, 1]],
                                [0.5, 0.5, 0.5, -0.5])
    rho = ck.from_state(sys2, bell)
    probs = ck.exact_probabilities(rho, plan)
    rec = ck.linear_inversion(probs, plan)
    assert np.max(np.abs(rec.matrix - rho.matrix)) < 1e-8

    post = ck.bayesian_refine(rec, 1e6, retained=128, thinning=16, seed=3)
    assert post["rho_bme"].is_physical()
    assert ck.uhlmann_fidelity(post["rho_bme"], rho) > 0.99


def test_parity_analytics():
    t_peak = 750.0 * math.log(2.0)
    assert ck.p_odd_analytic(t_peak, 750.0) == pytest.approx(0.5)


def test_floquet_static_params():
    engine = ck.FloquetEngine(ck.fig3_bias(), ck.three_mode_system(3, 3, 8))
    d = engine.dressed_params()
    assert d["omega_c_MHz"] == pytest.approx(5222.0, abs=5.0)
    assert abs(d["kerr_ab_MHz"]) < 0.0015
