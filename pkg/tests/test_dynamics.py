import numpy as np
import pytest

import chiralqubit as cq
from chiralqubit.bath import KernelTable
from chiralqubit.dynamics import PropagationOptions, lindblad_generator, nonsecular_term
from conftest import RHO_UP, scenario_bath, scenario_params

H0 = np.diag([0.5, -0.5]).astype(complex)


def synthetic_table(times, gz, gp, gm, omega=1.0, omega_s=1.0):
    n = len(times)
    zeros = {lab: np.zeros(n, dtype=complex) for lab in ("0", "plus", "minus")}
    return KernelTable(
        times=np.asarray(times, float),
        Gamma=zeros,
        GammaPrime={k: v.copy() for k, v in zeros.items()},
        omega_targets={"0": omega, "plus": omega + omega_s, "minus": omega - omega_s},
        gamma_z=np.full(n, gz), gamma_plus=np.full(n, gp), gamma_minus=np.full(n, gm),
    )


def test_generator_unitary_when_rates_vanish():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = (m + m.conj().T) / 2
    rho = rho / np.trace(rho)
    d = lindblad_generator(rho, (0.0, 0.0, 0.0), H0)
    # d<Cz>/dt = Tr[Cz drho] = 0 under pure unitary evolution with diagonal H
    assert abs((d[0, 0] - d[1, 1]).real) < 1e-15
    assert abs(np.trace(d)) < 1e-15


def test_generator_maximally_mixed_stationary_with_balanced_rates():
    rho = 0.5 * np.eye(2, dtype=complex)
    d = lindblad_generator(rho, (0.3, 0.7, 0.7), H0)
    assert np.max(np.abs(d)) < 1e-16


def test_generator_hand_evaluated_decay():
    c = 0.37
    d = lindblad_generator(RHO_UP, (0.0, 0.0, c), H0)
    dp_dt = (d[0, 0] - d[1, 1]).real
    assert dp_dt == pytest.approx(-2.0 * c, abs=1e-15)


def test_nonsecular_zero_when_weights_vanish():
    rng = np.random.default_rng(1)
    kt = {lab: (complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal()))
          for lab in ("0", "plus", "minus")}
    rho = np.array([[0.6, 0.1 + 0.2j], [0.1 - 0.2j, 0.4]])
    inc = nonsecular_term(rho, kt, (0.0, 1.0, 0.0))
    assert np.max(np.abs(inc)) == 0.0


def test_nonsecular_hermitian_and_traceless():
    rng = np.random.default_rng(2)
    for _ in range(100):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = (m + m.conj().T) / 2
        kt = {lab: (complex(rng.normal(), rng.normal()),
                    complex(rng.normal(), rng.normal()))
              for lab in ("0", "plus", "minus")}
        ratio = rng.uniform(-0.99, 0.99)
        dp = (1 + ratio) / 2
        dm = (1 - ratio) / 2
        inc = nonsecular_term(rho, kt, (np.sqrt(dp * dm), dp, dm))
        assert np.max(np.abs(inc - inc.conj().T)) < 1e-10
        assert abs(np.trace(inc)) < 1e-10


def test_zero_coupling_is_pure_unitary():
    times = np.linspace(0, 2, 401)
    p = scenario_params(0.4)
    bath = scenario_bath(0.1, 0.0, alpha=0.0)
    rho0 = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    traj = cq.propagate(rho0, bath, p, times)
    np.testing.assert_allclose(traj.polarization, traj.polarization[0], atol=1e-12)
    phase = np.exp(-1j * p.omega_s * times[-1])
    assert abs(traj.states[-1, 0, 1] - rho0[0, 1] * phase) < 1e-7


def test_constant_balanced_rates_exponential():
    times = np.linspace(0, 3, 301)
    c = 0.8
    table = synthetic_table(times, 0.0, c, c)
    p14 = cq.analytic_polarization(times, table.gamma_plus, table.gamma_minus)
    np.testing.assert_allclose(p14, np.exp(-2 * c * times), atol=1e-9)
    bath = scenario_bath(0.1, 0.0, alpha=0.0)
    traj = cq.propagate(RHO_UP, bath, scenario_params(0.4), times, kernels=table)
    np.testing.assert_allclose(traj.polarization, np.exp(-2 * c * times), atol=1e-8)


def test_trivial_rates_give_constant_polarization():
    times = np.linspace(0, 2, 101)
    p14 = cq.analytic_polarization(times, np.zeros(101), np.zeros(101))
    assert np.all(p14 == 1.0)


def test_stationary_value_constant_rates():
    gp, gm = 0.9, 0.4
    relax = 1.0 / (gp + gm)
    times = np.linspace(0, 12 * relax, 2001)
    table = synthetic_table(times, 0.0, gp, gm)
    bath = scenario_bath(0.1, 0.0, alpha=0.0)
    traj = cq.propagate(RHO_UP, bath, scenario_params(0.4), times, kernels=table)
    target = (gp - gm) / (gp + gm)
    assert abs(traj.polarization[-1] - target) < 1e-4


def test_markovian_reduction_monotone():
    gp, gm = 0.2, 0.9
    times = np.linspace(0, 6, 1201)
    table = synthetic_table(times, 0.0, gp, gm)
    bath = scenario_bath(0.1, 0.0, alpha=0.0)
    traj = cq.propagate(RHO_UP, bath, scenario_params(0.4), times, kernels=table)
    gap = traj.polarization - (gp - gm) / (gp + gm)
    assert np.all(gap > 0)
    assert np.all(np.diff(gap) < 1e-12)


def test_analytic_matches_ode_on_tabulated_rates(fig2_trajectories):
    for ratio, (traj, p14) in fig2_trajectories.items():
        assert np.max(np.abs(p14 - traj.polarization)) < 1e-6


def test_secular_flag_changes_dynamics_slightly():
    times = np.linspace(0, 1.0, 1001)
    p = scenario_params(0.4)
    bath = scenario_bath(0.1, 1.0)
    table = cq.compute_kernels(bath, p, times)
    sec = cq.propagate(RHO_UP, bath, p, times, kernels=table)
    non = cq.propagate(RHO_UP, bath, p, times,
                       PropagationOptions(include_nonsecular=True), kernels=table)
    diff = np.max(np.abs(sec.polarization - non.polarization))
    assert 0.0 < diff <= 0.05


def test_state_validation_and_options():
    times = np.linspace(0, 1, 11)
    bath = scenario_bath(0.1, 0.0, alpha=0.0)
    with pytest.raises(ValueError):
        cq.propagate(np.eye(2, dtype=complex), bath, scenario_params(0.4), times)
    with pytest.raises(ValueError):
        PropagationOptions(rtol=0.0)


def test_conservation_along_trajectories(fig2_trajectories):
    for traj, _ in fig2_trajectories.values():
        assert traj.trace_error < 1e-10
        assert traj.hermiticity_error < 1e-12
        assert traj.positivity_violation <= 1e-4
