"""Shared fixtures: figure-scenario parameter helpers and heavy session objects."""

import numpy as np
import pytest

import chiralqubit as cq
from chiralqubit.bath import decay_rates
from chiralqubit.qubit import dressed_interaction_coefficients

# absolute anchors used by every lambda-based report scenario
OMEGA_DRIVE = 102.0
T_UNIT = 20.0
OMEGA_S = 100.0
ALPHA = 2.0

RHO_UP = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)


def scenario_params(ratio, omega_s=OMEGA_S, omega_drive=OMEGA_DRIVE):
    delta_so = ratio * omega_s
    d_eps = np.sqrt(omega_s**2 - delta_so**2)
    return cq.make_params(omega_so=omega_drive + delta_so, omega=omega_drive,
                          eps=d_eps, d=1.0)


def scenario_bath(detuning, t_caption, alpha=ALPHA, omega_drive=OMEGA_DRIVE):
    spectral = cq.Lorentzian(alpha=alpha, width=1.0, omega0=omega_drive + detuning)
    return cq.BathConfig(spectral=spectral, temperature=t_caption * T_UNIT)


def retabulate(table, params):
    return decay_rates(table, dressed_interaction_coefficients(params))


class Fig2Run:
    """Default fig2 sweep: kernel table, trajectories and analytic curves."""

    def __init__(self):
        import time

        start = time.perf_counter()
        self.grid = np.linspace(0.0, 2.0, 4001)
        self.bath = scenario_bath(0.1, 1.0)
        self.table = cq.compute_kernels(self.bath, scenario_params(0.4), self.grid)
        self.trajs = {}
        for ratio in (0.1, 0.4, 0.7, 0.9):
            p = scenario_params(ratio)
            table = retabulate(self.table, p)
            traj = cq.propagate(RHO_UP, self.bath, p, self.grid, kernels=table)
            p14 = cq.analytic_polarization(self.grid, table.gamma_plus, table.gamma_minus)
            self.trajs[ratio] = (traj, p14)
        self.elapsed = time.perf_counter() - start


@pytest.fixture(scope="session")
def fig2_run():
    return Fig2Run()


@pytest.fixture(scope="session")
def fig2_trajectories(fig2_run):
    """ratio -> (Trajectory, analytic P) for the default fig2 sweep."""
    return fig2_run.trajs


@pytest.fixture(scope="session")
def fig3_long_tables():
    """(detuning, T_caption) -> KernelTable on lambda*t in [0, 20]."""
    times = np.linspace(0.0, 20.0, 2001)
    p = scenario_params(0.4)
    out = {}
    for det in (0.1, 10.0):
        for t_cap in (0.0, 1.0):
            out[(det, t_cap)] = cq.compute_kernels(scenario_bath(det, t_cap), p, times)
    return out


@pytest.fixture(scope="session")
def fig5a_scan():
    times = np.linspace(0.0, 2.0, 1001)
    thetas = np.linspace(0.0, np.pi, 61)
    p = scenario_params(0.9)
    return cq.pointer_scan(scenario_bath(0.1, 0.0), p, thetas, 0.0, 2.0, times)


@pytest.fixture(scope="session")
def fig6_scan_detuned():
    times = np.linspace(0.0, 2.0, 1001)
    thetas = np.linspace(0.0, np.pi, 61)
    p = scenario_params(0.9)
    return cq.pointer_scan(scenario_bath(10.0, 1.0), p, thetas, 0.0, 2.0, times)


@pytest.fixture(scope="session")
def fig5_trajectories():
    """Entropy trajectories for the fig5a/fig5b default angle sets."""
    times = np.linspace(0.0, 2.0, 2001)
    thetas = np.linspace(0.0, np.pi, 7)
    p = scenario_params(0.9)
    runs = {}
    for name, det, t_cap in (("fig5a", 0.1, 0.0), ("fig5b", 10.0, 1.0)):
        bath = scenario_bath(det, t_cap)
        table = cq.compute_kernels(bath, p, times)
        runs[name] = [
            cq.propagate(cq.bloch_to_state(cq.BlochState(float(th))), bath, p,
                         times, kernels=table)
            for th in thetas
        ]
    return runs


@pytest.fixture(scope="session")
def fig4_trajectory():
    """Mapped cavity-filtered model at the fig4 defaults (heavy: wide window)."""
    from chiralqubit.scenarios import SCENARIOS, ScenarioConfig, resolve_point

    cfg = ScenarioConfig(**SCENARIOS["fig4"])
    pt = resolve_point(cfg, cfg.delta_ratios[0], 0.0, cfg.temperatures[0])
    times = np.linspace(0.0, cfg.time_max, cfg.time_points)
    traj = cq.propagate(RHO_UP, pt.bath, pt.params, times)
    return traj
