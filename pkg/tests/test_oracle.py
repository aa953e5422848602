import numpy as np
import pytest
from scipy.integrate import quad

import chiralqubit as cq
from chiralqubit.errors import DimensionError, WindowError


def test_single_mode_carries_full_lorentzian_mass():
    alpha, lam, w0 = 0.9, 1.0, 200.0
    spectral = cq.Lorentzian(alpha=alpha, width=lam, omega0=w0)
    window = (w0 - 900.0, w0 + 900.0)
    db = cq.discretize(spectral, 1, window)
    ref, _ = quad(spectral.evaluate, window[0], window[1],
                  points=[w0 - lam, w0, w0 + lam], limit=400)
    assert abs(db.coupling_mass - ref) / ref < 1e-6
    # full-line mass alpha^2 lam / 2 up to the permitted 1e-3 tail
    assert abs(db.coupling_mass - alpha**2 * lam / 2) / (alpha**2 * lam / 2) < 1e-3
    assert abs(db.modes[0][1] - w0) < 1e-6


def test_doubling_modes_preserves_mass():
    spectral = cq.Lorentzian(alpha=0.7, width=1.0, omega0=150.0)
    window = (150.0 - 700.0, 150.0 + 700.0)
    masses = [cq.discretize(spectral, n, window).coupling_mass for n in (2, 4, 8)]
    assert abs(masses[0] - masses[1]) < 1e-12
    assert abs(masses[1] - masses[2]) < 1e-12


def test_window_errors():
    spectral = cq.Lorentzian(alpha=1.0, width=1.0, omega0=100.0)
    with pytest.raises(WindowError):
        cq.discretize(spectral, 2, (100.0 - 30.0, 100.0 + 30.0))  # tail > 1e-3
    with pytest.raises(WindowError):
        cq.discretize(spectral, 2, (5000.0, 6000.0))  # essentially no mass
    with pytest.raises(WindowError):
        cq.discretize(spectral, 2, (10.0, 10.0))


def test_desk_scale_bounds():
    with pytest.raises(DimensionError):
        cq.DiscretizedBath(modes=tuple((0.1, 1.0 + k) for k in range(9)))
    with pytest.raises(DimensionError):
        cq.DiscretizedBath(modes=((0.1, 1.0),), fock_cutoff=5)
    p = cq.make_params(omega_so=2.0, omega=0.0, eps=0.0, d=1.0)
    big = cq.DiscretizedBath(modes=tuple((0.01, 1.0 + k) for k in range(8)),
                             fock_cutoff=3)
    with pytest.raises(DimensionError):
        cq.exact_evolve(p, big, np.linspace(0, 1, 5))


def test_vacuum_rabi_against_closed_form():
    p = cq.make_params(omega_so=2.0, omega=0.0, eps=0.0, d=1.0)
    g = 0.05
    db = cq.DiscretizedBath(modes=((g, 2.0),), fock_cutoff=1)
    ts = np.linspace(0.0, 40.0, 401)
    pol = cq.exact_evolve(p, db, ts)
    np.testing.assert_allclose(pol, np.cos(2 * g * ts), atol=1e-12)


def test_uncoupled_modes_leave_polarization_constant():
    p = cq.make_params(omega_so=3.0, omega=1.0, eps=1.2, d=1.0)
    db = cq.DiscretizedBath(modes=((0.0, 2.0), (0.0, 4.0)), fock_cutoff=1)
    ts = np.linspace(0.0, 5.0, 101)
    pol = cq.exact_evolve(p, db, ts)
    np.testing.assert_allclose(pol, pol[0], atol=1e-12)


def oracle_setup(n_modes=4, fock=2):
    omega, omega_s, det, ratio = 102.0, 2.0, 0.1, 0.4
    alpha = np.sqrt(1e-3 * omega_s)
    delta_so = ratio * omega_s
    p = cq.make_params(omega_so=omega + delta_so, omega=omega,
                       eps=np.sqrt(omega_s**2 - delta_so**2), d=1.0)
    spectral = cq.Lorentzian(alpha=alpha, width=1.0, omega0=omega + det)
    db = cq.discretize(spectral, n_modes, (omega + det - 700.0, omega + det + 700.0),
                       fock_cutoff=fock)
    return p, spectral, db


def test_fock_cutoff_converged():
    p, _, db2 = oracle_setup(fock=2)
    _, _, db3 = oracle_setup(fock=3)
    ts = np.linspace(0.0, 0.5, 101)
    p2 = cq.exact_evolve(p, db2, ts)
    p3 = cq.exact_evolve(p, db3, ts)
    assert np.max(np.abs(p2 - p3)) < 1e-4


def test_mode_count_convergence_of_tcl_agreement():
    from chiralqubit.bath import compute_kernels_discrete

    ts = np.linspace(0.0, 0.5, 251)
    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    discrepancies = []
    for n in (2, 4, 6):
        p, spectral, db = oracle_setup(n_modes=n)
        pol = cq.exact_evolve(p, db, ts)
        table = compute_kernels_discrete(db.modes, 0.0, p, ts)
        bath = cq.BathConfig(spectral=spectral, temperature=0.0)
        traj = cq.propagate(rho0, bath, p, ts, kernels=table)
        discrepancies.append(np.max(np.abs(pol - traj.polarization)))
    tol = 5e-3
    for a, b in zip(discrepancies[:-1], discrepancies[1:]):
        assert b <= a * 1.5 or b < tol
    assert all(d < tol for d in discrepancies)
