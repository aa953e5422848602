"""Declarative scenario configs and the reproducible run pipeline.

A scenario resolves caption-level dimensionless ratios into absolute model
parameters (one declared base unit per run), drives the kernel/propagation
stack, and writes delimited outputs plus a machine-readable manifest.  Runs
with identical configs are byte-identical: quadrature node layouts are
deterministic and no timestamps enter any output.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bath import BathConfig, CavityEffective, Lorentzian, QuadratureSpec, compute_kernels, decay_rates
from .dynamics import PropagationOptions, propagate
from .errors import ConfigError
from .observables import BlochState, bloch_to_state, pointer_scan
from .qubit import dressed_interaction_coefficients, make_params
from .trimer import TrimerParams, build_trimer_hamiltonian, derive_effective

__all__ = ["ScenarioConfig", "SCENARIOS", "validate_config", "resolve_scenario", "run_scenario"]

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "custom"
    base_unit: str = "lambda"
    omega_s_ratio: float = 100.0
    delta_ratios: tuple = (0.4,)
    detuning_ratios: tuple = (0.1,)
    temperatures: tuple = (1.0,)
    alpha: float = 2.0
    gamma_rate: float | None = None
    g_coupling: float | None = None
    omega_drive: float = 102.0
    temperature_unit: float = 20.0
    time_max: float = 2.0
    time_points: int = 2001
    thetas: tuple | None = None
    theta_points: int = 61
    phi: float = 0.0
    horizon: float = 2.0
    pointer_measure: str = "time_average"
    trimer_j: float = 1.0
    trimer_d_over_j: float = 0.1
    window_k: float = 50.0
    quad_rel_tol: float = 1e-10
    quad_abs_tol: float = 1e-14
    node_budget: int = 2_000_000
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    include_nonsecular: bool = False
    outdir: str = "out"
    plot: bool = True
    # ODE sweeps are GIL-bound; >1 mainly helps the kernel quadrature stage
    workers: int = 1


_LIST_KEYS = {"delta_ratios", "detuning_ratios", "temperatures", "thetas"}
_INT_KEYS = {"time_points", "theta_points", "node_budget", "workers"}
_BOOL_KEYS = {"include_nonsecular", "plot"}
_STR_KEYS = {"scenario", "base_unit", "pointer_measure", "outdir"}
_OPTIONAL_FLOAT = {"gamma_rate", "g_coupling"}

SCENARIOS = {
    "fig1": dict(scenario="fig1", trimer_j=1.0, trimer_d_over_j=0.1),
    # caption values: omega_s/lambda = 100, (omega0-omega)/lambda = 0.1, T = 1,
    # sweep of delta_so/omega_s bracketing the quoted 0.4 and 0.9
    "fig2": dict(scenario="fig2", omega_s_ratio=100.0, detuning_ratios=(0.1,),
                 temperatures=(1.0,), delta_ratios=(0.1, 0.4, 0.7, 0.9),
                 time_max=2.0, time_points=4001),
    "fig3": dict(scenario="fig3", omega_s_ratio=100.0, delta_ratios=(0.4,),
                 detuning_ratios=(0.1, 10.0), temperatures=(0.0, 1.0),
                 time_max=2.0, time_points=2001),
    "fig4": dict(scenario="fig4", base_unit="omega0", gamma_rate=0.1,
                 g_coupling=0.01, omega_s_ratio=100.0, omega_drive=0.9,
                 delta_ratios=(0.4,), temperatures=(1.0,), temperature_unit=0.2,
                 detuning_ratios=(), time_max=4.0, time_points=801),
    "fig5a": dict(scenario="fig5a", omega_s_ratio=100.0, delta_ratios=(0.9,),
                  detuning_ratios=(0.1,), temperatures=(0.0,),
                  time_max=2.0, time_points=2001),
    "fig5b": dict(scenario="fig5b", omega_s_ratio=100.0, delta_ratios=(0.9,),
                  detuning_ratios=(10.0,), temperatures=(1.0,),
                  time_max=2.0, time_points=2001),
    "fig6": dict(scenario="fig6", omega_s_ratio=100.0, delta_ratios=(0.9,),
                 detuning_ratios=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0),
                 temperatures=(1.0,), theta_points=61, horizon=2.0,
                 time_max=2.0, time_points=1001),
    "custom": dict(scenario="custom"),
}

_DEFAULT_THETAS = tuple(np.round(np.linspace(0.0, np.pi, 7), 15))


# ----------------------------------------------------------------------------
# Config parsing and validation
# ----------------------------------------------------------------------------

def _convert(key, raw, line_no, errors):
    raw = raw.strip()
    try:
        if key in _STR_KEYS:
            return raw
        if key in _BOOL_KEYS:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"expected boolean, got '{raw}'")
        if key in _INT_KEYS:
            return int(raw)
        if key in _LIST_KEYS:
            if raw.lower() in ("", "none"):
                return ()
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        if key in _OPTIONAL_FLOAT:
            return None if raw.lower() == "none" else float(raw)
        return float(raw)
    except ValueError as exc:
        errors.append((line_no, f"{key}: {exc}"))
        return None


def parse_config_text(text):
    """Parse 'key = value' lines; returns (dict, error list of (line, msg))."""
    valid = set(ScenarioConfig.__dataclass_fields__)
    out, errors = {}, []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append((line_no, f"expected 'key = value', got '{stripped}'"))
            continue
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in valid:
            errors.append((line_no, f"unknown key '{key}'"))
            continue
        val = _convert(key, raw, line_no, errors)
        if val is not None or key in _OPTIONAL_FLOAT:
            out[key] = val
    return out, errors


def validate_config(text, overrides=None) -> ScenarioConfig:
    """Resolve raw config text (plus overrides) into a checked ScenarioConfig."""
    parsed, errors = parse_config_text(text)
    if errors:
        raise ConfigError(errors)
    if overrides:
        parsed.update(overrides)
    name = parsed.get("scenario", "custom")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{name}' (known: {', '.join(sorted(SCENARIOS))})")
    merged = dict(SCENARIOS[name])
    merged.update(parsed)
    cfg = ScenarioConfig(**merged)
    _semantic_checks(cfg)
    return cfg


def _semantic_checks(cfg: ScenarioConfig):
    errs = []
    if cfg.base_unit not in ("lambda", "omega0"):
        errs.append((0, f"base_unit must be 'lambda' or 'omega0', got '{cfg.base_unit}'"))
    if cfg.scenario == "fig4" and cfg.base_unit != "omega0":
        errs.append((0, "fig4 declares frequencies in units of omega0; base_unit must be 'omega0'"))
    if cfg.scenario not in ("fig4", "fig1", "custom") and cfg.base_unit != "lambda":
        errs.append((0, f"{cfg.scenario} declares frequencies in units of lambda; contradictory base_unit"))
    if cfg.base_unit == "omega0" and (cfg.gamma_rate is None or cfg.g_coupling is None):
        errs.append((0, "omega0-based runs need gamma_rate and g_coupling for the cavity-filtered bath"))
    if any(t < 0 for t in cfg.temperatures):
        errs.append((0, "temperatures must be >= 0"))
    if cfg.temperature_unit <= 0:
        errs.append((0, "temperature_unit must be positive"))
    if cfg.alpha < 0:
        errs.append((0, "alpha must be >= 0"))
    if any(abs(r) > 1 for r in cfg.delta_ratios):
        errs.append((0, "delta_ratios must satisfy |delta_so/omega_s| <= 1"))
    if not cfg.delta_ratios:
        errs.append((0, "at least one delta ratio is required"))
    if cfg.time_points < 3:
        errs.append((0, "time_points must be >= 3"))
    if cfg.time_max <= 0:
        errs.append((0, "time_max must be positive"))
    if cfg.theta_points < 1:
        errs.append((0, "theta_points must be >= 1"))
    if cfg.scenario == "fig6" and cfg.horizon > cfg.time_max:
        errs.append((0, "horizon cannot exceed time_max"))
    if cfg.pointer_measure not in ("time_average", "max", "final"):
        errs.append((0, f"unknown pointer_measure '{cfg.pointer_measure}'"))
    if cfg.scenario != "fig1" and cfg.scenario != "custom" and cfg.scenario != "fig4" and not cfg.detuning_ratios:
        errs.append((0, f"{cfg.scenario} needs at least one detuning ratio"))
    if errs:
        raise ConfigError(errs)


# ----------------------------------------------------------------------------
# Physical resolution
# ----------------------------------------------------------------------------

@dataclass
class ResolvedPoint:
    """Absolute model inputs for one scenario point, all in base units."""

    delta_ratio: float
    detuning: float
    t_caption: float
    params: object
    bath: BathConfig
    derived: dict = field(default_factory=dict)


def resolve_point(cfg: ScenarioConfig, delta_ratio, detuning, t_caption) -> ResolvedPoint:
    omega_s = cfg.omega_s_ratio
    delta_so = delta_ratio * omega_s
    d_eps = float(np.sqrt(max(omega_s**2 - delta_so**2, 0.0)))
    omega = cfg.omega_drive
    omega_so = omega + delta_so
    params = make_params(omega_so=omega_so, omega=omega, eps=d_eps, d=1.0)
    t_abs = t_caption * cfg.temperature_unit

    quad = QuadratureSpec(window_k=cfg.window_k, rel_tol=cfg.quad_rel_tol,
                          abs_tol=cfg.quad_abs_tol, node_budget=cfg.node_budget)
    if cfg.base_unit == "omega0":
        spectral = CavityEffective.from_mode_coupling(cfg.g_coupling, cfg.gamma_rate, 1.0)
        omega0 = 1.0
    else:
        omega0 = omega + detuning
        spectral = Lorentzian(alpha=cfg.alpha, width=1.0, omega0=omega0)
    bath = BathConfig(spectral=spectral, temperature=t_abs, quadrature=quad)

    if t_abs >= omega_so > 0:
        warnings.warn(
            f"temperature {t_abs:g} is not below the spin-orbit splitting {omega_so:g}; "
            "outside the low-temperature regime",
            stacklevel=2,
        )
    derived = {
        "delta_ratio": delta_ratio, "detuning": detuning, "T_caption": t_caption,
        "omega_s": omega_s, "delta_so": delta_so, "d_eps": d_eps,
        "omega_drive": omega, "omega_so": omega_so, "omega0": omega0,
        "temperature_abs": t_abs,
        "omega_targets": {"0": omega, "plus": omega + omega_s, "minus": omega - omega_s},
        "alpha": getattr(spectral, "alpha", None),
    }
    return ResolvedPoint(delta_ratio, detuning, t_caption, params, bath, derived)


def resolve_scenario(cfg: ScenarioConfig):
    """All resolved points of a scenario in deterministic order."""
    points = []
    dets = cfg.detuning_ratios or (0.0,)
    for det in dets:
        for t_cap in cfg.temperatures:
            for ratio in cfg.delta_ratios:
                points.append(resolve_point(cfg, ratio, det, t_cap))
    return points


# ----------------------------------------------------------------------------
# Output helpers
# ----------------------------------------------------------------------------

def _fmt(x):
    return _FLOAT_FMT % x


def write_csv(path: Path, header, columns, comments=()):
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(f"# {c}" for c in comments)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def trajectory_csv(path: Path, traj):
    s = traj.states
    write_csv(
        path,
        ["t", "P", "E", "re_rho00", "re_rho11", "re_rho01", "im_rho01",
         "gamma_z", "gamma_plus", "gamma_minus"],
        [traj.times, traj.polarization, traj.entropy,
         s[:, 0, 0].real, s[:, 1, 1].real, s[:, 0, 1].real, s[:, 0, 1].imag,
         traj.gamma_z, traj.gamma_plus, traj.gamma_minus],
    )


def kernel_csv(path: Path, table):
    header = ["t"]
    cols = [table.times]
    for lab in ("0", "plus", "minus"):
        header += [f"re_Gamma_{lab}", f"im_Gamma_{lab}"]
        cols += [table.Gamma[lab].real, table.Gamma[lab].imag]
    for lab in ("0", "plus", "minus"):
        header += [f"re_Gamma_prime_{lab}", f"im_Gamma_prime_{lab}"]
        cols += [table.GammaPrime[lab].real, table.GammaPrime[lab].imag]
    header += ["gamma_z", "gamma_plus", "gamma_minus"]
    cols += [table.gamma_z, table.gamma_plus, table.gamma_minus]
    write_csv(path, header, cols)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ----------------------------------------------------------------------------
# Runners
# ----------------------------------------------------------------------------

def run_scenario(cfg: ScenarioConfig) -> dict:
    """Execute a scenario; returns the manifest (also written to disk)."""
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runner = {
        "fig1": _run_fig1,
        "fig2": _run_trajectories,
        "fig3": _run_rates,
        "fig4": _run_trajectories,
        "fig5a": _run_entropy,
        "fig5b": _run_entropy,
        "fig6": _run_scan,
        "custom": _run_trajectories,
    }[cfg.scenario]
    outputs, extra = runner(cfg, outdir)

    manifest = {
        "scenario": cfg.scenario,
        "version": __version__,
        "config": asdict(cfg),
        "resolved": extra,
        "outputs": [
            {"path": p.name, "sha256": _sha256(p)} for p in outputs
        ],
    }
    mpath = outdir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n",
                     encoding="utf-8")
    return manifest


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)}")


def _point_label(pt: ResolvedPoint, cfg: ScenarioConfig):
    bits = []
    if len(cfg.delta_ratios) > 1:
        bits.append(f"r{pt.delta_ratio:g}")
    if len(cfg.detuning_ratios) > 1:
        bits.append(f"det{pt.detuning:g}")
    if len(cfg.temperatures) > 1:
        bits.append(f"T{pt.t_caption:g}")
    return "_".join(bits) if bits else "base"


def _kernel_cache_run(cfg: ScenarioConfig, points, times):
    """Kernel tables keyed by (detuning, T); shared across delta ratios."""
    keys, seen = [], set()
    for pt in points:
        k = (pt.detuning, pt.t_caption)
        if k not in seen:
            seen.add(k)
            keys.append((k, pt))

    def compute(pair):
        _, pt = pair
        return compute_kernels(pt.bath, pt.params, times)

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        tables = list(pool.map(compute, keys))
    return {k: tab for (k, _), tab in zip(keys, tables)}


def _run_trajectories(cfg: ScenarioConfig, outdir: Path):
    times = np.linspace(0.0, cfg.time_max, cfg.time_points)
    points = resolve_scenario(cfg)
    cache = _kernel_cache_run(cfg, points, times)
    options = PropagationOptions(include_nonsecular=cfg.include_nonsecular,
                                 rtol=cfg.ode_rtol, atol=cfg.ode_atol)
    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)

    def one(pt):
        table = decay_rates(cache[(pt.detuning, pt.t_caption)],
                            dressed_interaction_coefficients(pt.params))
        return propagate(rho0, pt.bath, pt.params, times, options, kernels=table)

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        trajs = list(pool.map(one, points))

    outputs, resolved, curves = [], [], []
    for pt, traj in zip(points, trajs):
        label = _point_label(pt, cfg)
        path = outdir / f"{cfg.scenario}_traj_{label}.csv"
        trajectory_csv(path, traj)
        outputs.append(path)
        info = dict(pt.derived)
        info.update(positivity_violation=traj.positivity_violation,
                    trace_error=traj.trace_error, file=path.name)
        resolved.append(info)
        curves.append((label, traj.polarization))
    if cfg.plot:
        from . import report

        fig_path = outdir / f"{cfg.scenario}_polarization.svg"
        report.line_plot(fig_path, times, curves, xlabel="t (base units)",
                         ylabel="polarization P(t)", title=cfg.scenario)
        outputs.append(fig_path)
    return outputs, resolved


def _run_rates(cfg: ScenarioConfig, outdir: Path):
    times = np.linspace(0.0, cfg.time_max, cfg.time_points)
    points = resolve_scenario(cfg)
    cache = _kernel_cache_run(cfg, points, times)
    outputs, resolved, panels = [], [], []
    for pt in points:
        table = decay_rates(cache[(pt.detuning, pt.t_caption)],
                            dressed_interaction_coefficients(pt.params))
        label = _point_label(pt, cfg)
        path = outdir / f"{cfg.scenario}_rates_{label}.csv"
        kernel_csv(path, table)
        outputs.append(path)
        info = dict(pt.derived)
        info.update(nodes=table.node_count, est_error=table.est_error, file=path.name)
        resolved.append(info)
        panels.append((label, table.gamma_plus, table.gamma_minus))
    if cfg.plot:
        from . import report

        fig_path = outdir / f"{cfg.scenario}_rates.svg"
        report.rate_panels(fig_path, times, panels, title=cfg.scenario)
        outputs.append(fig_path)
    return outputs, resolved


def _run_entropy(cfg: ScenarioConfig, outdir: Path):
    times = np.linspace(0.0, cfg.time_max, cfg.time_points)
    points = resolve_scenario(cfg)
    thetas = cfg.thetas if cfg.thetas is not None else _DEFAULT_THETAS
    cache = _kernel_cache_run(cfg, points, times)
    options = PropagationOptions(rtol=cfg.ode_rtol, atol=cfg.ode_atol)

    outputs, resolved, curves = [], [], []
    for pt in points:
        table = decay_rates(cache[(pt.detuning, pt.t_caption)],
                            dressed_interaction_coefficients(pt.params))

        def one(theta):
            rho0 = bloch_to_state(BlochState(float(theta), cfg.phi))
            return propagate(rho0, pt.bath, pt.params, times, options, kernels=table)

        with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
            trajs = list(pool.map(one, thetas))
        label = _point_label(pt, cfg)
        for k, (theta, traj) in enumerate(zip(thetas, trajs)):
            suffix = f"theta{k}" if label == "base" else f"{label}_theta{k}"
            path = outdir / f"{cfg.scenario}_traj_{suffix}.csv"
            trajectory_csv(path, traj)
            outputs.append(path)
            resolved.append({**pt.derived, "theta": float(theta), "file": path.name,
                             "positivity_violation": traj.positivity_violation})
            curves.append((f"{label} theta={theta:.3f}" if label != "base"
                           else f"theta={theta:.3f}", traj.entropy))
    if cfg.plot:
        from . import report

        fig_path = outdir / f"{cfg.scenario}_entropy.svg"
        report.line_plot(fig_path, times, curves, xlabel="t (base units)",
                         ylabel="entropy E(t)", title=cfg.scenario)
        outputs.append(fig_path)
    return outputs, resolved


def _run_scan(cfg: ScenarioConfig, outdir: Path):
    times = np.linspace(0.0, cfg.time_max, cfg.time_points)
    theta_grid = np.linspace(0.0, np.pi, cfg.theta_points)
    points = resolve_scenario(cfg)
    options = PropagationOptions(rtol=cfg.ode_rtol, atol=cfg.ode_atol)

    def one(pt):
        return pointer_scan(pt.bath, pt.params, theta_grid, cfg.phi, cfg.horizon,
                            times, options, measure=cfg.pointer_measure)

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        scans = list(pool.map(one, points))

    outputs, resolved = [], []
    for pt, scan in zip(points, scans):
        label = _point_label(pt, cfg)
        path = outdir / f"{cfg.scenario}_scan_{label}.csv"
        write_csv(path, ["theta", "score"], [scan.thetas, scan.scores],
                  comments=[f"theta_p = {_fmt(scan.theta_p)}",
                            f"horizon = {_fmt(scan.horizon)}",
                            f"measure = {scan.measure}"])
        outputs.append(path)
        resolved.append({**pt.derived, "theta_p": scan.theta_p, "file": path.name})
    summary = outdir / f"{cfg.scenario}_summary.csv"
    write_csv(summary, ["detuning", "theta_p"],
              [[pt.detuning for pt in points], [s.theta_p for s in scans]])
    outputs.append(summary)
    if cfg.plot:
        from . import report

        fig_path = outdir / f"{cfg.scenario}_pointer.svg"
        report.line_plot(fig_path, np.asarray([pt.detuning for pt in points]),
                         [("theta_p", np.asarray([s.theta_p for s in scans]))],
                         xlabel="(omega0 - omega) / lambda", ylabel="theta_p",
                         title=cfg.scenario, marker="o")
        outputs.append(fig_path)
    return outputs, resolved


def _run_fig1(cfg: ScenarioConfig, outdir: Path):
    j = cfg.trimer_j
    d = cfg.trimer_d_over_j * j
    params = TrimerParams.isotropic(j, d)
    evals = np.linalg.eigvalsh(build_trimer_hamiltonian(params))
    eff = derive_effective(params)

    path = outdir / "fig1_spectrum.csv"
    write_csv(path, ["index", "energy"], [np.arange(len(evals)), evals])
    outputs = [path]
    resolved = [{"J": j, "D": d, "D_over_J": cfg.trimer_d_over_j,
                 "omega_so": eff.omega_so, "file": path.name}]
    if cfg.plot:
        from . import report

        dgrid = np.linspace(0.0, 0.2 * j, 41)
        levels = np.array([
            np.linalg.eigvalsh(build_trimer_hamiltonian(TrimerParams.isotropic(j, dv)))
            for dv in dgrid
        ])
        fig_path = outdir / "fig1_levels.svg"
        report.level_plot(fig_path, dgrid / j, levels, mark=cfg.trimer_d_over_j)
        outputs.append(fig_path)
    return outputs, resolved
