"""Spectral densities, thermal occupation and memory-kernel integrals.

The time-local generator needs, for each shifted frequency
omega_l = omega + l*omega_s (l in {0, +, -}), the partial-time integrals of
the bath correlation functions

    Gamma_l(t)      = int dw' J(w') nbar(w')     (e^{i(w'-omega_l)t} - 1)/(i(w'-omega_l))
    GammaPrime_l(t) = int dw' J(w') (nbar(w')+1) (e^{i(w'-omega_l)t} - 1)/(i(w'-omega_l))

The inner time integral is analytic; the frequency integral is done with
deterministic composite Gauss-Legendre panels refined until two consecutive
panel densities agree within tolerance.  Fixed node layouts keep reruns
byte-identical.  The real parts of these kernels combine into the
time-dependent decay rates gamma_z, gamma_plus, gamma_minus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NonPositiveFrequency, QuadratureFailure

__all__ = [
    "Lorentzian",
    "OhmicExp",
    "CavityEffective",
    "effective_alpha",
    "spectral_eval",
    "mean_occupation",
    "QuadratureSpec",
    "BathConfig",
    "KernelTable",
    "kernel_integral",
    "compute_kernels",
    "compute_kernels_discrete",
    "decay_rates",
]

_GL_ORDER = 16
_GL_X, _GL_W = leggauss(_GL_ORDER)


# ----------------------------------------------------------------------------
# Spectral densities
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Lorentzian:
    """J(w') = alpha^2 lambda^2 / (2 pi [(w' - omega0)^2 + lambda^2])."""

    alpha: float
    width: float
    omega0: float

    def evaluate(self, w):
        w = np.asarray(w, dtype=float)
        return self.alpha**2 * self.width**2 / (
            2.0 * np.pi * ((w - self.omega0) ** 2 + self.width**2)
        )

    def default_window(self, k=50.0):
        return (max(0.0, self.omega0 - k * self.width), self.omega0 + k * self.width)

    def peaks(self):
        return [(self.omega0, self.width)]

    def total_mass(self):
        # full-line integral
        return self.alpha**2 * self.width / 2.0


@dataclass(frozen=True)
class OhmicExp:
    """J(w') = gamma_rate * w' * exp(-w'/omega_c) for w' > 0."""

    gamma_rate: float
    omega_c: float

    def evaluate(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(w > 0, self.gamma_rate * w * np.exp(-np.clip(w, 0, None) / self.omega_c), 0.0)

    def default_window(self, k=None):
        # (X/wc + 1) exp(-X/wc) < 1e-16 at X = 40 wc
        return (0.0, 40.0 * self.omega_c)

    def peaks(self):
        return [(self.omega_c, self.omega_c)]

    def total_mass(self):
        return self.gamma_rate * self.omega_c**2


@dataclass(frozen=True)
class CavityEffective:
    """Cavity-filtered bath: J(w') = 2 alpha w' omega0^4 / [(omega0^2 - w'^2)^2 + (2 pi gamma w' omega0)^2]."""

    alpha: float
    omega0: float
    gamma_rate: float

    @classmethod
    def from_mode_coupling(cls, g, gamma_rate, omega0):
        return cls(alpha=effective_alpha(g, gamma_rate, omega0), omega0=omega0, gamma_rate=gamma_rate)

    def evaluate(self, w):
        w = np.asarray(w, dtype=float)
        num = 2.0 * self.alpha * w * self.omega0**4
        den = (self.omega0**2 - w**2) ** 2 + (2.0 * np.pi * self.gamma_rate * w * self.omega0) ** 2
        return np.where(w > 0, num / den, 0.0)

    def default_window(self, k=None):
        # 1/w'^3 tail: relative mass beyond X is ~ 2 gamma (omega0/X)^2
        x = self.omega0 * np.sqrt(2.0 * self.gamma_rate * 1e10)
        return (0.0, max(x, 10.0 * self.omega0))

    def peaks(self):
        return [(self.omega0, max(np.pi * self.gamma_rate * self.omega0, 0.01 * self.omega0))]

    def total_mass(self):
        lo, hi = self.default_window()
        return _panel_integral(self, lo, hi)


def effective_alpha(g, gamma_rate, omega0):
    """Weak coupling strength of the cavity-filtered bath: alpha = 8 gamma g^2 / omega0."""
    return 8.0 * gamma_rate * g**2 / omega0


def spectral_eval(spectral, omega_prime):
    """Pointwise J(omega_prime); non-negative on its domain."""
    return spectral.evaluate(omega_prime)


def mean_occupation(omega_prime, temperature):
    """Bose-Einstein occupation 1/(e^{w/T} - 1); exactly 0 at T = 0."""
    w = np.asarray(omega_prime, dtype=float)
    if np.any(w <= 0.0):
        raise NonPositiveFrequency("mean occupation requires omega_prime > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        return np.zeros_like(w) if w.shape else 0.0
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(w / temperature)
    return out if w.shape else float(out)


# ----------------------------------------------------------------------------
# Configuration containers
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Deterministic panel quadrature controls.

    window overrides the spectral default; max_phase bounds the oscillation
    phase accumulated per panel so that 16-point Gauss-Legendre stays exact.
    """

    window_k: float = 50.0
    window: tuple | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    node_budget: int = 2_000_000
    max_phase: float = 8.0
    max_refinements: int = 8


@dataclass(frozen=True)
class BathConfig:
    spectral: object
    temperature: float
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass
class KernelTable:
    """Complex memory kernels and real decay rates tabulated on a time grid."""

    times: np.ndarray
    Gamma: dict          # label -> complex array, nbar-weighted
    GammaPrime: dict     # label -> complex array, (nbar+1)-weighted
    omega_targets: dict  # label -> omega_l
    gamma_z: np.ndarray | None = None
    gamma_plus: np.ndarray | None = None
    gamma_minus: np.ndarray | None = None
    node_count: int = 0
    est_error: float = 0.0

    LABELS = ("0", "plus", "minus")


# ----------------------------------------------------------------------------
# Panel machinery
# ----------------------------------------------------------------------------

def _breakpoints(lo, hi, peaks, t_max, max_phase):
    """Deterministic panel edges: peak ladders plus an oscillation cap."""
    pts = {lo, hi}
    for center, scale in peaks:
        for m in (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0,
                  16.0, 24.0, 32.0, 48.0):
            for s in (-1.0, 1.0):
                p = center + s * m * scale
                if lo < p < hi:
                    pts.add(p)
        if lo < center < hi:
            pts.add(center)
    edges = np.array(sorted(pts))
    dx_cap = max_phase / t_max if t_max > 0 else np.inf
    # also resolve the narrowest peak even for tiny t_max
    min_scale = min(s for _, s in peaks) if peaks else (hi - lo)
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        gap = b - a
        local_cap = dx_cap
        for center, scale in peaks:
            if min(abs(a - center), abs(b - center)) < 6.0 * scale:
                local_cap = min(local_cap, scale / 2.0)
        if not np.isfinite(local_cap):
            local_cap = max(gap, min_scale)
        n = max(1, int(np.ceil(gap / local_cap)))
        out.extend(a + gap * np.arange(1, n + 1) / n)
    return np.asarray(out)


def _nodes_weights(edges):
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    wts = (half[:, None] * _GL_W[None, :]).ravel()
    return nodes, wts


def _refine(edges):
    mids = 0.5 * (edges[:-1] + edges[1:])
    return np.sort(np.concatenate([edges, mids]))


def _panel_integral(spectral, lo, hi):
    """Plain integral of J over [lo, hi] (no oscillation)."""
    edges = _breakpoints(lo, hi, spectral.peaks(), 0.0, 8.0)
    val = 0.0
    for _ in range(20):
        nodes, wts = _nodes_weights(edges)
        new = float(np.sum(wts * spectral.evaluate(nodes)))
        if abs(new - val) <= 1e-13 * max(abs(new), 1e-300) + 1e-300:
            return new
        val = new
        edges = _refine(edges)
    return val


def _kernel_sums(nodes, wts_j, wts_jn, targets, times):
    """Accumulate Gamma-type sums for every target frequency.

    wts_j is the (nbar+1)-weighted node strength, wts_jn the nbar-weighted one
    (None at T = 0).  Returns (prime, absorb) dicts keyed like targets with
    complex arrays over times.
    """
    n_t = len(times)
    n_nodes = len(nodes)
    uniform = n_t > 2 and np.allclose(np.diff(times), times[1] - times[0], rtol=1e-12, atol=0.0)
    t_max = float(times[-1]) if n_t else 0.0

    out_prime = {lab: np.zeros(n_t, dtype=complex) for lab in targets}
    out_abs = {lab: np.zeros(n_t, dtype=complex) for lab in targets} if wts_jn is not None else None

    # per-target main-path weights a/(i x) with near-resonant nodes masked out
    per_target = {}
    for lab, wl in targets.items():
        x = nodes - wl
        small = np.abs(x) * max(t_max, 1.0) < 1e-3
        xs = np.where(small, 1.0, x)
        rows = [np.where(small, 0.0, wts_j) / (1j * xs)]
        if wts_jn is not None:
            rows.append(np.where(small, 0.0, wts_jn) / (1j * xs))
        w_main = np.asarray(rows)
        const = w_main.sum(axis=1)
        per_target[lab] = (x, small, w_main, const)

    # chunked phase matrix exp(i * nodes * t)
    max_elems = 12_000_000
    chunk = max(8, min(n_t, int(max_elems / max(n_nodes, 1))))
    carry = None
    step = None
    pos = 0
    while pos < n_t:
        tc = times[pos : pos + chunk]
        m = len(tc)
        if uniform:
            if carry is None:
                carry = np.exp(1j * nodes * times[0])
                step = np.exp(1j * nodes * (times[1] - times[0]))
            e0 = np.empty((n_nodes, m), dtype=complex)
            e0[:, 0] = carry
            for k in range(1, m):
                e0[:, k] = e0[:, k - 1] * step
            carry = e0[:, -1] * step
        else:
            e0 = np.exp(1j * nodes[:, None] * tc[None, :])
        for lab, wl in targets.items():
            x, small, w_main, const = per_target[lab]
            u = np.exp(-1j * wl * tc)
            sums = w_main @ e0  # (rows, m)
            vals_p = sums[0] * u - const[0]
            out_prime[lab][pos : pos + m] += vals_p
            if wts_jn is not None:
                out_abs[lab][pos : pos + m] += sums[1] * u - const[1]
        pos += m

    # series path for near-resonant nodes: (e^{z}-1)/z with z = i x t
    for lab in targets:
        x, small, _, _ = per_target[lab]
        if not np.any(small):
            continue
        xs = x[small]
        z = 1j * xs[:, None] * times[None, :]
        series = times[None, :] * (1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0 + z**4 / 120.0)
        out_prime[lab] += wts_j[small] @ series
        if wts_jn is not None:
            out_abs[lab] += wts_jn[small] @ series

    # (e^{ix0}-1)/(ix) vanishes identically; pin t = 0 entries to exact zero
    zero = times == 0.0
    if np.any(zero):
        for lab in targets:
            out_prime[lab][zero] = 0.0
            if wts_jn is not None:
                out_abs[lab][zero] = 0.0
    return out_prime, out_abs


def _integrate_kernels(spectral, temperature, targets, times, quad):
    """Refinement loop around _kernel_sums for a continuum spectral density."""
    times = np.asarray(times, dtype=float)
    lo, hi = quad.window if quad.window is not None else spectral.default_window(quad.window_k)
    if hi <= lo:
        raise ValueError("empty integration window")
    edges = _breakpoints(lo, hi, spectral.peaks(), float(times[-1]), quad.max_phase)

    prev = None
    for _ in range(quad.max_refinements + 1):
        nodes, wts = _nodes_weights(edges)
        if _GL_ORDER * (len(edges) - 1) > quad.node_budget:
            raise QuadratureFailure(
                f"node budget {quad.node_budget} exceeded before convergence",
                est_error=None, nodes=len(nodes),
            )
        jv = wts * spectral.evaluate(nodes)
        if temperature > 0.0:
            nb = mean_occupation(nodes, temperature)
            wts_jn = jv * nb
            wts_j = jv * (nb + 1.0)
        else:
            wts_jn = None
            wts_j = jv
        prime, absorb = _kernel_sums(nodes, wts_j, wts_jn, targets, times)
        if prev is not None:
            scale = max(max(np.max(np.abs(v)) for v in prime.values()), quad.abs_tol)
            err = 0.0
            for lab in targets:
                err = max(err, float(np.max(np.abs(prime[lab] - prev[0][lab]))))
                if absorb is not None:
                    err = max(err, float(np.max(np.abs(absorb[lab] - prev[1][lab]))))
            if err <= max(quad.abs_tol, quad.rel_tol * scale):
                return prime, absorb, len(nodes), err
        prev = (prime, absorb)
        edges = _refine(edges)
    raise QuadratureFailure(
        f"kernel quadrature did not converge within {quad.max_refinements} refinements",
        est_error=err if prev is not None else None, nodes=len(nodes),
    )


# ----------------------------------------------------------------------------
# Public kernel API
# ----------------------------------------------------------------------------

def kernel_integral(spectral, temperature, omega_target, times, quad=None):
    """Gamma(t), GammaPrime(t) for a single shifted frequency omega_target."""
    quad = quad or QuadratureSpec()
    prime, absorb, _, _ = _integrate_kernels(
        spectral, temperature, {"x": float(omega_target)}, np.asarray(times, float), quad
    )
    n_t = len(np.asarray(times))
    gam = absorb["x"] if absorb is not None else np.zeros(n_t, dtype=complex)
    return gam, prime["x"]


def compute_kernels(bath: BathConfig, params, times) -> KernelTable:
    """KernelTable for the three shifted frequencies omega + l*omega_s.

    The continuum limit replaces the mode sum by the spectral integral.  At
    T = 0 the absorption kernels are exact zeros by the nbar = 0 shortcut.
    Decay rates are filled in with the dressed weights of params.
    """
    times = np.asarray(times, dtype=float)
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must ascend from 0")
    _weak_coupling_check(bath.spectral, params.omega_s)
    targets = {
        "0": params.omega,
        "plus": params.omega + params.omega_s,
        "minus": params.omega - params.omega_s,
    }
    prime, absorb, n_nodes, err = _integrate_kernels(
        bath.spectral, bath.temperature, targets, times, bath.quadrature
    )
    if absorb is None:
        absorb = {lab: np.zeros(len(times), dtype=complex) for lab in targets}
    table = KernelTable(
        times=times, Gamma=absorb, GammaPrime=prime, omega_targets=targets,
        node_count=n_nodes, est_error=err,
    )
    from .qubit import dressed_interaction_coefficients

    return decay_rates(table, dressed_interaction_coefficients(params))


def compute_kernels_discrete(modes, temperature, params, times) -> KernelTable:
    """KernelTable from an explicit mode list [(g_j, omega_j)], exact sums."""
    times = np.asarray(times, dtype=float)
    g = np.array([m[0] for m in modes], dtype=float)
    w = np.array([m[1] for m in modes], dtype=float)
    targets = {
        "0": params.omega,
        "plus": params.omega + params.omega_s,
        "minus": params.omega - params.omega_s,
    }
    wts = g**2
    if temperature > 0.0:
        nb = mean_occupation(w, temperature)
        prime, absorb = _kernel_sums(w, wts * (nb + 1.0), wts * nb, targets, times)
    else:
        prime, absorb = _kernel_sums(w, wts, None, targets, times)
        absorb = {lab: np.zeros(len(times), dtype=complex) for lab in targets}
    table = KernelTable(
        times=times, Gamma=absorb, GammaPrime=prime, omega_targets=targets,
        node_count=len(modes), est_error=0.0,
    )
    from .qubit import dressed_interaction_coefficients

    return decay_rates(table, dressed_interaction_coefficients(params))


def decay_rates(table: KernelTable, coeffs) -> KernelTable:
    """Fill gamma_z, gamma_plus, gamma_minus from the kernel real parts.

    Each Lindblad channel weight is the squared dressed coefficient:
    gamma_z = 2 d0^2 Re(Gamma_0 + Gamma'_0), gamma_+ mixes the absorption
    kernel at omega + omega_s with the emission kernel at omega - omega_s,
    and gamma_- the converse.
    """
    c_z, c_p, c_m = coeffs
    d0_sq, dp_sq, dm_sq = c_z**2, c_p**2, c_m**2
    gz = 2.0 * d0_sq * (table.Gamma["0"].real + table.GammaPrime["0"].real)
    gp = 2.0 * dp_sq * table.Gamma["plus"].real + 2.0 * dm_sq * table.GammaPrime["minus"].real
    gm = 2.0 * dm_sq * table.Gamma["minus"].real + 2.0 * dp_sq * table.GammaPrime["plus"].real
    if not (np.all(np.isfinite(gz)) and np.all(np.isfinite(gp)) and np.all(np.isfinite(gm))):
        raise QuadratureFailure("non-finite decay rates")
    return replace(table, gamma_z=gz, gamma_plus=gp, gamma_minus=gm)


def _weak_coupling_check(spectral, omega_s):
    if isinstance(spectral, Lorentzian) and spectral.alpha**2 > 0.1 * omega_s:
        warnings.warn(
            f"alpha^2 = {spectral.alpha**2:.3g} is not small against omega_s = {omega_s:.3g}; "
            "weak-coupling treatment may be inaccurate",
            stacklevel=3,
        )
