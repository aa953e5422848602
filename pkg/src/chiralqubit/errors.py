"""Exception classes shared across the package."""


class ChiralQubitError(Exception):
    """Base class for all package-specific errors."""


class ZeroSplitting(ChiralQubitError):
    """Dressed basis undefined because omega_s = 0."""


class NonPositiveFrequency(ChiralQubitError):
    """Bose occupation requested at a frequency <= 0."""


class QuadratureFailure(ChiralQubitError):
    """Kernel quadrature did not converge within the node budget."""

    def __init__(self, message, est_error=None, nodes=None):
        super().__init__(message)
        self.est_error = est_error
        self.nodes = nodes


class IntegratorFailure(ChiralQubitError):
    """Adaptive ODE propagation failed (step underflow or divergence)."""


class WindowError(ChiralQubitError):
    """Discretization window misses too much spectral mass."""


class DimensionError(ChiralQubitError):
    """Exact-evolution Hilbert space exceeds the desk-scale bound."""


class InvalidState(ChiralQubitError):
    """Density matrix violates positivity beyond tolerance."""


class ConfigError(ChiralQubitError):
    """Scenario configuration is missing, malformed or contradictory.

    Carries an itemized list of (line, message) diagnostics.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [(0, diagnostics)]
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.diagnostics)
        super().__init__(lines)
