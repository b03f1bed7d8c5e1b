"""Exception hierarchy shared by all modules.

The CLI maps these onto exit-code categories, so raising the right class
matters more than the message wording.
"""


class OpenspinError(Exception):
    """Base class for everything raised deliberately by this package."""


class ConfigError(OpenspinError):
    """Bad configuration file: unknown key, missing field, out-of-range value."""


class DimensionError(OpenspinError):
    """Resource guard: operator too large, mismatched shapes, missing ledger entries."""


class NumericError(OpenspinError):
    """Numerical contract violated: lost hermiticity, trace drift, PSD breakdown,
    failed eigendecomposition, overflow in reconstruction weights."""
