"""Anisotropic long-range dependence on the planar lattice.

Library layout:

* ``specfun``       - binomial / Bessel / incomplete-gamma machinery
* ``green``         - lattice Green functions, limit kernels, scaling ladders
* ``spectra``       - spectral densities, Fejer functionals, limit variances
* ``stable_limits`` - alpha-stable limit functionals J, exponent tables,
                      covariance asymptotics
* ``fields``        - simulation (AR aggregation, Gaussian synthesis) and the
                      scaling-exponent regression
* ``cli``           - batch orchestration (``lrd2d`` entry point)
"""

from . import fields, green, spectra, specfun, stable_limits
from .errors import (
    ConfigError,
    DomainError,
    ExcludedCaseError,
    NumericalError,
    ResourceError,
)

__version__ = "0.1.0"

__all__ = [
    "specfun",
    "green",
    "spectra",
    "stable_limits",
    "fields",
    "ConfigError",
    "DomainError",
    "ExcludedCaseError",
    "NumericalError",
    "ResourceError",
    "__version__",
]
