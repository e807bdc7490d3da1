"""
q-analogues of Borel-Laplace summation.

Submodules
----------
qcore       q-parameters, q-Pochhammer symbols, truncated series
special     theta, q-exponentials, q-Gamma, Omega, q-logarithm, modular map
jackson     finite and bilateral Jackson integrals
transforms  q-Borel transforms, ray quadrature, convergent q-Laplace transforms
euler_qlt1  the q-Euler function for q < 1 and its confluence
hypergeom   basic hypergeometric series and connection formulas
qsum_gt1    summation of divergent q-series for q > 1
cli         command-line front end
"""
from .errors import DomainError, NonConvergent, PoleAt, PoleOnPath, QSumError, ZeroArgument
from .qcore import NumericResult, QParam, Regime, SurfacePoint, TruncSeries

__all__ = [
    "QSumError", "DomainError", "ZeroArgument", "PoleAt", "PoleOnPath", "NonConvergent",
    "QParam", "Regime", "NumericResult", "SurfacePoint", "TruncSeries",
]
__version__ = "0.1.0"
