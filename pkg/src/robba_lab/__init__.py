"""Exact p-adic arithmetic for overconvergent Laurent series and Robba-type rings.

The package is organised bottom-up:

    padic      capped-precision scalars in Q_p and log-domain norm values
    laurent    Laurent series in t over Q_p with tail certificates
    residue    double series over F_p((t)) and their Henselian root finder
    robba      two-sided series in y with OCLaurent coefficients
    mw         overconvergent power series in x, Weierstrass theory
    nabla      connection modules and their cohomology
    cli        the ``robba-lab`` batch front end
"""

from .errors import (
    RobbaLabError,
    SchemaError,
    PreconditionError,
    CertificateViolation,
)
from .padic import PadicScalar, LogNorm, BOTTOM

__all__ = [
    "RobbaLabError",
    "SchemaError",
    "PreconditionError",
    "CertificateViolation",
    "PadicScalar",
    "LogNorm",
    "BOTTOM",
]

__version__ = "0.1.0"
