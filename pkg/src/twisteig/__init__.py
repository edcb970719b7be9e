"""Twisted Dirichlet eigenvalues of planar and higher-dimensional domains.

Subpackages:

* ``bessel``  -- self-contained Bessel-function kernel (values, zeros, and the
  auxiliary ratios ``phi``, ``big_phi``, ``upsilon`` used by the two-ball
  transcendental system).
* ``twoball`` -- analytic solver for the optimal two-ball configuration:
  twisted eigenvalues at a fixed measure ratio, the optimal curves m(alpha)
  and lambda(alpha), closed-form eigenfunctions, and identity checks.
* ``grid``    -- independent finite-difference eigensolver on masked 2D grids
  (Dirichlet and twisted eigenvalues, nodal analysis, inequality checks).
* ``cli``     -- the ``twisteig`` command-line front end.
"""

from .bessel import Dimension, bessel_j, bessel_zero, phi, big_phi, upsilon

__all__ = [
    "Dimension",
    "bessel_j",
    "bessel_zero",
    "phi",
    "big_phi",
    "upsilon",
]

__version__ = "0.1.0"
