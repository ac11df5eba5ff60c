"""Complex exceptional orthogonal polynomials: Hermite and Laurent families, quasi-invariance, contour forms."""

from .exactalg import GaussianRational, LaurentPoly, Poly
from .hermite import HermiteFamily, Partition, cehp, w_lambda
from .laurent import KappaSet, LaurentFamily, dagger, phi

__all__ = ["GaussianRational", "Poly", "LaurentPoly", "Partition", "HermiteFamily", "cehp", "w_lambda",
           "KappaSet", "LaurentFamily", "phi", "dagger"]
__version__ = "0.1.0"
