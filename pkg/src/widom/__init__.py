"""Widom factors, weighted Chebyshev and orthogonal polynomials, and Mahler
measures on compact sets in the plane and on product sets in several variables.
"""

from . import descriptors, errors, extremal1d, mahler, modelsets, productnd, sets1d
from .errors import NonPolarError, ResolutionError, ScaleError, SzegoError, UnboundedWeightError
from .extremal1d import monic_orthogonal, weighted_chebyshev, widom_l2_1d, widom_sup_1d
from .mahler import MahlerResult, coeff_bound_1d, coeff_bound_nd, integer_floor_check, mahler_1d, mahler_nd
from .productnd import (ProductSet, ProductWeight, SparsePolyND, product_chebyshev, product_orthogonal,
                        widom_l2_nd, widom_report, widom_sup_nd)
from .sets1d import (AbsPower, Circle, Constant, Intervals, PiecewiseConstant, PolynomialPreimage, UnitCircle,
                     capacity, equilibrium_measure, interval, log_potential, szego_value)

__version__ = "0.1.0"
