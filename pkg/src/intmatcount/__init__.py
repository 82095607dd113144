"""Counting integer matrices with a given characteristic polynomial.

Exact ball censuses, GL_n(Z)-orbit classification through ideal classes,
the asymptotic constant C_P, and numerical checks of the volume computations.
"""
from .constants import PredictionReport, c_eta, predict_CP, vol_ball, vol_minkowski, zeta
from .counter import BallCensus, count_in_ball, count_orbit_in_ball
from .errors import (BudgetExceeded, ConsistencyError, InvalidInput, MissingInvariants,
                     NotFullRank, NotSquarefree, PrecisionError, UnsupportedDegree)
from .lmd import eigen_ideal, orbit_decompose, orbit_invariant, same_orbit
from .polyalg import IntPolynomial, discriminant, is_irreducible, roots, signature
from .quadorder import class_number, fundamental_unit, invariants, orders_containing

__version__ = "0.1.0"
