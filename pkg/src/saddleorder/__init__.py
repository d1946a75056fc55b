"""Exact saddle values of p:-q resonant planar polynomial fields and
constructive witnesses for lower bounds on the maximal saddle order."""

from .exactpoly import BivarPoly, Jet, Rational, coeff, geom_series, poly_add, poly_mul, poly_pow
from .resonance import ResonanceData, RowIndexData, find_p_prime, resonance_data, row_index
from .saddle import (SaddleSystem, rescale_unit, saddle_order, saddle_values_integral,
                     saddle_values_nf)
from .perturb import (PerturbFamily, jet_saddle_values, linear_saddle_coeff, linear_saddle_value,
                      linear_saddle_values)
from .witness import (build_U, build_matrix_A, choose_g, lift_degree, rank_exact, solve_target,
                      synth_theorem1, synth_theorem2, theorem3_certificate, theorem4_certificate)

__version__ = "0.1.0"
