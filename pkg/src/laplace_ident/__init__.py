"""Identification of functions from ratios of Laplace transforms of their powers."""

from .dsl import format_function, parse
from .fnmodel import ExpPolyTerm, Piece, PiecewiseExpPoly, term
from .laplace import eval_transform, transform
from .ratio import h_equal, ratio_H

__all__ = ["ExpPolyTerm", "Piece", "PiecewiseExpPoly", "term", "parse", "format_function",
           "transform", "eval_transform", "ratio_H", "h_equal"]
