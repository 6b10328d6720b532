"""Stopping redundancy hierarchy bounds, spectra and greedy constructions."""

from .gf2 import BinaryMatrix, BinaryVector, column_submatrix, rank, row_space_iter, solve_erasure_system
from .codes import EnsembleSpec, LinearCode, golay_extended, load_matrix, save_matrix

__version__ = "0.1.0"

__all__ = ["BinaryMatrix", "BinaryVector", "column_submatrix", "rank", "row_space_iter", "solve_erasure_system",
           "EnsembleSpec", "LinearCode", "golay_extended", "load_matrix", "save_matrix"]
