"""Embeddability of Markov matrices in dimensions 2 to 4."""

from ._membed import (
    MembedError,
    b_quantity,
    classify,
    decide,
    delta_min,
    eq_input_extremal_generators,
    equal_input,
    equal_input_matrix,
    evolve,
    gcheck,
    is_generator,
    is_markov,
    k3st,
    k3st_matrix,
    liouville_det,
    mat_exp,
    peano_baker,
    principal_log,
    star_point,
    tn,
    tn_matrix,
)

__all__ = [
    "MembedError",
    "b_quantity",
    "classify",
    "decide",
    "delta_min",
    "eq_input_extremal_generators",
    "equal_input",
    "equal_input_matrix",
    "evolve",
    "gcheck",
    "is_generator",
    "is_markov",
    "k3st",
    "k3st_matrix",
    "liouville_det",
    "mat_exp",
    "peano_baker",
    "principal_log",
    "star_point",
    "tn",
    "tn_matrix",
]
