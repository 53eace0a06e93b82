"""Average-case solvers for algebra isomorphism, matrix code conjugacy and
4-tensor isomorphism over finite fields, plus an exact random-matrix
statistics engine."""

__version__ = "0.1.0"
