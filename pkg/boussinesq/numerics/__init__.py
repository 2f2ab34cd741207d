"""
Numerical core: channel grid, operators, elliptic solvers, time stepping,
diagnostics and ODE lemma checkers. No Django models are used here.
"""
