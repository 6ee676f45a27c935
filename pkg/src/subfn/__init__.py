"""Subordination of operator semigroups by Bernstein functions.

Submodules:

* :mod:`subfn.quadrature`   -- discrete measures and Gauss-Legendre rules
* :mod:`subfn.bernstein`    -- Bernstein functions from Levy triplets
* :mod:`subfn.subordinator` -- stable convolution semigroups and their densities
* :mod:`subfn.semigroup`    -- matrix and heat semigroups on state vectors
* :mod:`subfn.calculus`     -- subordinated semigroups, ``f(A)``, resolvents
* :mod:`subfn.acceptance`   -- oracle-based verification suite
"""
from .bernstein import (AtomicMeasure, LevyTriplet, PowerDensity, ZeroMeasure,
                        check_bernstein_signs, eval_limit_at_zero, evaluate,
                        stable_triplet, triplet_from_json, triplet_to_json,
                        yosida_approximation)
from .calculus import (SubordinatedSemigroup, SubordinationPlan, commutation_check,
                       f_of_A_apply, generator_fd, phillips_check, rescaling_check,
                       resolvent_apply, subordinate_apply)
from .errors import (ConvergenceError, DimensionError, DiscretizationError,
                     DomainError, ParseError, QuadratureFailure, ShapeError,
                     SubfnError)
from .quadrature import (DiscreteMeasure, QuadratureConfig, convolve,
                         integrate_weighted, laplace_transform)
from .semigroup import (ExtensionPolicy, HeatSemigroup, MatrixSemigroup,
                        StateVector, dirichlet_laplacian, periodic_grid, sup_norm)
from .subordinator import (ContourConfig, DriftKilling, KilledStable, Stable,
                           discretize, mass, stable_density_closed_form,
                           stable_density_contour)

__version__ = "0.1.0"
