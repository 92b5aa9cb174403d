"""Logarithmic potential theory, orthogonal polynomials and ergodic families.

Submodules:

* :mod:`logpot.setgeom`: finite unions of compact intervals.
* :mod:`logpot.potential`: equilibrium measures, capacity, Green's functions.
* :mod:`logpot.chebfek`: Chebyshev polynomials, Fekete points, bound chains.
* :mod:`logpot.oprl`: Jacobi parameters, zeros and regularity diagnostics.
* :mod:`logpot.opuc`: Szego recursion, zeros and balayage on the circle.
* :mod:`logpot.ergodic`: Lyapunov exponents, density of states, Thouless formula.
"""

from .errors import LogPotError, SolverError, ValidationError
from .potential import capacity, equilibrium
from .setgeom import IntervalUnion, normalize

__version__ = "0.1.0"

__all__ = ["IntervalUnion", "LogPotError", "SolverError", "ValidationError",
           "capacity", "equilibrium", "normalize", "__version__"]
