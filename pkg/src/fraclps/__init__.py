"""fraclps: fractional Littlewood-Paley square functions on periodic grids.

A numerical laboratory for the subordinated Poisson semigroup, fractional
time derivatives of it, the square functions g, S and g*_lambda built from
them (scalar or sequence-space-valued), cotype/type probes on l^r_m value
spaces, and truncated Hilbert transform experiments on the line.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, ConfigError, InputError
from .grid import (
    BanachSpec,
    Field,
    GridSpec,
    Spectrum,
    e0_project,
    forward_transform,
    inverse_transform,
    lp_norm,
)
from .fracderiv import FracOrder, SWQuadrature, frac_derivative_quadrature, frac_derivative_spectral
from .semigroup import (
    SubordinationQuad,
    heat_apply,
    poisson_apply,
    poisson_derivative_integer,
    subordinate_poisson,
)
from .squarefuncs import SquareFunctionReport, area_function, g_function, gstar_function
from .timegrid import TimeGrid, default_time_grid

__all__ = [
    "__version__",
    "AccuracyError",
    "ConfigError",
    "InputError",
    "GridSpec",
    "BanachSpec",
    "Field",
    "Spectrum",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "e0_project",
    "FracOrder",
    "SWQuadrature",
    "frac_derivative_spectral",
    "frac_derivative_quadrature",
    "SubordinationQuad",
    "heat_apply",
    "poisson_apply",
    "subordinate_poisson",
    "poisson_derivative_integer",
    "TimeGrid",
    "default_time_grid",
    "SquareFunctionReport",
    "g_function",
    "area_function",
    "gstar_function",
]
