"""kemosim: a numerical laboratory for chemotaxis systems with
signal-dependent motilities.

Subpackages:

- ``motility``: motility pairs (gamma, phi) and the structural algebra
  (condition ratio, quadratic coefficients, comparison functions,
  admissible exponent intervals).
- ``hypothesis``: range audits of the structural conditions, closed-form
  thresholds for algebraic families, uniform exponent selection.
- ``field``: Neumann grids, scalar fields, conservative discrete operators.
- ``stepper``: adaptive explicit time integration with positivity guards
  and blow-up heuristics.
- ``monitors``: tracked functionals and discrete residuals of the two
  evolution relations.
- ``config``/``cli``: TOML-driven experiments (`kemosim audit|run|sweep`).
"""

from .errors import (
    ConfigError,
    DegenerateDiffusionWarning,
    DomainError,
    KemosimError,
    NegativeMotility,
    PositivityLost,
)
from .field import (
    Grid,
    ScalarField,
    State,
    chemotactic_flux_divergence,
    integrate,
    laplacian_neumann,
    lp_norm,
)
from .hypothesis import AuditReport, ExponentChoice, audit, choose_exponents, algebraic_threshold
from .monitors import (
    Monitor,
    MonitorConfig,
    MonitorRecord,
    growth_trend,
    evolution_identity_residual,
    inequality_residual,
    sample,
    trend_bounded,
    weighted_functional,
)
from .motility import (
    AlgebraicKS,
    Constant,
    Custom,
    ModelParams,
    MotilityFamily,
    QInterval,
    Singular,
    coeff_ABC,
    eval_F,
    eval_g,
    eval_gamma,
    eval_phi,
    gamma_comparators,
    phi_bar,
    q_interval,
)
from .stepper import RunOutcome, RunStatus, StepControl, rhs, run, stable_dt, step

__version__ = "0.1.0"
