"""Fractional integrals and derivatives evaluated with SPH on 1D particle domains."""

from fracsph.analytic import (
    adaptive_quad,
    analytic_reference,
    dual_oracle_gate,
    gamma_fn,
    hyp1f2,
    hyp2f1,
    quadrature_oracle,
    upper_incomplete_gamma,
)
from fracsph.domain import AuxiliaryParticles, ParticleDomain1D, auxiliary_particles, build_domain
from fracsph.errors import (
    ConfigError,
    ConstructionError,
    ConvergenceError,
    EvaluationError,
    FracSPHError,
    KernelDomainError,
    OrderRangeError,
    PoleError,
    SingularMomentError,
    UnsupportedError,
)
from fracsph.experiment import ExperimentConfig, load_config, reference_preset, run_experiment, sweep_convergence
from fracsph.fracops import (
    AuxValues,
    Formulation,
    Integration,
    Operator,
    OperatorRequest,
    OrderSpec,
    apply_operator,
    caputo_derivative,
    rl_derivative,
    rl_integral,
)
from fracsph.functions import PRESETS, TestFunction, family, from_expression, preset
from fracsph.kernel import CubicKernel, cumulative_weight
from fracsph.metrics import ErrorReport, error_report
from fracsph.sph import (
    VirtualField,
    Window,
    approximate_function,
    brookshaw_second_derivative,
    corrected_gradient,
    correction_factors,
    integration_weight,
    sample_field,
    sph_integrate_auxiliary,
    sph_integrate_standard,
)

__version__ = "0.1.0"
