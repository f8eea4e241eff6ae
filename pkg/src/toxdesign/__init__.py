"""Optimal designs for effective-dose estimation in developmental toxicity studies."""
from .design import (
    Design,
    ExactDesign,
    design_from_csv,
    design_from_dict,
    make_design,
    rescale_design,
    round_design,
    uniform_design,
)
from .effective_dose import (
    Endpoint,
    ed_grad_overall,
    ed_grad_weibull,
    ed_numeric,
    ed_overall,
    ed_overall_numeric,
    ed_weibull,
)
from .errors import (
    CertificationFailed,
    DegenerateDenominator,
    DomainError,
    DoseOutOfRange,
    EmptyDesign,
    NegativeWeight,
    NoRootInInterval,
    NotEstimable,
    ToxDesignError,
)
from .information import Scenario, criterion_value, efficiency, info_matrix
from .local import (
    Certificate,
    LocalOptimum,
    OptimizerConfig,
    check_optimality,
    locally_optimal,
    sensitivity,
    sensitivity_curve,
    two_point_design,
)
from .maximin import MaximinResult, ParamBox, maximin_design, min_efficiency, scenario_grid
from .models import (
    CorrelationSpec,
    DoseResponseModel,
    ImplantSpec,
    ModelKind,
    correlation_at,
    overall_prob,
    prob,
    prob_grad,
)
