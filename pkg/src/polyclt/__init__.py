"""polyclt: entropy barycenters and limit-theorem diagnostics for
compact polytopes {x >= 0 : Ax = b}.
"""

from .barycenter import (
    Barycenter,
    dual_gradient,
    dual_hessian,
    dual_value,
    entropy_certificate,
    solve_barycenter,
)
from .constraints import (
    ConstraintSystem,
    ValidationReport,
    positivize,
    validate,
)
from .diagnostics import (
    BoxLaw,
    InstanceRecipe,
    KsResult,
    SamplerConfig,
    TableLaw,
    clt_experiment,
    ks_test,
    marginal_experiment,
    moment_report,
    random_instance,
)
from .fourier import (
    CfEvaluation,
    QuadConfig,
    bartlett_cf,
    cumulant_sum,
    gamma_box_probability,
    mixture_box_probability,
    product_cf,
)
from .lp import LpResult, lp_solve
from .samplers import (
    SampleChain,
    dirichlet_exact,
    exp_product,
    hit_and_run,
    kernel_basis,
)
from .standardize import (
    PropertyAPartition,
    StandardizedSystem,
    WeightSpec,
    assumption_report,
    property_a_partition,
    sigma_formula,
    sigma_kernel,
    standardize,
    weight_spec,
)

__version__ = "0.1.0"
