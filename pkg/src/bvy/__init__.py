"""Numerical toolkit for level-set recovery of gradient norms.

Evaluates the generalized Brezis--Van Schaftingen--Yung level-set
functional on eight concrete ball Banach function spaces, verifies the
two-sided gradient-norm equivalences and the exact limiting constants
at desk scale, and checks fractional Gagliardo--Nirenberg interpolation
inequalities.

Module map
----------
``testbench``    smooth test fields with exact gradients and metadata
``geometry``     kernel constants, sphere quadrature, ray scans, dyadic cubes
``spaces``       sampled fields and the eight space norms, convexification
``weights``      Muckenhoupt machinery and maximal-operator constructions
``hypotheses``   decision tables: when each guarantee is theorem-backed
``core``         level-set evaluator, supremum and limit drivers
``inequalities`` interpolation inequality drivers and the double-integral
                 seminorm
``harness``      experiment suites from TOML configs, reports, serialization
``cli``          the ``bvy`` command-line entry point
"""

from bvy.core import (
    FunctionalParams,
    LambdaSchedule,
    LevelSetEvaluator,
    LimitEstimate,
    QuadratureSpec,
    SupResult,
    bvy_functional,
    bvy_limit,
    bvy_sup,
    equivalence_target,
    nu_gamma,
    stopping_time_partition,
    stopping_time_residuals,
)
from bvy.geometry import (
    DirectionSet,
    DyadicCube,
    RayIntervals,
    cube_for_ball,
    kappa,
    radial_kernel_integral,
    ray_transitions,
    sphere_quadrature,
    unit_ball_volume,
    unit_sphere_area,
)
from bvy.inequalities import (
    GagliardoResult,
    GNType1Result,
    GNType2Result,
    gagliardo_seminorm,
    gn_type1,
    gn_type1_exponent,
    gn_type2,
    gn_type2_exponents,
)
from bvy.hypotheses import (
    HypothesisReport,
    gn_type1_hypotheses,
    gn_type2_hypotheses,
    lower_limit_hypotheses,
    space_index,
    sup_equivalence_hypotheses,
    upper_limit_hypotheses,
)
from bvy.spaces import (
    OrliczFunction,
    SampledField,
    SpaceSpec,
    VariableExponent,
    convexify,
    exponent_from_name,
    lebesgue,
    lorentz,
    mixed_lebesgue,
    morrey,
    norm,
    orlicz_from_name,
    orlicz_slice,
    orlicz_space,
    sample_function,
    tensor_grid,
    variable_lebesgue,
    weighted_lebesgue,
)
from bvy.testbench import (
    ScalarField,
    dilate,
    make_bump,
    make_smooth_step,
    make_tensor_bump,
    scale,
)
from bvy.weights import (
    MajorantResult,
    Weight,
    a_p_constant,
    majorant_series,
    maximal_norm_bound_1d,
    maximal_sampled,
    power_weight_in_ap,
    weight_from_name,
)

__all__ = [
    # testbench
    "ScalarField", "make_bump", "make_smooth_step", "make_tensor_bump", "dilate", "scale",
    # geometry
    "DirectionSet", "RayIntervals", "DyadicCube", "kappa", "sphere_quadrature",
    "ray_transitions", "radial_kernel_integral", "cube_for_ball",
    "unit_sphere_area", "unit_ball_volume",
    # spaces
    "SampledField", "SpaceSpec", "OrliczFunction", "VariableExponent",
    "tensor_grid", "sample_function", "norm", "convexify",
    "lebesgue", "weighted_lebesgue", "lorentz", "orlicz_space", "mixed_lebesgue",
    "variable_lebesgue", "morrey", "orlicz_slice",
    "orlicz_from_name", "exponent_from_name",
    # weights
    "Weight", "weight_from_name", "power_weight_in_ap", "a_p_constant",
    "maximal_sampled", "maximal_norm_bound_1d", "majorant_series", "MajorantResult",
    # hypotheses
    "HypothesisReport", "space_index", "sup_equivalence_hypotheses",
    "upper_limit_hypotheses", "lower_limit_hypotheses",
    "gn_type1_hypotheses", "gn_type2_hypotheses",
    # core
    "FunctionalParams", "LambdaSchedule", "QuadratureSpec", "LevelSetEvaluator",
    "SupResult", "LimitEstimate", "bvy_functional", "bvy_sup", "bvy_limit",
    "nu_gamma", "equivalence_target",
    "stopping_time_partition", "stopping_time_residuals",
    # inequalities
    "GNType1Result", "GNType2Result", "GagliardoResult",
    "gn_type1", "gn_type2", "gn_type1_exponent", "gn_type2_exponents",
    "gagliardo_seminorm",
]

__version__ = "0.1.0"
