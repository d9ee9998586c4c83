"""Boolean-function spectra and desk-scale simulation of the quantum
derivative, autocorrelation-sampling and estimation algorithms."""
from .amplify import (EstimateReport, GoodSubspace, GroverOperator, amplitude_estimate,
                      fixed_point_amplify, grover_operator)
from .boolfn import (BooleanFunction, PointList, Spectrum, algebraic_normal_form, autocorrelation_spectrum,
                     degree, derivative, derivative_walsh_spectrum, make_function, sum_of_squares,
                     walsh_spectrum)
from .circuits import (CircuitProgram, build_autocorrelation_sampler, build_deutsch_jozsa, build_hodj,
                       build_swap_test_estimator, gray_code)
from .estimators import (estimate_autocorrelation_classical, estimate_autocorrelation_sq,
                         estimate_autocorrelation_sq_with_zero_guard, estimate_sigma_classical,
                         estimate_sigma_quantum, sample_autocorrelation)
from .simulator import QubitBudgetError, RegisterLayout, StateVector
from .tablefile import TableFormatError, read_table, write_table

__all__ = [
    "BooleanFunction", "CircuitProgram", "EstimateReport", "GoodSubspace", "GroverOperator", "PointList",
    "QubitBudgetError", "RegisterLayout", "Spectrum", "StateVector", "TableFormatError",
    "algebraic_normal_form", "amplitude_estimate", "autocorrelation_spectrum", "build_autocorrelation_sampler",
    "build_deutsch_jozsa", "build_hodj", "build_swap_test_estimator", "degree", "derivative",
    "derivative_walsh_spectrum", "estimate_autocorrelation_classical", "estimate_autocorrelation_sq",
    "estimate_autocorrelation_sq_with_zero_guard", "estimate_sigma_classical", "estimate_sigma_quantum",
    "fixed_point_amplify", "gray_code", "grover_operator", "make_function", "read_table",
    "sample_autocorrelation", "sum_of_squares", "walsh_spectrum", "write_table",
]
__version__ = "0.1.0"
