"""Numerical verification of the Kaehler-type structure on the knot space of
flat R^7 with its standard G2 structure: exterior algebra, the vector cross
product, spectral loop calculus, knot-space forms, sphere-bundle lifts,
instanton conditions, and orchestrated verification suites.
"""

from .algebra import (G2Structure, Octonion, Su3VolumeForm, cross, cross_field,
                      complex_structure_apply, hermitian_trace_vector,
                      is_associative, lie_action_on_rho, metric_from_three_form,
                      octonion_mul, skew_endomorphism, standard_g2,
                      standard_phi, su3_volume_form, two_form_decompose,
                      two_form_operator_matrix)
from .errors import (ConfigError, DegenerateForm, DegenerateSpan, G2KnotError,
                     ImmersionViolation, NonUnitAxis, StepOutOfRange,
                     ZeroCurvature)
from .forms import AltForm, basis_form, contract, hodge_star, wedge
from .instanton import (CurvatureSample, is_g2_instanton,
                        lifted_curvature_type_residual)
from .knots import (KnotChart, acs_apply, chart_bracket, d_omega, d_omega_fd,
                    hermitian_metric, nijenhuis, omega)
from .loops import (FourierLoopSpec, Loop7, arclength_params, circle_loop,
                    integrate, loop_from_fourier, loop_from_json, loop_to_json,
                    normal_project, resample_field, spectral_derivative,
                    trig_interpolate, unit_speed_reparam)
from .twistor import (LKnotLift, SplitTangent, cartan_check, covariant_split,
                      d_omega3_vs_xi, lift_tangent, lift_tangent_fd,
                      lknot_lift, omega3_eval, xi_eval, xi_tilde)
from .verify import (SuiteReport, VerifyConfig, random_loop,
                     random_normal_field, run_suites, suite_associative,
                     suite_instanton, suite_kahler, suite_twistor)

__version__ = "0.1.0"
