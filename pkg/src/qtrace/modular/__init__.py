"""Vector sequences of functions, the SL2(Z) action on them and the operators O_j, D_j."""

from .checks import covariance_check, default_samples, group_law_check, identity_action_check, normalize_samples
from .systems import (Coefficient, DiffSystem, InvalidSystem, candidate_for, coefficient_precheck,
                      first_order_solution, first_order_system, residual, solution_invariance_check,
                      two_log_eta, two_log_eta_oracle)
from .families import FAMILIES, build_family, g4_family, smooth_family, wp2_family
from .vectorseq import (DEFAULT_STENCIL, ModularOperator, Stencil, VectorSeq, apply_action, apply_D,
                        apply_D_product, apply_O, g2_times, shift, shift_sum)

__all__ = [
    "Coefficient", "DEFAULT_STENCIL", "FAMILIES", "build_family", "g4_family", "smooth_family", "wp2_family", "DiffSystem", "InvalidSystem", "ModularOperator", "Stencil",
    "VectorSeq", "apply_D", "apply_D_product", "apply_O", "apply_action", "candidate_for",
    "coefficient_precheck", "covariance_check", "default_samples", "first_order_solution",
    "first_order_system", "g2_times", "group_law_check", "identity_action_check", "normalize_samples",
    "residual", "shift", "shift_sum", "solution_invariance_check", "two_log_eta", "two_log_eta_oracle",
]
