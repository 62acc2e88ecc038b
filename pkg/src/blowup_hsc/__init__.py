"""Curvature of mu^*h + t b at the exceptional divisor of a point blowup.

A finite-difference Kähler curvature engine checked against exact formulas.
"""

from .closed_forms import (
    BlowupParams,
    curvature_closed_form,
    hsc_closed_form,
    negativity_threshold,
    p_critical,
    p_poly,
    ricci_closed_form,
    scalar_closed_form,
    sigma_closed_form,
)
from .engine import (
    CurvatureResult,
    DiffScheme,
    chern_curvature,
    gauss_check,
    hsc_numeric,
    ricci_numeric,
    scalar_numeric,
    second_fundamental_form_numeric,
)
from .metrics import base_metric, blowup_metric, chart_embedding, fubini_study, tau
from .tensors import check_kahler_symmetries, contract_4, hermitian_inverse

__version__ = "0.1.0"
