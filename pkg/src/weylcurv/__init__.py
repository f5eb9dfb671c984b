"""Curvature models, the Higa decomposition, and jet-level Weyl realizations."""

from .curvature import (
    CurvatureModel,
    Membership,
    SymmetryReport,
    alt_ricci,
    classify,
    conjugate,
    conjugate_bianchi_residual_closed_form,
    higa_decompose,
    is_einstein_weyl,
    random_in_class,
    residual_antisym12,
    residual_bianchi,
    residual_interchange,
    residual_pair_antisym34,
    residual_weyl,
    ricci,
    ricci_star,
    sigma,
    sym_ricci,
    symmetrize_last,
    symmetry_report,
)
from .errors import ClassError, DegeneracyError, DimensionError, ShapeError, WeylcurvError
from .realization import (
    ConnectionJet,
    GaugeFunction,
    MetricJet,
    OneFormJet,
    RealizationReport,
    WeylJet,
    affine_realize,
    compatibility_residual,
    curvature_at_origin,
    dphi,
    gauge_transform,
    levi_civita_christoffels,
    realize,
    riemann_realize,
    torsion_residual,
    verify_realization,
    weyl_alpha,
    weyl_realize,
)
from .tensor_core import InnerProduct, alternate_pair, contract, symmetrize_pair

__version__ = "0.1.0"
