"""Second-order Gaussian curvature at flat points of minimal graphs over the disk."""
from .bounds import (
    FLAT_BOUND,
    GENERAL_BOUND,
    HALL_CONSTANT,
    CurvatureReport,
    build_report,
    kpp_closed_form,
    kpp_numeric,
)
from .graph_jets import SurfaceJet, analytic_jet, kpp_general, numeric_jet
from .hexagon import HexagonModel, build_hexagon
from .special_functions import PowerSeries, hyp2f1
from .weierstrass import WeierstrassData, curvature, surface_point

__version__ = "0.1.0"

__all__ = [
    "FLAT_BOUND",
    "GENERAL_BOUND",
    "HALL_CONSTANT",
    "CurvatureReport",
    "HexagonModel",
    "PowerSeries",
    "SurfaceJet",
    "WeierstrassData",
    "analytic_jet",
    "build_hexagon",
    "build_report",
    "curvature",
    "hyp2f1",
    "kpp_closed_form",
    "kpp_general",
    "kpp_numeric",
    "numeric_jet",
    "surface_point",
]
