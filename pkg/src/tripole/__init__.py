"""Exact construction and verification of the tripole-star microstructure."""

from .exactnum import QScalar, t_power, qs_arith, qs_to_float
from .geometry import InterfaceId, RegionId, TilingParams, interface, locate, region_area, region_contains, vertex
from .field import DisplacementField, eval_u, grad_u, origin_value, vertex_value, with_rigid_motion
from .linalg import Mat2, Vec2

__version__ = "0.1.0"

__all__ = [
    "QScalar",
    "t_power",
    "qs_arith",
    "qs_to_float",
    "InterfaceId",
    "RegionId",
    "TilingParams",
    "interface",
    "locate",
    "region_area",
    "region_contains",
    "vertex",
    "DisplacementField",
    "eval_u",
    "grad_u",
    "origin_value",
    "vertex_value",
    "with_rigid_motion",
    "Mat2",
    "Vec2",
]
