"""Numerical quaternionic function theory over theta-structural frames."""

from .quaternion import (
    EXP_ARG_BOUND,
    Quaternion,
    ThetaFrame,
    ThetaPoint,
    WeightOverflowError,
    exp_weight,
    theta_pairing,
)

__all__ = [
    "EXP_ARG_BOUND",
    "Quaternion",
    "ThetaFrame",
    "ThetaPoint",
    "WeightOverflowError",
    "exp_weight",
    "theta_pairing",
]

__version__ = "0.1.0"
