"""Quantum Fisher information and measurement precision for weak-field sensing
with an atomic ensemble dispersively coupled to a cavity mode."""

__version__ = "0.1.0"

from .hilbert import DickeSpace, FockSpace, OperatorMatrix
from .model import ModelKind, SystemParams
from .qfi import QfiReport
from .states import DickeLevel, GaussianSpec, MixedStateEigen, OneAxisTwisted, SpinCoherent

__all__ = [
    "DickeSpace",
    "FockSpace",
    "OperatorMatrix",
    "ModelKind",
    "SystemParams",
    "QfiReport",
    "DickeLevel",
    "GaussianSpec",
    "MixedStateEigen",
    "OneAxisTwisted",
    "SpinCoherent",
    "__version__",
]
