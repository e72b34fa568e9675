"""Thermal quantum and total correlations in the transverse-field XY chain."""

__version__ = "0.1.0"

from .measures import MeasureKind  # noqa: E402
from .xymodel import ModelParams  # noqa: E402

__all__ = ["MeasureKind", "ModelParams", "__version__"]
