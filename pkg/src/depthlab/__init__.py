"""Desk-scale toolkit for depth-gradient feature refinement, optimal-transport
depth losses, and sparse-pixel mask analysis, built on a small replayable
reverse-mode tape so every gradient can be audited against finite differences.
"""

from .errors import (
    ConvergenceWarning,
    DivergenceError,
    DomainError,
    FormatError,
    GuardError,
    ShapeError,
    TapeWarning,
)
from .tensor import Tape, Tensor, backward, tensor

__all__ = [
    "Tape",
    "Tensor",
    "backward",
    "tensor",
    "ShapeError",
    "DomainError",
    "FormatError",
    "GuardError",
    "DivergenceError",
    "ConvergenceWarning",
    "TapeWarning",
]

__version__ = "0.1.0"
