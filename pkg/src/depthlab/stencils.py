"""Fixed-coefficient differential operators on depth-like fields.

The operators act per channel with replicate padding, which keeps them free
of fictitious responses at the image boundary. Stencils are offset-indexed:
the coefficient at grid offset (dy, dx) multiplies the sample at
(y + dy, x + dx), so antisymmetric derivative stencils keep their sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .tensor import Tensor, add, depthwise_conv2d

__all__ = ["Stencil", "LAPLACIAN", "THIRD_X", "THIRD_Y", "GRAD_X", "GRAD_Y",
           "apply_stencil", "laplacian", "third_order"]


@dataclass(frozen=True)
class Stencil:
    """Small fixed 2D kernel with an overall normalization factor."""

    coefficients: np.ndarray
    normalization: float = 1.0

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.ndim != 2:
            raise ShapeError(f"stencil coefficients must be 2D, got {coeffs.shape}")
        if coeffs.shape[0] % 2 == 0 or coeffs.shape[1] % 2 == 0:
            raise ShapeError(f"stencil extents must be odd, got {coeffs.shape}")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients.shape

    def coefficient_sum(self) -> float:
        """Zero for any derivative stencil of order >= 1."""
        return float(self.coefficients.sum() * self.normalization)


# 5-point discrete Laplacian.
LAPLACIAN = Stencil(np.array([[0.0, 1.0, 0.0],
                              [1.0, -4.0, 1.0],
                              [0.0, 1.0, 0.0]]))

# Central third derivative, offsets -2..2: f''' ~ (-f[-2] + 2f[-1] - 2f[+1] + f[+2]) / 2.
_THIRD_1D = np.array([-0.5, 1.0, 0.0, -1.0, 0.5])
THIRD_X = Stencil(_THIRD_1D.reshape(1, 5))
THIRD_Y = Stencil(_THIRD_1D.reshape(5, 1))

# Central first derivative, used by the gradient terms of the training losses.
_GRAD_1D = np.array([-0.5, 0.0, 0.5])
GRAD_X = Stencil(_GRAD_1D.reshape(1, 3))
GRAD_Y = Stencil(_GRAD_1D.reshape(3, 1))


def apply_stencil(d: Tensor, stencil: Stencil, padding: str = "replicate") -> Tensor:
    return depthwise_conv2d(d, stencil.coefficients, padding=padding,
                            scale=stencil.normalization)


def _check_spatial(d: Tensor, minimum: int, name: str) -> None:
    if d.ndim not in (2, 3):
        raise ShapeError(f"{name} expects [C,H,W] or [H,W], got {d.shape}")
    h, w = d.shape[-2:]
    if h < minimum or w < minimum:
        raise ShapeError(f"{name} needs spatial extents >= {minimum}, got {h}x{w}")


def laplacian(d: Tensor) -> Tensor:
    """Discrete Laplacian of every channel, replicate padding."""
    _check_spatial(d, 3, "laplacian")
    return apply_stencil(d, LAPLACIAN)


def third_order(d: Tensor) -> Tensor:
    """Sum of the central third derivatives along x and y."""
    _check_spatial(d, 5, "third_order")
    return add(apply_stencil(d, THIRD_X), apply_stencil(d, THIRD_Y))
