"""Depth gradient refinement block.

The block lifts a [C,H,W] feature map to [3C,H,W] by concatenating the map
with its Laplacian and summed third derivatives, recalibrates channels with
gates squashed to (0,1), applies a learned 3x3 spatial convolution, and
condenses a low-rank per-pixel bilinear interaction of the spatial and
merged features back to C channels, so it can slot after any encoder stage
without adapters.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fileio
from .errors import ShapeError
from .stencils import laplacian, third_order
from .tensor import (
    Tensor,
    add,
    apply_op,
    concat_channels,
    channel_outer,
    conv2d,
    fully_connected,
    gap,
    mul,
    relu,
    sigmoid,
    uniform,
)

__all__ = ["DgrConfig", "DgrParams", "merge", "channel_weights",
           "spatial_refine", "interact", "dgr_forward"]


@dataclass(frozen=True)
class DgrConfig:
    channels_in: int
    reduction_ratio: int = 3
    interaction_rank: int | None = None  # defaults to channels_in
    residual: bool = False

    def __post_init__(self):
        c = self.channels_in
        if c < 1:
            raise ValueError(f"channels_in must be positive, got {c}")
        if self.reduction_ratio < 1 or (3 * c) % self.reduction_ratio != 0:
            raise ValueError(
                f"reduction_ratio {self.reduction_ratio} must divide 3*C = {3 * c}")
        if self.interaction_rank is None:
            object.__setattr__(self, "interaction_rank", c)
        rho = self.interaction_rank
        if rho < 1 or rho > 3 * c:
            raise ValueError(f"interaction_rank must be in [1, {3 * c}], got {rho}")

    @property
    def merged_channels(self) -> int:
        return 3 * self.channels_in

    @property
    def hidden(self) -> int:
        return self.merged_channels // self.reduction_ratio


_FIELDS = ("fc1_w", "fc1_b", "fc2_w", "fc2_b", "spatial_w", "spatial_b",
           "proj_a", "proj_b", "reduce_w", "reduce_b")


@dataclass
class DgrParams:
    """Learnable parameters of one refinement block."""

    config: DgrConfig
    fc1_w: Tensor
    fc1_b: Tensor
    fc2_w: Tensor
    fc2_b: Tensor
    spatial_w: Tensor   # [3C, 3C, 3, 3]
    spatial_b: Tensor
    proj_a: Tensor      # [rho, 3C] 1x1 projection of the spatial branch
    proj_b: Tensor      # [rho, 3C] 1x1 projection of the merged branch
    reduce_w: Tensor    # [C, rho^2] 1x1 reduction of the flattened outer product
    reduce_b: Tensor

    @classmethod
    def initialize(cls, config: DgrConfig, rng: np.random.Generator) -> "DgrParams":
        """Fan-in scaled uniform weights, zero biases (channel gates start at 0.5)."""
        m, c, rho = config.merged_channels, config.channels_in, config.interaction_rank

        def w(shape, fan_in):
            bound = 1.0 / np.sqrt(fan_in)
            return uniform(rng, shape, -bound, bound, requires_grad=True)

        def zeros(shape):
            return Tensor(np.zeros(shape), requires_grad=True)

        return cls(
            config=config,
            fc1_w=w((config.hidden, m), m),
            fc1_b=zeros(config.hidden),
            fc2_w=w((m, config.hidden), config.hidden),
            fc2_b=zeros(m),
            spatial_w=w((m, m, 3, 3), m * 9),
            spatial_b=zeros(m),
            proj_a=w((rho, m), m),
            proj_b=w((rho, m), m),
            reduce_w=w((c, rho * rho), rho * rho),
            reduce_b=zeros(c),
        )

    @classmethod
    def zeros(cls, config: DgrConfig) -> "DgrParams":
        m, c, rho = config.merged_channels, config.channels_in, config.interaction_rank
        t = lambda shape: Tensor(np.zeros(shape), requires_grad=True)
        return cls(config, t((config.hidden, m)), t(config.hidden),
                   t((m, config.hidden)), t(m), t((m, m, 3, 3)), t(m),
                   t((rho, m)), t((rho, m)), t((c, rho * rho)), t(c))

    def tensors(self) -> dict[str, Tensor]:
        return {name: getattr(self, name) for name in _FIELDS}

    def parameters(self) -> list[Tensor]:
        return [getattr(self, name) for name in _FIELDS]

    def save(self, path: str | Path) -> None:
        meta = {
            "channels_in": self.config.channels_in,
            "reduction_ratio": self.config.reduction_ratio,
            "interaction_rank": self.config.interaction_rank,
            "residual": self.config.residual,
        }
        fileio.save_tensor_dir(path, self.tensors(), meta=meta)

    @classmethod
    def load(cls, path: str | Path) -> "DgrParams":
        tensors, meta = fileio.load_tensor_dir(path)
        config = DgrConfig(
            channels_in=int(meta["channels_in"]),
            reduction_ratio=int(meta["reduction_ratio"]),
            interaction_rank=int(meta["interaction_rank"]),
            residual=bool(meta["residual"]),
        )
        missing = set(_FIELDS) - set(tensors)
        if missing:
            raise ShapeError(f"parameter directory lacks tensors: {sorted(missing)}")
        for t in tensors.values():
            t.requires_grad = True
        return cls(config, **{name: tensors[name] for name in _FIELDS})


def _check_input(f: Tensor, config: DgrConfig) -> None:
    if f.ndim != 3:
        raise ShapeError(f"expected [C,H,W] features, got {f.shape}")
    if f.shape[0] != config.channels_in:
        raise ShapeError(
            f"feature channels {f.shape[0]} do not match config C={config.channels_in}")
    if f.shape[1] < 5 or f.shape[2] < 5:
        raise ShapeError(f"spatial extents must be >= 5, got {f.shape[1:]}")


def merge(f: Tensor) -> Tensor:
    """[F || Laplacian(F) || third-order(F)] along channels."""
    if f.ndim != 3:
        raise ShapeError(f"expected [C,H,W] features, got {f.shape}")
    if f.shape[1] < 5 or f.shape[2] < 5:
        raise ShapeError(f"spatial extents must be >= 5, got {f.shape[1:]}")
    return concat_channels([f, laplacian(f), third_order(f)])


def channel_weights(f_merged: Tensor, params: DgrParams) -> Tensor:
    """Per-channel gates in (0,1) from globally pooled statistics."""
    pooled = gap(f_merged)
    hidden = relu(fully_connected(pooled, params.fc1_w, params.fc1_b))
    return sigmoid(fully_connected(hidden, params.fc2_w, params.fc2_b))


def spatial_refine(f_merged: Tensor, w_c: Tensor, params: DgrParams) -> Tensor:
    gated = relu(mul(f_merged, w_c))
    return conv2d(gated, params.spatial_w, params.spatial_b, padding="zero")


def _conv1x1(f: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    # Reuses conv2d with the [Co,Ci] weight viewed as a [Co,Ci,1,1] kernel.
    co, ci = weight.shape
    kernel = apply_op(
        "view_1x1", (weight,),
        lambda wv: wv.reshape(co, ci, 1, 1),
        lambda g: (g.reshape(co, ci),),
    )
    return conv2d(f, kernel, bias, padding="zero")


def interact(f_spatial: Tensor, f_merged: Tensor, params: DgrParams) -> Tensor:
    """Low-rank per-pixel bilinear interaction reduced to C channels."""
    if f_spatial.shape != f_merged.shape:
        raise ShapeError(
            f"interact needs identical shapes, got {f_spatial.shape} vs {f_merged.shape}")
    a = _conv1x1(f_spatial, params.proj_a)
    b = _conv1x1(f_merged, params.proj_b)
    outer = channel_outer(a, b)
    return _conv1x1(outer, params.reduce_w, params.reduce_b)


def dgr_forward(f: Tensor, params: DgrParams) -> Tensor:
    """Full block; output shape equals input shape."""
    _check_input(f, params.config)
    merged = merge(f)
    w_c = channel_weights(merged, params)
    refined = spatial_refine(merged, w_c, params)
    out = interact(refined, merged, params)
    if params.config.residual:
        out = add(out, f)
    return out
