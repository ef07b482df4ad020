"""Dense float64 tensors with a replayable reverse-mode tape.

Every operation executed while a :class:`Tape` is active is recorded as a
node holding its operands, its output, a forward rule (for replay) and a
local gradient rule. :func:`backward` walks the tape in reverse and
accumulates gradients additively into the ``grad`` buffer of each
``requires_grad`` leaf; callers zero gradients between optimization steps.

Tensors are plain values and safe to move between threads. A tape together
with the tensors recorded on it forms a single-threaded unit: one
optimization run per thread.

Broadcasting is deliberately narrow: operands must have identical shapes,
or one operand is a scalar, or one operand is a rank-1 per-channel vector
combined with a ``[C, *spatial]`` tensor. Everything else is rejected so
each gradient rule stays auditable.
"""

from __future__ import annotations

import warnings
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, ShapeError, TapeWarning

__all__ = [
    "Tensor",
    "Tape",
    "current_tape",
    "apply_op",
    "tensor",
    "zeros",
    "ones",
    "uniform",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "relu",
    "sigmoid",
    "ln",
    "abs_",
    "sqrt",
    "exp",
    "elementwise",
    "sum_",
    "mean",
    "gap",
    "reduce",
    "fully_connected",
    "matmul",
    "softmax_rows",
    "concat_channels",
    "channel_outer",
    "conv2d",
    "depthwise_conv2d",
    "backward",
    "zero_grads",
]

# Sigmoid outputs are clamped one ulp inside (0, 1) so the open-interval
# contract holds even where exp() underflows.
_SIG_LO = np.nextafter(0.0, 1.0)
_SIG_HI = np.nextafter(1.0, 0.0)

_PAD_MODES = ("zero", "replicate")


class Tensor:
    """N-dimensional float64 array with an optional gradient buffer."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a scalar tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    def copy(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=self.requires_grad)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    # Arithmetic sugar; scalars are promoted to constant tensors.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __abs__(self):
        return abs_(self)


class _Node:
    __slots__ = ("name", "inputs", "output", "forward", "backward")

    def __init__(self, name, inputs, output, forward, backward):
        self.name = name
        self.inputs = inputs
        self.output = output
        self.forward = forward
        self.backward = backward


class Tape:
    """Ordered record of executed operations.

    Nodes appear in execution order, which is automatically topological.
    The tape can be replayed: each node's forward rule is re-run on the
    current data of its operands, reproducing the recorded forward values
    bit-identically when the inputs are unchanged.
    """

    def __init__(self):
        self.nodes: list[_Node] = []

    def __enter__(self) -> "Tape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        popped = _TAPE_STACK.pop()
        assert popped is self, "tape stack corrupted"

    def __len__(self) -> int:
        return len(self.nodes)

    def _record(self, node: _Node) -> None:
        self.nodes.append(node)

    def replay(self) -> None:
        """Re-execute every node in order, refreshing output buffers."""
        for node in self.nodes:
            node.output.data = node.forward(*(t.data for t in node.inputs))


_TAPE_STACK: list[Tape] = []


def current_tape() -> Tape | None:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def apply_op(
    name: str,
    inputs: Sequence[Tensor],
    forward: Callable[..., np.ndarray],
    backward: Callable[[np.ndarray], tuple[np.ndarray | None, ...]],
    out_data: np.ndarray | None = None,
) -> Tensor:
    """Create a tensor from ``forward`` and record the op on the active tape.

    ``forward`` must be a pure function of the operand arrays so the tape can
    be replayed. ``backward`` maps the output gradient to one gradient (or
    None) per input. ``out_data`` lets the caller pass an already computed
    forward value to avoid recomputing it.
    """
    inputs = tuple(inputs)
    if out_data is None:
        out_data = forward(*(t.data for t in inputs))
    out = Tensor(out_data, requires_grad=any(t.requires_grad for t in inputs))
    tape = current_tape()
    if tape is not None:
        tape._record(_Node(name, inputs, out, forward, backward))
    return out


def _as_tensor(x) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=np.float64))


def tensor(data, requires_grad: bool = False) -> Tensor:
    return Tensor(data, requires_grad=requires_grad)


def zeros(shape, requires_grad: bool = False) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=requires_grad)


def ones(shape, requires_grad: bool = False) -> Tensor:
    return Tensor(np.ones(shape), requires_grad=requires_grad)


def uniform(rng: np.random.Generator, shape, lo: float, hi: float,
            requires_grad: bool = False) -> Tensor:
    return Tensor(rng.uniform(lo, hi, size=shape), requires_grad=requires_grad)


# ---------------------------------------------------------------------------
# broadcasting


def _broadcast_plan(sa: tuple[int, ...], sb: tuple[int, ...]):
    """Validate the shape pair and build (viewer, reducer) for each side.

    viewer reshapes an operand array for numpy broadcasting; reducer folds an
    output-shaped gradient back onto the operand's shape.
    """

    def _ident(x):
        return x

    if sa == sb:
        return _ident, _ident, _ident, _ident

    def _scalar_view(x):
        return x

    def _scalar_reduce(g):
        return np.asarray(g.sum())

    if sa == ():
        return _scalar_view, _ident, _scalar_reduce, _ident
    if sb == ():
        return _ident, _scalar_view, _ident, _scalar_reduce

    def _chan_plan(vec_shape, full_shape):
        extra = len(full_shape) - 1
        view_shape = vec_shape + (1,) * extra
        axes = tuple(range(1, len(full_shape)))

        def view(x):
            return x.reshape(view_shape)

        def reduce_(g):
            return g.sum(axis=axes)

        return view, reduce_

    if len(sa) == 1 and len(sb) >= 2 and sa[0] == sb[0]:
        view, red = _chan_plan(sa, sb)
        return view, _ident, red, _ident
    if len(sb) == 1 and len(sa) >= 2 and sb[0] == sa[0]:
        view, red = _chan_plan(sb, sa)
        return _ident, view, _ident, red

    raise ShapeError(
        f"cannot combine shapes {sa} and {sb}: only equal shapes, scalars, "
        "or a per-channel vector against [C, *spatial] are supported"
    )


def _binary(name: str, a, b, fwd, grad_a, grad_b) -> Tensor:
    a = _as_tensor(a)
    b = _as_tensor(b)
    va, vb, ra, rb = _broadcast_plan(a.shape, b.shape)

    def forward(x, y):
        return fwd(va(x), vb(y))

    def backward(g):
        x, y = va(a.data), vb(b.data)
        return ra(grad_a(g, x, y)), rb(grad_b(g, x, y))

    return apply_op(name, (a, b), forward, backward)


def add(a, b) -> Tensor:
    return _binary("add", a, b, np.add,
                   lambda g, x, y: g,
                   lambda g, x, y: g)


def sub(a, b) -> Tensor:
    return _binary("sub", a, b, np.subtract,
                   lambda g, x, y: g,
                   lambda g, x, y: -g)


def mul(a, b) -> Tensor:
    return _binary("mul", a, b, np.multiply,
                   lambda g, x, y: g * y,
                   lambda g, x, y: g * x)


def div(a, b) -> Tensor:
    return _binary("div", a, b, np.divide,
                   lambda g, x, y: g / y,
                   lambda g, x, y: -g * x / (y * y))


def _unary(name: str, a, fwd, grad) -> Tensor:
    a = _as_tensor(a)

    def backward(g):
        return (grad(g, a.data),)

    return apply_op(name, (a,), fwd, backward)


def neg(a) -> Tensor:
    return _unary("neg", a, np.negative, lambda g, x: -g)


def relu(a) -> Tensor:
    return _unary("relu", a,
                  lambda x: np.maximum(x, 0.0),
                  lambda g, x: g * (x > 0.0))


def _sigmoid_fwd(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, _SIG_LO, _SIG_HI)


def sigmoid(a) -> Tensor:
    def grad(g, x):
        s = _sigmoid_fwd(x)
        return g * s * (1.0 - s)

    return _unary("sigmoid", a, _sigmoid_fwd, grad)


def ln(a) -> Tensor:
    a = _as_tensor(a)
    if np.any(a.data <= 0.0):
        raise DomainError("ln requires strictly positive arguments")
    return _unary("ln", a, np.log, lambda g, x: g / x)


def abs_(a) -> Tensor:
    return _unary("abs", a, np.abs, lambda g, x: g * np.sign(x))


def sqrt(a) -> Tensor:
    a = _as_tensor(a)
    if np.any(a.data < 0.0):
        raise DomainError("sqrt requires nonnegative arguments")
    return _unary("sqrt", a, np.sqrt,
                  lambda g, x: g / (2.0 * np.sqrt(x)))


def exp(a) -> Tensor:
    return _unary("exp", a, np.exp, lambda g, x: g * np.exp(x))


_ELEMENTWISE = {
    "add": add,
    "mul": mul,
    "relu": relu,
    "sigmoid": sigmoid,
    "ln": ln,
    "abs": abs_,
}


def elementwise(kind: str, a, b=None) -> Tensor:
    """Dispatch by name; binary kinds require ``b``."""
    try:
        fn = _ELEMENTWISE[kind]
    except KeyError:
        raise ValueError(f"unknown elementwise kind {kind!r}") from None
    if kind in ("add", "mul"):
        if b is None:
            raise ShapeError(f"elementwise {kind!r} needs two operands")
        return fn(a, b)
    if b is not None:
        raise ShapeError(f"elementwise {kind!r} is unary")
    return fn(a)


# ---------------------------------------------------------------------------
# reductions


def sum_(a) -> Tensor:
    a = _as_tensor(a)
    return apply_op(
        "sum", (a,),
        lambda x: np.asarray(x.sum()),
        lambda g: (np.full_like(a.data, float(g)),),
    )


def mean(a) -> Tensor:
    a = _as_tensor(a)
    n = a.size

    def backward(g):
        return (np.full_like(a.data, float(g) / n),)

    return apply_op("mean", (a,), lambda x: np.asarray(x.mean()), backward)


def gap(a) -> Tensor:
    """Global average pool: one spatial mean per channel."""
    a = _as_tensor(a)
    if a.ndim < 3:
        raise ShapeError(f"gap needs rank >= 3 (channels x spatial), got {a.shape}")
    axes = tuple(range(1, a.ndim))
    spatial = int(np.prod(a.shape[1:]))

    def backward(g):
        shape = (a.shape[0],) + (1,) * (a.ndim - 1)
        return (np.broadcast_to(g.reshape(shape) / spatial, a.shape).copy(),)

    return apply_op("gap", (a,), lambda x: x.mean(axis=axes), backward)


_REDUCE = {"sum": sum_, "mean": mean, "gap": gap}


def reduce(kind: str, a) -> Tensor:
    try:
        fn = _REDUCE[kind]
    except KeyError:
        raise ValueError(f"unknown reduce kind {kind!r}") from None
    return fn(a)


# ---------------------------------------------------------------------------
# linear maps


def fully_connected(x, w, b) -> Tensor:
    """y = W x + b for a vector x."""
    x, w, b = _as_tensor(x), _as_tensor(w), _as_tensor(b)
    if x.ndim != 1 or w.ndim != 2 or b.ndim != 1:
        raise ShapeError(
            f"fully_connected expects x[n], W[m,n], b[m]; got {x.shape}, {w.shape}, {b.shape}"
        )
    if w.shape[1] != x.shape[0] or w.shape[0] != b.shape[0]:
        raise ShapeError(
            f"fully_connected shape mismatch: x{x.shape}, W{w.shape}, b{b.shape}"
        )

    def backward(g):
        return (w.data.T @ g, np.outer(g, x.data), g.copy())

    return apply_op(
        "fully_connected", (x, w, b),
        lambda xv, wv, bv: wv @ xv + bv,
        backward,
    )


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul needs [m,k] @ [k,n]; got {a.shape}, {b.shape}")

    def backward(g):
        return (g @ b.data.T, a.data.T @ g)

    return apply_op("matmul", (a, b), np.matmul, backward)


def softmax_rows(a) -> Tensor:
    """Row-wise softmax of a matrix, numerically stabilized."""
    a = _as_tensor(a)
    if a.ndim != 2:
        raise ShapeError(f"softmax_rows needs a matrix, got {a.shape}")

    def forward(x):
        z = x - x.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def backward(g):
        s = forward(a.data)
        return (s * (g - (g * s).sum(axis=1, keepdims=True)),)

    return apply_op("softmax_rows", (a,), forward, backward)


# ---------------------------------------------------------------------------
# channel structure


def concat_channels(parts: Iterable[Tensor]) -> Tensor:
    parts = tuple(_as_tensor(p) for p in parts)
    if not parts:
        raise ShapeError("concat_channels needs at least one part")
    spatial = parts[0].shape[1:]
    for p in parts:
        if p.ndim != 3:
            raise ShapeError(f"concat_channels expects [C,H,W] parts, got {p.shape}")
        if p.shape[1:] != spatial:
            raise ShapeError(
                f"concat_channels spatial mismatch: {p.shape[1:]} vs {spatial}"
            )
    sizes = [p.shape[0] for p in parts]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(
            g[offsets[i]:offsets[i + 1]].copy() for i in range(len(parts))
        )

    return apply_op(
        "concat_channels", parts,
        lambda *xs: np.concatenate(xs, axis=0),
        backward,
    )


def channel_outer(a, b) -> Tensor:
    """Per-pixel outer product of channel vectors.

    out[i*Cb + j, h, w] = a[i, h, w] * b[j, h, w]
    """
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 3 or b.ndim != 3 or a.shape[1:] != b.shape[1:]:
        raise ShapeError(f"channel_outer needs [Ca,H,W] and [Cb,H,W]; got {a.shape}, {b.shape}")
    ca, cb = a.shape[0], b.shape[0]
    h, w = a.shape[1:]

    def forward(x, y):
        return np.einsum("ahw,bhw->abhw", x, y).reshape(ca * cb, h, w)

    def backward(g):
        gr = g.reshape(ca, cb, h, w)
        ga = np.einsum("abhw,bhw->ahw", gr, b.data)
        gb = np.einsum("abhw,ahw->bhw", gr, a.data)
        return ga, gb

    return apply_op("channel_outer", (a, b), forward, backward)


# ---------------------------------------------------------------------------
# convolution


def _pad2d(x: np.ndarray, ph: int, pw: int, mode: str) -> np.ndarray:
    if ph == 0 and pw == 0:
        return x
    width = ((0, 0), (ph, ph), (pw, pw))
    if mode == "zero":
        return np.pad(x, width, mode="constant")
    return np.pad(x, width, mode="edge")


def _unpad_adjoint(gp: np.ndarray, ph: int, pw: int, mode: str) -> np.ndarray:
    """Adjoint of _pad2d: fold gradients of padded cells back onto the image."""
    if ph == 0 and pw == 0:
        return gp
    if mode == "zero":
        return gp[:, ph:gp.shape[1] - ph, pw:gp.shape[2] - pw].copy()
    g = gp.copy()
    if ph:
        g[:, ph, :] += g[:, :ph, :].sum(axis=1)
        g[:, -ph - 1, :] += g[:, -ph:, :].sum(axis=1)
        g = g[:, ph:g.shape[1] - ph, :]
    if pw:
        g[:, :, pw] += g[:, :, :pw].sum(axis=2)
        g[:, :, -pw - 1] += g[:, :, -pw:].sum(axis=2)
        g = g[:, :, pw:g.shape[2] - pw]
    return np.ascontiguousarray(g)


def _check_padding(padding: str) -> None:
    if padding not in _PAD_MODES:
        raise ValueError(f"padding must be one of {_PAD_MODES}, got {padding!r}")


def _windows(xp: np.ndarray, kh: int, kw: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(1, 2))


def conv2d(x, kernel, bias=None, padding: str = "zero") -> Tensor:
    """Same-padded 2D convolution of a [C,H,W] tensor.

    ``kernel`` is either a [Co,Ci,kh,kw] tensor (full convolution across
    channels, offset-indexed: out[o,h,w] = sum k[o,c,dy,dx] x[c,h+dy,w+dx])
    or a fixed-coefficient stencil, which is applied per channel.
    """
    if hasattr(kernel, "coefficients"):
        scale = float(getattr(kernel, "normalization", 1.0))
        return depthwise_conv2d(x, kernel.coefficients, padding=padding, scale=scale)

    _check_padding(padding)
    x, k = _as_tensor(x), _as_tensor(kernel)
    if x.ndim != 3 or k.ndim != 4:
        raise ShapeError(f"conv2d expects x[C,H,W] and kernel[Co,Ci,kh,kw]; got {x.shape}, {k.shape}")
    co, ci, kh, kw = k.shape
    c, hh, ww = x.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"kernel extents must be odd, got {kh}x{kw}")
    if ci != c:
        raise ShapeError(f"kernel expects {ci} input channels, tensor has {c}")
    if bias is not None:
        bias = _as_tensor(bias)
        if bias.shape != (co,):
            raise ShapeError(f"bias must have shape ({co},), got {bias.shape}")
    ph, pw = kh // 2, kw // 2

    def forward(xv, kv, *rest):
        xp = _pad2d(xv, ph, pw, padding)
        out = np.einsum("ockl,chwkl->ohw", kv, _windows(xp, kh, kw))
        if rest:
            out = out + rest[0][:, None, None]
        return out

    def backward(g):
        xp = _pad2d(x.data, ph, pw, padding)
        gxp = np.zeros_like(xp)
        for dy in range(kh):
            for dx in range(kw):
                gxp[:, dy:dy + hh, dx:dx + ww] += np.einsum(
                    "oc,ohw->chw", k.data[:, :, dy, dx], g)
        gx = _unpad_adjoint(gxp, ph, pw, padding)
        gk = np.einsum("ohw,chwkl->ockl", g, _windows(xp, kh, kw))
        if bias is None:
            return gx, gk
        return gx, gk, g.sum(axis=(1, 2))

    inputs = (x, k) if bias is None else (x, k, bias)
    return apply_op("conv2d", inputs, forward, backward)


def depthwise_conv2d(x, coeffs: np.ndarray, padding: str = "replicate",
                     scale: float = 1.0) -> Tensor:
    """Apply one fixed 2D coefficient grid to every channel independently."""
    _check_padding(padding)
    x = _as_tensor(x)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if x.ndim == 2:
        return _squeeze0(depthwise_conv2d(_unsqueeze0(x), coeffs, padding, scale))
    if x.ndim != 3 or coeffs.ndim != 2:
        raise ShapeError(f"depthwise_conv2d expects x[C,H,W] and 2D coeffs; got {x.shape}, {coeffs.shape}")
    kh, kw = coeffs.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"stencil extents must be odd, got {kh}x{kw}")
    c, hh, ww = x.shape
    ph, pw = kh // 2, kw // 2
    weights = coeffs * scale

    def forward(xv):
        xp = _pad2d(xv, ph, pw, padding)
        return np.einsum("kl,chwkl->chw", weights, _windows(xp, kh, kw))

    def backward(g):
        gxp = np.zeros((c, hh + 2 * ph, ww + 2 * pw))
        for dy in range(kh):
            for dx in range(kw):
                if weights[dy, dx] != 0.0:
                    gxp[:, dy:dy + hh, dx:dx + ww] += weights[dy, dx] * g
        return (_unpad_adjoint(gxp, ph, pw, padding),)

    return apply_op("depthwise_conv2d", (x,), forward, backward)


def _unsqueeze0(a: Tensor) -> Tensor:
    def backward(g):
        return (g[0].copy(),)

    return apply_op("unsqueeze0", (a,), lambda x: x[None], backward)


def _squeeze0(a: Tensor) -> Tensor:
    if a.shape[0] != 1:
        raise ShapeError(f"cannot squeeze leading extent {a.shape[0]}")

    def backward(g):
        return (g[None].copy(),)

    return apply_op("squeeze0", (a,), lambda x: x[0], backward)


# ---------------------------------------------------------------------------
# reverse pass


def backward(loss: Tensor, tape: Tape,
             leaves: Sequence[Tensor] | None = None) -> dict[Tensor, np.ndarray]:
    """Accumulate d(loss)/d(leaf) into every requires_grad leaf on the tape.

    Returns a mapping from leaf tensor to its gradient for this call. The
    tape is left intact so it can be replayed or differentiated again. A
    requested leaf that never appears on the tape gets a zero gradient and a
    TapeWarning.
    """
    if loss.size != 1:
        raise ShapeError(f"loss must be scalar, got shape {loss.shape}")

    produced: set[int] = {id(n.output) for n in tape.nodes}
    seen_inputs: set[int] = set()
    default_leaves: list[Tensor] = []
    for node in tape.nodes:
        for t in node.inputs:
            if id(t) in seen_inputs:
                continue
            seen_inputs.add(id(t))
            if t.requires_grad and id(t) not in produced:
                default_leaves.append(t)

    if id(loss) not in produced:
        warnings.warn("loss was not produced on this tape; gradients are zero",
                      TapeWarning, stacklevel=2)

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        g = grads.pop(id(node.output), None)
        if g is None:
            continue
        for t, ig in zip(node.inputs, node.backward(g)):
            if ig is None or not t.requires_grad:
                continue
            key = id(t)
            if key in grads:
                grads[key] = grads[key] + ig
            else:
                grads[key] = np.asarray(ig, dtype=np.float64)

    targets = list(leaves) if leaves is not None else default_leaves
    result: dict[Tensor, np.ndarray] = {}
    for t in targets:
        g = grads.get(id(t))
        if g is None:
            if id(t) not in seen_inputs:
                warnings.warn("requested leaf does not appear on the tape; "
                              "its gradient is zero", TapeWarning, stacklevel=2)
            g = np.zeros_like(t.data)
        g = np.asarray(g, dtype=np.float64).reshape(t.shape)
        t.grad = g.copy() if t.grad is None else t.grad + g
        result[t] = g
    return result


def zero_grads(tensors: Iterable[Tensor]) -> None:
    for t in tensors:
        t.grad = None
