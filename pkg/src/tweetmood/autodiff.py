"""Minimal reverse-mode automatic differentiation over numpy arrays.

A :class:`Tensor` wraps a float64 ndarray. Operations record their inputs
and a backward rule on the output tensor; calling ``backward()`` on a
scalar result walks the implicit DAG once in reverse topological order and
accumulates gradients into every tensor created with ``requires_grad=True``.

All computation is done in double precision. The engine is meant for
desk-scale experiments: correctness and reproducibility over speed.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


class Tensor:
    """An n-dimensional float64 array participating in differentiation.

    ``data`` is always a C-contiguous float64 ndarray. ``grad`` is ``None``
    until a backward pass deposits a gradient of the same shape.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor values must be finite")
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple = ()
        self._backward: Callable | None = None

    # -- introspection -------------------------------------------------

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # -- graph machinery -----------------------------------------------

    def backward(self) -> None:
        """Backpropagate from a scalar output.

        Visits every reachable node exactly once (iterative topological
        order; recursion would overflow on long recurrent chains).
        """
        if self.data.size != 1:
            raise ValueError(f"backward() requires a scalar, got shape {self.shape}")
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in visited:
                    stack.append((p, False))

        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is None:
                continue
            grads = node._backward(node.grad)
            for parent, g in zip(node._parents, grads):
                if g is None or not parent.requires_grad:
                    continue
                if parent.grad is None:
                    parent.grad = np.array(g, dtype=np.float64)
                else:
                    parent.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    # -- operators -------------------------------------------------------

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

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return getitem(self, idx)

    def sum(self, axis=None, keepdims: bool = False):
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        return tensor_mean(self, axis=axis, keepdims=keepdims)

    def max(self, axis: int):
        return tensor_max(self, axis=axis)

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) > 1 else shape[0])


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data: np.ndarray, parents: Sequence[Tensor], backward: Callable) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient back down to the shape it was broadcast from."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for i, dim in enumerate(shape):
        if dim == 1 and g.shape[i] != 1:
            g = g.sum(axis=i, keepdims=True)
    return g.reshape(shape)


# -- arithmetic ----------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data * b.data,
        (a, b),
        lambda g: (
            _unbroadcast(g * b.data, a.shape),
            _unbroadcast(g * a.data, b.shape),
        ),
    )


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return _node(
        a.data / b.data,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape),
        ),
    )


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _node(-a.data, (a,), lambda g: (-g,))


def matmul(a, b) -> Tensor:
    """Matrix product ``a @ b`` with ``a`` of shape (..., m, k) and ``b`` (k, n)."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
    out = a.data @ b.data

    def backward(g):
        ga = g @ b.data.T
        k, n = b.shape
        gb = a.data.reshape(-1, k).T @ g.reshape(-1, n)
        return ga, gb

    return _node(out, (a, b), backward)


# -- elementwise nonlinearities -------------------------------------------


def tanh(x) -> Tensor:
    x = as_tensor(x)
    y = np.tanh(x.data)
    return _node(y, (x,), lambda g: (g * (1.0 - y * y),))


def sigmoid(x) -> Tensor:
    x = as_tensor(x)
    # Split by sign to avoid overflow in exp for large |x|.
    d = x.data
    y = np.where(d >= 0, 1.0 / (1.0 + np.exp(-np.abs(d))), np.exp(-np.abs(d)) / (1.0 + np.exp(-np.abs(d))))
    return _node(y, (x,), lambda g: (g * y * (1.0 - y),))


def exp(x) -> Tensor:
    x = as_tensor(x)
    y = np.exp(x.data)
    return _node(y, (x,), lambda g: (g * y,))


def log(x) -> Tensor:
    x = as_tensor(x)
    return _node(np.log(x.data), (x,), lambda g: (g / x.data,))


def softmax(x, axis: int = -1) -> Tensor:
    """Softmax along ``axis``; stabilized by max subtraction."""
    x = as_tensor(x)
    shifted = x.data - np.max(x.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        inner = (g * y).sum(axis=axis, keepdims=True)
        return (y * (g - inner),)

    return _node(y, (x,), backward)


# -- reductions and shape ops ----------------------------------------------


def tensor_sum(x, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    y = x.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, x.shape).copy(),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, x.shape).copy(),)

    return _node(y, (x,), backward)


def tensor_mean(x, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    n = x.size if axis is None else x.shape[axis]
    return mul(tensor_sum(x, axis=axis, keepdims=keepdims), 1.0 / n)


def tensor_max(x, axis: int) -> Tensor:
    """Max along ``axis``. Ties route the gradient to the lowest index."""
    x = as_tensor(x)
    idx = np.argmax(x.data, axis=axis)  # argmax takes the first maximum
    y = np.take_along_axis(x.data, np.expand_dims(idx, axis), axis=axis).squeeze(axis)

    def backward(g):
        gx = np.zeros_like(x.data)
        np.put_along_axis(
            gx, np.expand_dims(idx, axis), np.expand_dims(g, axis), axis=axis
        )
        return (gx,)

    return _node(y, (x,), backward)


def reshape(x, shape) -> Tensor:
    x = as_tensor(x)
    orig = x.shape
    return _node(x.data.reshape(shape), (x,), lambda g: (g.reshape(orig),))


def getitem(x, idx) -> Tensor:
    x = as_tensor(x)

    def backward(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, idx, g)
        return (gx,)

    return _node(x.data[idx], (x,), backward)


def concat(tensors: Sequence, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    data = np.concatenate([t.data for t in tensors], axis=axis)
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return _node(data, tensors, backward)


def stack(tensors: Sequence, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    data = np.stack([t.data for t in tensors], axis=axis)

    def backward(g):
        return tuple(np.moveaxis(g, axis, 0))

    return _node(data, tensors, backward)


def sliding_windows(x, width: int) -> Tensor:
    """Unfold (B, T, D) into (B, T-width+1, width*D) overlapping windows.

    This is the im2col step of a valid 1-D convolution over the time axis;
    follow it with a matmul against a (width*D, channels) filter bank.
    """
    x = as_tensor(x)
    if x.ndim != 3:
        raise ValueError(f"sliding_windows expects (B, T, D), got {x.shape}")
    b, t, d = x.shape
    if width < 1 or width > t:
        raise ValueError(f"window width {width} invalid for sequence length {t}")
    length = t - width + 1
    data = np.empty((b, length, width * d))
    for i in range(width):
        data[:, :, i * d : (i + 1) * d] = x.data[:, i : i + length, :]

    def backward(g):
        gx = np.zeros_like(x.data)
        for i in range(width):
            gx[:, i : i + length, :] += g[:, :, i * d : (i + 1) * d]
        return (gx,)

    return _node(data, (x,), backward)


def embedding_lookup(table: Tensor, ids, trainable: bool = True) -> Tensor:
    """Gather rows of ``table`` by integer ``ids``.

    Row 0 is the padding row: id 0 always yields the zero vector and never
    receives gradient. With ``trainable=False`` the table is treated as a
    constant and accumulates no gradient at all.
    """
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ValueError(
            f"embedding id out of range [0, {table.shape[0]}): "
            f"min={ids.min()}, max={ids.max()}"
        )
    mask = (ids != 0).astype(np.float64)[..., None]
    data = table.data[ids] * mask
    if not trainable or not table.requires_grad:
        return Tensor(data)

    def backward(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids, g * mask)
        return (gt,)

    return _node(data, (table,), backward)


# -- gradient checking -------------------------------------------------------


def grad_check(
    f: Callable[[], Tensor],
    params: Sequence[Tensor],
    delta: float = 1e-4,
    max_coords: int = 64,
    seed: int = 0,
) -> float:
    """Compare recorded backward against central finite differences.

    ``f`` rebuilds its graph on every call and returns a scalar Tensor.
    Returns the max relative error over sampled coordinates of ``params``.
    Coordinates where both gradients are below 1e-8 count as exact; points
    of non-differentiability (e.g. max-pool ties) are the caller's job to
    avoid.
    """
    rng = np.random.default_rng(seed)
    for p in params:
        p.zero_grad()
    out = f()
    out.backward()
    analytic = [
        np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params
    ]

    worst = 0.0
    for p, ana in zip(params, analytic):
        flat = p.data.reshape(-1)
        n = flat.size
        coords = (
            np.arange(n) if n <= max_coords else rng.choice(n, max_coords, replace=False)
        )
        for c in coords:
            keep = flat[c]
            flat[c] = keep + delta
            hi = float(f().data)
            flat[c] = keep - delta
            lo = float(f().data)
            flat[c] = keep
            num = (hi - lo) / (2.0 * delta)
            a = ana.reshape(-1)[c]
            scale = max(abs(a), abs(num))
            if scale < 1e-8:
                continue
            worst = max(worst, abs(a - num) / scale)
    return worst


def zero_grads(params: Sequence[Tensor]) -> None:
    for p in params:
        p.zero_grad()
