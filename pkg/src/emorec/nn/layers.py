"""Layer forward/backward kernels: Conv1D, MaxPool1D, Dropout, Flatten,
Dense, LSTM, and the softmax cross-entropy head.

Everything runs in float64 and is written batched: inputs carry a leading
batch axis, but the functional ops also accept single instances. Analytic
gradients for every layer are gated by central finite-difference checks in
the test suite.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputTooShort, ShapeMismatch
from ..rng import bulk_uniform, derive_seed

# When enabled (nn.set_debug), every layer output is checked for NaN/inf.
debug_nan_checks = False


def _check_finite(name: str, arr: np.ndarray) -> None:
    if debug_nan_checks and not np.all(np.isfinite(arr)):
        raise FloatingPointError(f"non-finite values in {name}")


def _batched(x: np.ndarray, dims: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == dims:
        return x[None], True
    if x.ndim == dims + 1:
        return x, False
    raise ShapeMismatch(f"expected {dims}- or {dims + 1}-dim input, got {x.ndim}")


def relu(v: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, v)


def _activate(v: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return relu(v)
    if activation == "linear":
        return v
    raise ValueError(f"unknown activation {activation!r}")


def _pad_same(x: np.ndarray, k: int) -> np.ndarray:
    left = (k - 1) // 2
    return np.pad(x, ((0, 0), (left, k - 1 - left), (0, 0)))


def conv1d_forward(x, kernel, bias, padding: str = "same") -> np.ndarray:
    """Sliding dot product along the length axis.

    x: (L, C_in) or (B, L, C_in); kernel: (K, C_in, C_out); bias: (C_out,).
    'same' keeps L; 'valid' yields L - K + 1.
    """
    x, single = _batched(x, 2)
    kernel = np.asarray(kernel, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    k, c_in, c_out = kernel.shape
    if x.shape[2] != c_in:
        raise ShapeMismatch(f"input has {x.shape[2]} channels, kernel wants {c_in}")
    if padding == "same":
        xp = _pad_same(x, k)
        out_len = x.shape[1]
    elif padding == "valid":
        if k > x.shape[1]:
            raise ShapeMismatch(f"kernel {k} exceeds input length {x.shape[1]}")
        xp = x
        out_len = x.shape[1] - k + 1
    else:
        raise ValueError(f"unknown padding {padding!r}")
    y = np.tile(bias, (x.shape[0], out_len, 1))
    for t in range(k):
        y += xp[:, t : t + out_len, :] @ kernel[t]
    return y[0] if single else y


def maxpool1d_forward(x, pool: int, stride: int) -> tuple[np.ndarray, np.ndarray]:
    """Window maxima plus the absolute argmax index per output (for backprop).

    x: (L, C) or (B, L, C) -> (L', C) with L' = floor((L - pool)/stride) + 1.
    """
    x, single = _batched(x, 2)
    length = x.shape[1]
    if length < pool:
        raise InputTooShort(f"pooling window {pool} exceeds input length {length}")
    starts = stride * np.arange((length - pool) // stride + 1)
    win = x[:, starts[:, None] + np.arange(pool)[None, :], :]  # (B, L', pool, C)
    arg = np.argmax(win, axis=2)
    y = np.take_along_axis(win, arg[:, :, None, :], axis=2)[:, :, 0, :]
    abs_idx = starts[None, :, None] + arg
    return (y[0], abs_idx[0]) if single else (y, abs_idx)


def dense_forward(x, weights, bias, activation: str = "linear") -> np.ndarray:
    """activation(x @ W + b); x: (D,) or (B, D)."""
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if x.shape[-1] != weights.shape[0]:
        raise ShapeMismatch(f"input width {x.shape[-1]} != weight rows {weights.shape[0]}")
    return _activate(x @ weights + np.asarray(bias, dtype=np.float64), activation)


def dropout(x, rate: float, mode: str = "train", seed: int = 0) -> np.ndarray:
    """Inverted dropout: training zeroes with probability `rate` and scales
    survivors by 1/(1-rate); eval is the identity."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must lie in [0, 1)")
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown dropout mode {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    if mode == "eval" or rate == 0.0:
        return x.copy()
    mask = (bulk_uniform(seed, x.size) >= rate).reshape(x.shape)
    return x * mask / (1.0 - rate)


def _sigmoid(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def lstm_forward(x, params: dict) -> np.ndarray:
    """Final hidden state of a standard LSTM over x: (T, D) or (B, T, D).

    params: W (D, 4U) input weights, R (U, 4U) recurrent weights, b (4U,);
    gate order along the 4U axis is [input, forget, cell, output].
    """
    x, single = _batched(x, 2)
    w, r, b = (np.asarray(params[k], dtype=np.float64) for k in ("W", "R", "b"))
    units = r.shape[0]
    if x.shape[2] != w.shape[0] or w.shape[1] != 4 * units or b.shape[0] != 4 * units:
        raise ShapeMismatch("LSTM parameter shapes do not chain with the input")
    h = np.zeros((x.shape[0], units))
    c = np.zeros((x.shape[0], units))
    for t in range(x.shape[1]):
        z = x[:, t, :] @ w + h @ r + b
        i = _sigmoid(z[:, :units])
        f = _sigmoid(z[:, units : 2 * units])
        g = np.tanh(z[:, 2 * units : 3 * units])
        o = _sigmoid(z[:, 3 * units :])
        c = f * c + i * g
        h = o * np.tanh(c)
    return h[0] if single else h


def softmax_cross_entropy(logits, target) -> tuple[np.ndarray, np.ndarray]:
    """(per-sample loss, probs) with max-shifted exponents.

    logits/target: (C,) or (B, C); target rows are one-hot. The gradient of
    the summed loss w.r.t. logits is probs - target.
    """
    logits = np.asarray(logits, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    single = logits.ndim == 1
    if single:
        logits, target = logits[None], target[None]
    if logits.shape != target.shape:
        raise ShapeMismatch("logits and target shapes differ")
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    loss = -(target * (shifted - np.log(e.sum(axis=1, keepdims=True)))).sum(axis=1)
    return (loss[0], probs[0]) if single else (loss, probs)


# --------------------------------------------------------------------------
# Stateful layers (forward caches + backward)
# --------------------------------------------------------------------------


class Layer:
    """Common surface: build(in_shape, seed) -> out_shape; forward(x, train,
    seed); backward(dy) -> dx with parameter gradients accumulated."""

    name = "layer"

    def build(self, in_shape: tuple, seed: int) -> tuple:
        return in_shape

    def params(self) -> list[tuple[str, np.ndarray]]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []

    def forward(self, x: np.ndarray, train: bool = False, seed: int = 0) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name


def glorot_uniform(shape: tuple, fan_in: int, fan_out: int, seed: int) -> np.ndarray:
    """Uniform in +-sqrt(6 / (fan_in + fan_out)) from the documented generator."""
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    u = bulk_uniform(seed, int(np.prod(shape)))
    return ((2.0 * u - 1.0) * bound).reshape(shape)


class Conv1DLayer(Layer):
    name = "conv1d"

    def __init__(self, filters: int, kernel: int, padding: str = "same", activation: str = "relu"):
        if padding not in ("same", "valid"):
            raise ValueError(f"unknown padding {padding!r}")
        self.filters = filters
        self.kernel_size = kernel
        self.padding = padding
        self.activation = activation
        self.W = None
        self.b = None

    def build(self, in_shape, seed):
        length, c_in = in_shape
        if self.padding == "valid" and self.kernel_size > length:
            raise ShapeMismatch(f"kernel {self.kernel_size} exceeds input length {length}")
        fan = self.kernel_size * c_in, self.kernel_size * self.filters
        self.W = glorot_uniform(
            (self.kernel_size, c_in, self.filters), fan[0], fan[1], derive_seed(seed, 0)
        )
        self.b = np.zeros(self.filters)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        out_len = length if self.padding == "same" else length - self.kernel_size + 1
        return (out_len, self.filters)

    def params(self):
        return [("W", self.W), ("b", self.b)]

    def grads(self):
        return [self.dW, self.db]

    def forward(self, x, train=False, seed=0):
        k = self.kernel_size
        self._xp = _pad_same(x, k) if self.padding == "same" else x
        out_len = x.shape[1] if self.padding == "same" else x.shape[1] - k + 1
        self._out_len = out_len
        z = np.tile(self.b, (x.shape[0], out_len, 1))
        for t in range(k):
            z += self._xp[:, t : t + out_len, :] @ self.W[t]
        self._pre = z
        y = _activate(z, self.activation)
        _check_finite(self.name, y)
        return y

    def backward(self, dy):
        if self.activation == "relu":
            dy = dy * (self._pre > 0)
        k, out_len = self.kernel_size, self._out_len
        self.db = dy.sum(axis=(0, 1))
        self.dW = np.empty_like(self.W)
        dxp = np.zeros_like(self._xp)
        for t in range(k):
            sl = self._xp[:, t : t + out_len, :]
            self.dW[t] = np.tensordot(sl, dy, axes=([0, 1], [0, 1]))
            dxp[:, t : t + out_len, :] += dy @ self.W[t].T
        if self.padding == "same":
            left = (k - 1) // 2
            return dxp[:, left : left + out_len, :]
        return dxp

    def describe(self):
        return f"conv1d filters={self.filters} kernel={self.kernel_size} padding={self.padding} activation={self.activation}"


class MaxPool1DLayer(Layer):
    name = "maxpool1d"

    def __init__(self, pool: int, stride: int):
        self.pool = pool
        self.stride = stride

    def build(self, in_shape, seed):
        length, channels = in_shape
        if length < self.pool:
            raise InputTooShort(f"pooling window {self.pool} exceeds input length {length}")
        return ((length - self.pool) // self.stride + 1, channels)

    def forward(self, x, train=False, seed=0):
        y, idx = maxpool1d_forward(x, self.pool, self.stride)
        self._idx = idx
        self._in_shape = x.shape
        return y

    def backward(self, dy):
        b, out_len, c = dy.shape
        _, length, _ = self._in_shape
        # overlapping windows can route several gradients to one input slot,
        # so scatter with a flat bincount
        bi = np.repeat(np.arange(b), out_len * c)
        ci = np.tile(np.arange(c), b * out_len)
        flat = (bi * length + self._idx.ravel()) * c + ci
        dx = np.bincount(flat, weights=dy.ravel(), minlength=b * length * c)
        return dx.reshape(b, length, c)

    def describe(self):
        return f"maxpool1d pool={self.pool} stride={self.stride}"


class DropoutLayer(Layer):
    name = "dropout"

    def __init__(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        self.rate = rate

    def forward(self, x, train=False, seed=0):
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        mask = (bulk_uniform(seed, x.size) >= self.rate).reshape(x.shape)
        self._mask = mask / (1.0 - self.rate)
        return x * self._mask

    def backward(self, dy):
        return dy if self._mask is None else dy * self._mask

    def describe(self):
        return f"dropout rate={self.rate}"


class FlattenLayer(Layer):
    name = "flatten"

    def build(self, in_shape, seed):
        return (int(np.prod(in_shape)),)

    def forward(self, x, train=False, seed=0):
        self._in_shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._in_shape)


class DenseLayer(Layer):
    name = "dense"

    def __init__(self, units: int, activation: str = "linear"):
        self.units = units
        self.activation = activation
        self.W = None
        self.b = None

    def build(self, in_shape, seed):
        if len(in_shape) != 1:
            raise ShapeMismatch(f"dense needs a flat input, got shape {in_shape}")
        d = in_shape[0]
        self.W = glorot_uniform((d, self.units), d, self.units, derive_seed(seed, 0))
        self.b = np.zeros(self.units)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        return (self.units,)

    def params(self):
        return [("W", self.W), ("b", self.b)]

    def grads(self):
        return [self.dW, self.db]

    def forward(self, x, train=False, seed=0):
        self._x = x
        self._pre = x @ self.W + self.b
        y = _activate(self._pre, self.activation)
        _check_finite(self.name, y)
        return y

    def backward(self, dy):
        if self.activation == "relu":
            dy = dy * (self._pre > 0)
        self.dW = self._x.T @ dy
        self.db = dy.sum(axis=0)
        return dy @ self.W.T

    def describe(self):
        return f"dense units={self.units} activation={self.activation}"


class LSTMLayer(Layer):
    """Sequence-to-vector LSTM with full backpropagation through time."""

    name = "lstm"

    def __init__(self, units: int):
        self.units = units
        self.W = None
        self.R = None
        self.b = None

    def build(self, in_shape, seed):
        if len(in_shape) != 2:
            raise ShapeMismatch(f"lstm needs a (T, D) input, got shape {in_shape}")
        _, d = in_shape
        u = self.units
        self.W = glorot_uniform((d, 4 * u), d, 4 * u, derive_seed(seed, 0))
        self.R = glorot_uniform((u, 4 * u), u, 4 * u, derive_seed(seed, 1))
        self.b = np.zeros(4 * u)
        self.b[u : 2 * u] = 1.0  # forget-gate bias starts open
        self.dW = np.zeros_like(self.W)
        self.dR = np.zeros_like(self.R)
        self.db = np.zeros_like(self.b)
        return (u,)

    def params(self):
        return [("W", self.W), ("R", self.R), ("b", self.b)]

    def grads(self):
        return [self.dW, self.dR, self.db]

    def forward(self, x, train=False, seed=0):
        b, t_len, _ = x.shape
        u = self.units
        self._x = x
        h = np.zeros((b, u))
        c = np.zeros((b, u))
        self._cache = []
        for t in range(t_len):
            z = x[:, t, :] @ self.W + h @ self.R + self.b
            i = _sigmoid(z[:, :u])
            f = _sigmoid(z[:, u : 2 * u])
            g = np.tanh(z[:, 2 * u : 3 * u])
            o = _sigmoid(z[:, 3 * u :])
            c_prev, h_prev = c, h
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            self._cache.append((i, f, g, o, c_prev, h_prev, tc))
        _check_finite(self.name, h)
        return h

    def backward(self, dh):
        x = self._x
        b, t_len, d = x.shape
        u = self.units
        self.dW = np.zeros_like(self.W)
        self.dR = np.zeros_like(self.R)
        self.db = np.zeros_like(self.b)
        dx = np.zeros_like(x)
        dc = np.zeros((b, u))
        for t in range(t_len - 1, -1, -1):
            i, f, g, o, c_prev, h_prev, tc = self._cache[t]
            do = dh * tc
            dct = dh * o * (1.0 - tc * tc) + dc
            di = dct * g
            dg = dct * i
            df = dct * c_prev
            dc = dct * f
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            self.dW += x[:, t, :].T @ dz
            self.dR += h_prev.T @ dz
            self.db += dz.sum(axis=0)
            dx[:, t, :] = dz @ self.W.T
            dh = dz @ self.R.T
        return dx

    def describe(self):
        return f"lstm units={self.units}"
