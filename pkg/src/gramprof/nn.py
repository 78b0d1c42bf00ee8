"""Differentiable numpy primitives (forward + hand-derived backward) and Adam.

Training is single-writer: layers cache activations on ``train=True`` forward
passes for the following ``backward``. Eval-mode forwards write no state and
are safe to run concurrently over frozen parameters.
"""

from __future__ import annotations

import math
import zlib
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf

DEFAULT_DTYPE = np.float32

_INV_SQRT_2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def rng_stream(seed: int, group: str) -> np.random.Generator:
    """Named RNG stream derived from (seed, group).

    Streams are independent: adding or removing one parameter group never
    shifts the draws of another, which keeps paired training runs comparable
    parameter by parameter.
    """
    key = zlib.crc32(group.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))


class Parameter:
    """Named tensor plus an accumulating gradient of the same shape."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name: str, value: np.ndarray):
        self.name = name
        self.value = np.asarray(value)
        self.grad = np.zeros_like(self.value)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def zero_grad(self) -> None:
        self.grad[...] = 0

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.value.shape})"


def xavier_uniform(rng: np.random.Generator, d_in: int, d_out: int, dtype=DEFAULT_DTYPE) -> np.ndarray:
    limit = math.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-limit, limit, size=(d_in, d_out)).astype(dtype)


# ---------------------------------------------------------------------------
# functional primitives
# ---------------------------------------------------------------------------


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shift-invariant softmax; never overflows on finite input."""
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax_backward(probs: np.ndarray, dprobs: np.ndarray, axis: int = -1) -> np.ndarray:
    """Gradient wrt the logits given the forward output ``probs``."""
    inner = np.sum(dprobs * probs, axis=axis, keepdims=True)
    return probs * (dprobs - inner)


def cross_entropy(probs: np.ndarray, target: int) -> float:
    """Negative log probability of the target class under a distribution."""
    k = probs.shape[-1]
    if not 0 <= target < k:
        raise ValueError(f"target {target} out of range for {k} classes")
    return float(-np.log(probs[target]))


def softmax_cross_entropy(logits: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fused softmax + cross entropy over rows.

    Returns per-row losses and the gradient wrt the logits, which is
    ``softmax(logits) - onehot(target)`` row by row.
    """
    logits = np.atleast_2d(logits)
    targets = np.atleast_1d(targets)
    n, k = logits.shape
    if np.any((targets < 0) | (targets >= k)):
        raise ValueError(f"targets out of range for {k} classes")
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    e = np.exp(shifted)
    z = np.sum(e, axis=1, keepdims=True)
    probs = e / z
    rows = np.arange(n)
    losses = np.log(z[:, 0]) - shifted[rows, targets]
    dlogits = probs.copy()
    dlogits[rows, targets] -= 1.0
    return losses, dlogits


def gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x * _INV_SQRT_2))


def gelu_backward(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    cdf = 0.5 * (1.0 + erf(x * _INV_SQRT_2))
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return dy * (cdf + x * pdf)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(x: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return dy * (x > 0)


def concat(parts: Sequence[np.ndarray], axis: int = -1) -> np.ndarray:
    return np.concatenate(parts, axis=axis)


def concat_backward(dy: np.ndarray, sizes: Sequence[int], axis: int = -1) -> list[np.ndarray]:
    return np.split(dy, np.cumsum(sizes)[:-1], axis=axis)


def subtract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a - b


def subtract_backward(dy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return dy, -dy


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------


class Linear:
    """Affine map ``y = x W + b`` over row vectors."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, name: str, dtype=DEFAULT_DTYPE):
        self.W = Parameter(f"{name}.W", xavier_uniform(rng, d_in, d_out, dtype))
        self.b = Parameter(f"{name}.b", np.zeros(d_out, dtype=dtype))
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        if train:
            self._x = x
        return x @ self.W.value + self.b.value

    def backward(self, dy: np.ndarray) -> np.ndarray:
        x = self._x
        self.W.grad += x.T @ dy
        self.b.grad += dy.sum(axis=0)
        return dy @ self.W.value.T

    def parameters(self) -> list[Parameter]:
        return [self.W, self.b]


class Embedding:
    """Id-to-row lookup; gradients scatter-add into the table."""

    def __init__(self, n_rows: int, d: int, rng: np.random.Generator, name: str, dtype=DEFAULT_DTYPE):
        table = rng.normal(0.0, 0.02, size=(n_rows, d)).astype(dtype)
        self.table = Parameter(f"{name}.table", table)
        self._ids: np.ndarray | None = None

    def forward(self, ids: np.ndarray, train: bool = False) -> np.ndarray:
        ids = np.asarray(ids)
        n = self.table.value.shape[0]
        if ids.size and (ids.min() < 0 or ids.max() >= n):
            raise ValueError(f"embedding id out of range 0..{n - 1}")
        if train:
            self._ids = ids
        return self.table.value[ids]

    def backward(self, dy: np.ndarray) -> None:
        np.add.at(self.table.grad, self._ids, dy)

    def parameters(self) -> list[Parameter]:
        return [self.table]


class LayerNorm:
    """Per-row normalization with learned scale and shift."""

    def __init__(self, d: int, name: str, dtype=DEFAULT_DTYPE, eps: float = 1e-5):
        self.gamma = Parameter(f"{name}.gamma", np.ones(d, dtype=dtype))
        self.beta = Parameter(f"{name}.beta", np.zeros(d, dtype=dtype))
        self.eps = eps
        self._xhat: np.ndarray | None = None
        self._inv: np.ndarray | None = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        mu = x.mean(axis=-1, keepdims=True)
        xc = x - mu
        var = np.mean(xc * xc, axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.eps)
        xhat = xc * inv
        if train:
            self._xhat, self._inv = xhat, inv
        return xhat * self.gamma.value + self.beta.value

    def backward(self, dy: np.ndarray) -> np.ndarray:
        xhat, inv = self._xhat, self._inv
        self.gamma.grad += np.sum(dy * xhat, axis=tuple(range(dy.ndim - 1)))
        self.beta.grad += np.sum(dy, axis=tuple(range(dy.ndim - 1)))
        dxhat = dy * self.gamma.value
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv * (dxhat - m1 - xhat * m2)

    def parameters(self) -> list[Parameter]:
        return [self.gamma, self.beta]


class Dropout:
    """Inverted dropout; identity in eval mode."""

    def __init__(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must be in [0, 1)")
        self.rate = rate
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray, rng: np.random.Generator | None, train: bool = False) -> np.ndarray:
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.rate
        mask = (rng.random(x.shape) < keep).astype(x.dtype) / keep
        self._mask = mask
        return x * mask

    def backward(self, dy: np.ndarray) -> np.ndarray:
        if self._mask is None:
            return dy
        return dy * self._mask


class MultiHeadAttention:
    """Scaled dot-product attention with ``n_heads`` parallel heads."""

    def __init__(self, d: int, n_heads: int, dropout: float, rng: np.random.Generator, name: str, dtype=DEFAULT_DTYPE):
        if d % n_heads != 0:
            raise ValueError(f"hidden size {d} not divisible by {n_heads} heads")
        self.d = d
        self.n_heads = n_heads
        self.d_head = d // n_heads
        self.q = Linear(d, d, rng, f"{name}.q", dtype)
        self.k = Linear(d, d, rng, f"{name}.k", dtype)
        self.v = Linear(d, d, rng, f"{name}.v", dtype)
        self.out = Linear(d, d, rng, f"{name}.out", dtype)
        self.prob_dropout = Dropout(dropout)
        self._cache: dict | None = None
        self.last_probs: np.ndarray | None = None  # (heads, T, T) from the latest train forward

    def _split(self, x: np.ndarray) -> np.ndarray:
        t = x.shape[0]
        return x.reshape(t, self.n_heads, self.d_head).transpose(1, 0, 2)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        h, t, dh = x.shape
        return x.transpose(1, 0, 2).reshape(t, h * dh)

    def forward(self, x: np.ndarray, rng: np.random.Generator | None = None, train: bool = False) -> np.ndarray:
        q = self._split(self.q.forward(x, train))
        k = self._split(self.k.forward(x, train))
        v = self._split(self.v.forward(x, train))
        scale = 1.0 / math.sqrt(self.d_head)
        scores = (q @ k.transpose(0, 2, 1)) * scale
        probs = softmax(scores, axis=-1)
        dropped = self.prob_dropout.forward(probs, rng, train)
        ctx = dropped @ v
        merged = self._merge(ctx)
        if train:
            self._cache = {"q": q, "k": k, "v": v, "probs": probs, "dropped": dropped, "scale": scale}
            self.last_probs = probs
        return self.out.forward(merged, train)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        c = self._cache
        dmerged = self.out.backward(dy)
        t = dmerged.shape[0]
        dctx = dmerged.reshape(t, self.n_heads, self.d_head).transpose(1, 0, 2)
        ddropped = dctx @ c["v"].transpose(0, 2, 1)
        dv = c["dropped"].transpose(0, 2, 1) @ dctx
        dprobs = self.prob_dropout.backward(ddropped)
        dscores = softmax_backward(c["probs"], dprobs) * c["scale"]
        dq = dscores @ c["k"]
        dk = dscores.transpose(0, 2, 1) @ c["q"]
        dx = self.q.backward(self._merge(dq))
        dx += self.k.backward(self._merge(dk))
        dx += self.v.backward(self._merge(dv))
        return dx

    def parameters(self) -> list[Parameter]:
        return self.q.parameters() + self.k.parameters() + self.v.parameters() + self.out.parameters()


class FeedForward:
    """Two-layer position-wise network with a GELU or ReLU in between."""

    def __init__(self, d: int, d_ffn: int, rng: np.random.Generator, name: str,
                 dtype=DEFAULT_DTYPE, activation: str = "gelu"):
        if activation not in ("gelu", "relu"):
            raise ValueError(f"unknown activation: {activation!r}")
        self.inner = Linear(d, d_ffn, rng, f"{name}.inner", dtype)
        self.outer = Linear(d_ffn, d, rng, f"{name}.outer", dtype)
        self.activation = activation
        self._pre: np.ndarray | None = None

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        pre = self.inner.forward(x, train)
        if train:
            self._pre = pre
        act = gelu(pre) if self.activation == "gelu" else relu(pre)
        return self.outer.forward(act, train)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        dact = self.outer.backward(dy)
        if self.activation == "gelu":
            dpre = gelu_backward(self._pre, dact)
        else:
            dpre = relu_backward(self._pre, dact)
        return self.inner.backward(dpre)

    def parameters(self) -> list[Parameter]:
        return self.inner.parameters() + self.outer.parameters()


# ---------------------------------------------------------------------------
# optimization
# ---------------------------------------------------------------------------


class Adam:
    """Bias-corrected Adam over a fixed parameter list.

    ``step`` applies the update from the accumulated gradients and zeroes
    them afterwards.
    """

    def __init__(self, params: Sequence[Parameter], lr: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        self.params = list(params)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = {p.name: np.zeros_like(p.value) for p in params}
        self.v = {p.name: np.zeros_like(p.value) for p in params}

    def step(self) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p in self.params:
            if p.grad.shape != p.value.shape:
                raise ValueError(f"gradient shape mismatch for {p.name}")
            m = self.m[p.name]
            v = self.v[p.name]
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * (p.grad * p.grad)
            m_hat = m / bc1
            v_hat = v / bc2
            p.value -= (self.lr * m_hat / (np.sqrt(v_hat) + self.eps)).astype(p.value.dtype)
            p.zero_grad()


def global_grad_norm(params: Sequence[Parameter]) -> float:
    total = 0.0
    for p in params:
        g = p.grad.astype(np.float64, copy=False)
        total += float(np.sum(g * g))
    return math.sqrt(total)


def clip_gradients(params: Sequence[Parameter], max_norm: float) -> float:
    """Scale all gradients so their global norm is at most ``max_norm``."""
    norm = global_grad_norm(params)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for p in params:
            p.grad *= scale
    return norm


# ---------------------------------------------------------------------------
# gradient verification
# ---------------------------------------------------------------------------

ValueAndGrad = Callable[[Sequence[np.ndarray]], tuple[float, Sequence[np.ndarray]]]


def grad_check(
    value_and_grad: ValueAndGrad,
    arrays: Sequence[np.ndarray],
    h: float = 1e-5,
    coords: Sequence[tuple[int, int]] | None = None,
) -> float:
    """Compare analytic gradients against central finite differences.

    ``value_and_grad`` maps the input arrays to a scalar and one gradient per
    array; it must be a pure function of the arrays. Inputs should be float64
    and sit away from non-differentiable points. Returns the max elementwise
    relative error ``|a - n| / max(1, |a|, |n|)``.

    ``coords`` restricts the check to the given (array index, flat index)
    coordinates; by default every coordinate of every array is perturbed.
    """
    arrays = [np.array(a, dtype=np.float64) for a in arrays]
    _, grads = value_and_grad(arrays)
    grads = [np.asarray(g) for g in grads]
    for ai, a in enumerate(arrays):
        if grads[ai].shape != a.shape:
            raise ValueError(f"gradient {ai} has shape {grads[ai].shape}, expected {a.shape}")
    if coords is None:
        coords = [(ai, idx) for ai, a in enumerate(arrays) for idx in range(a.size)]
    worst = 0.0
    for ai, idx in coords:
        flat = arrays[ai].reshape(-1)
        orig = flat[idx]
        flat[idx] = orig + h
        up, _ = value_and_grad(arrays)
        flat[idx] = orig - h
        down, _ = value_and_grad(arrays)
        flat[idx] = orig
        numeric = (up - down) / (2.0 * h)
        analytic = grads[ai].reshape(-1)[idx]
        denom = max(1.0, abs(analytic), abs(numeric))
        worst = max(worst, abs(analytic - numeric) / denom)
    return worst
