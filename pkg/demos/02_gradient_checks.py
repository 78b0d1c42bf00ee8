"""Verify the hand-written backward passes against central finite differences."""

import numpy as np

from gramprof import nn
from gramprof.corpus import LevelSet, TagInventory
from gramprof.encoder import EncoderConfig
from gramprof.span_model import GrammarProfilerModel, enumerate_spans

rng = np.random.default_rng(0)

# a single layer first: scalar objective sum(W(x) * w), checked coordinate by coordinate
lin = nn.Linear(4, 3, rng, "demo", dtype=np.float64)
x0 = rng.normal(size=(5, 4))
w = rng.normal(size=(5, 3))


def f_linear(arrays):
    x, W, b = arrays
    lin.W.value, lin.b.value = W, b
    lin.W.grad, lin.b.grad = np.zeros_like(W), np.zeros_like(b)
    y = lin.forward(x, train=True)
    dx = lin.backward(w)
    return float((y * w).sum()), [dx, lin.W.grad, lin.b.grad]


err = nn.grad_check(f_linear, [x0, lin.W.value.copy(), lin.b.value.copy()])
print(f"linear layer      max rel err {err:.2e}")

att = nn.MultiHeadAttention(8, 2, 0.0, rng, "demo_att", dtype=np.float64)
xa = rng.normal(size=(5, 8))
wa = rng.normal(size=(5, 8))
params = att.parameters()


def f_attention(arrays):
    x = arrays[0]
    for p, a in zip(params, arrays[1:]):
        p.value = a
        p.grad = np.zeros_like(a)
    y = att.forward(x, train=True)
    dx = att.backward(wa)
    return float((y * wa).sum()), [dx] + [p.grad for p in params]


err = nn.grad_check(f_attention, [xa] + [p.value.copy() for p in params])
print(f"attention block   max rel err {err:.2e}")

# now the whole training loss: every parameter of a small multitask model
cfg = EncoderConfig(vocab_size=9, d=8, n_layers=1, n_heads=2, d_ffn=16, max_len=6, dropout=0.0)
model = GrammarProfilerModel(
    cfg,
    TagInventory(["A", "B", "C"]),
    levels=LevelSet.from_names(["easy", "mid", "hard"]),
    max_span_width=4,
    seed=0,
    dtype=np.float64,
)
model_params = model.parameters()
ids = [1, 4, 2, 7, 3]
targets = rng.integers(0, 5, size=len(enumerate_spans(len(ids), 4)))
alpha = 0.7


def f_joint(arrays):
    for p, a in zip(model_params, arrays):
        p.value = a
        p.grad = np.zeros_like(a)
    span_l, level_l = model.loss_and_grads(ids, targets, 1, alpha, 1.0, np.random.default_rng(0))
    return float(span_l + alpha * level_l), [p.grad for p in model_params]


n_coords = sum(p.value.size for p in model_params)
err = nn.grad_check(f_joint, [p.value.copy() for p in model_params])
print(f"joint loss        max rel err {err:.2e}  ({n_coords} coordinates)")
