"""Dense-matrix neural network core: temporal conv -> ReLU -> two FC layers.

The architecture is fixed: a 1-D convolution over time with the 2N landmark
coordinates as input channels ("valid" boundary, stride 1), one ReLU, then
two fully-connected layers producing 3 logits. Gradients are hand-derived
reverse-mode; no autodiff. Everything runs in float64 and every function is
pure, so identical inputs give bitwise-identical outputs.

Layout conventions (fixed for checkpoint portability):
- conv_w has shape (filters, channels, kernel); the im2col patch for output
  position t flattens channel-major, i.e. column c*kernel + dt.
- the conv activation (filters, T') flattens filter-major before fc1, i.e.
  flat index f*T' + t.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Dict, Iterator, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeError
from .landmarks import SentenceType

NUM_CLASSES = 3


@dataclass(frozen=True)
class ClassifierConfig:
    """Architecture hyperparameters; defaults follow the reference setup."""

    input_channels: int
    input_length: int = 300
    conv_filters: int = 16
    kernel_size: int = 5
    hidden_units: int = 64
    num_classes: int = NUM_CLASSES
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("input_channels", "input_length", "conv_filters", "kernel_size", "hidden_units"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.kernel_size > self.input_length:
            raise ValueError(
                f"kernel_size {self.kernel_size} exceeds input_length {self.input_length}"
            )
        if self.num_classes != NUM_CLASSES:
            raise ValueError(f"num_classes is fixed at {NUM_CLASSES}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    @property
    def conv_output_length(self) -> int:
        return self.input_length - self.kernel_size + 1

    @property
    def flattened_size(self) -> int:
        return self.conv_filters * self.conv_output_length


@dataclass(frozen=True, eq=False)
class ModelParams:
    """All trainable tensors. Treated as immutable; updates build new bundles."""

    conv_w: np.ndarray  # (filters, channels, kernel)
    conv_b: np.ndarray  # (filters,)
    fc1_w: np.ndarray   # (hidden, filters * conv_output_length)
    fc1_b: np.ndarray   # (hidden,)
    fc2_w: np.ndarray   # (num_classes, hidden)
    fc2_b: np.ndarray   # (num_classes,)

    def tensors(self) -> Iterator[Tuple[str, np.ndarray]]:
        for f in fields(self):
            yield f.name, getattr(self, f.name)

    def validate(self, cfg: ClassifierConfig) -> None:
        expected = expected_shapes(cfg)
        for name, arr in self.tensors():
            if arr.shape != expected[name]:
                raise ShapeError(
                    f"{name} has shape {arr.shape}, expected {expected[name]}"
                )
            if not np.isfinite(arr).all():
                raise ShapeError(f"{name} contains non-finite values")

    def total_count(self) -> int:
        return sum(arr.size for _, arr in self.tensors())


class GradientSet(ModelParams):
    """Per-parameter gradients; shape-congruent with ModelParams."""


def expected_shapes(cfg: ClassifierConfig) -> Dict[str, Tuple[int, ...]]:
    tprime = cfg.conv_output_length
    return {
        "conv_w": (cfg.conv_filters, cfg.input_channels, cfg.kernel_size),
        "conv_b": (cfg.conv_filters,),
        "fc1_w": (cfg.hidden_units, cfg.conv_filters * tprime),
        "fc1_b": (cfg.hidden_units,),
        "fc2_w": (cfg.num_classes, cfg.hidden_units),
        "fc2_b": (cfg.num_classes,),
    }


def init_params(cfg: ClassifierConfig) -> ModelParams:
    """Seeded initialization: He-uniform for the ReLU path, Glorot for the output.

    conv_w and fc1_w are drawn U(-sqrt(6/fan_in), +sqrt(6/fan_in)) (variance
    2/fan_in, suited to ReLU); fc2_w U(+-sqrt(6/(fan_in+fan_out))); biases
    start at zero. Draw order is conv_w, fc1_w, fc2_w under PCG64(seed).
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    shapes = expected_shapes(cfg)

    def he_uniform(shape, fan_in):
        limit = np.sqrt(6.0 / fan_in)
        return rng.uniform(-limit, limit, size=shape)

    conv_fan_in = cfg.input_channels * cfg.kernel_size
    conv_w = he_uniform(shapes["conv_w"], conv_fan_in)
    fc1_w = he_uniform(shapes["fc1_w"], cfg.flattened_size)
    glorot_limit = np.sqrt(6.0 / (cfg.hidden_units + cfg.num_classes))
    fc2_w = rng.uniform(-glorot_limit, glorot_limit, size=shapes["fc2_w"])
    return ModelParams(
        conv_w=conv_w,
        conv_b=np.zeros(shapes["conv_b"]),
        fc1_w=fc1_w,
        fc1_b=np.zeros(shapes["fc1_b"]),
        fc2_w=fc2_w,
        fc2_b=np.zeros(shapes["fc2_b"]),
    )


@dataclass(frozen=True, eq=False)
class ForwardCache:
    """Intermediates kept for the backward pass (batch-first layout)."""

    cols: np.ndarray      # (B, T', channels*kernel) im2col patches
    conv_pre: np.ndarray  # (B, T', filters) pre-ReLU conv output
    flat: np.ndarray      # (B, filters*T') flattened activation
    hidden: np.ndarray    # (B, hidden) fc1 output


def _check_batch(cfg: ClassifierConfig, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[1] != cfg.input_length or x.shape[2] != cfg.input_channels:
        raise ShapeError(
            f"expected input of shape (batch, {cfg.input_length}, "
            f"{cfg.input_channels}), got {x.shape}"
        )
    return x


def forward_batch(
    cfg: ClassifierConfig, params: ModelParams, x: np.ndarray
) -> Tuple[np.ndarray, ForwardCache]:
    """Run the classifier on a (batch, T, channels) tensor; returns (logits, cache)."""
    x = _check_batch(cfg, x)
    b = x.shape[0]
    f, tprime, k = cfg.conv_filters, cfg.conv_output_length, cfg.kernel_size

    # windows[b, t, c, dt] = x[b, t+dt, c]; flatten patches channel-major
    windows = sliding_window_view(x, k, axis=1)
    cols = np.ascontiguousarray(windows).reshape(b, tprime, cfg.input_channels * k)
    conv_pre = cols @ params.conv_w.reshape(f, -1).T + params.conv_b  # (B, T', F)
    activated = np.maximum(conv_pre, 0.0)
    flat = np.ascontiguousarray(activated.transpose(0, 2, 1)).reshape(b, f * tprime)
    hidden = flat @ params.fc1_w.T + params.fc1_b
    logits = hidden @ params.fc2_w.T + params.fc2_b
    return logits, ForwardCache(cols=cols, conv_pre=conv_pre, flat=flat, hidden=hidden)


def forward(
    cfg: ClassifierConfig, params: ModelParams, x: np.ndarray
) -> Tuple[np.ndarray, ForwardCache]:
    """Single-sample forward over a (T, channels) feature tensor."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"expected a (T, channels) tensor, got shape {x.shape}")
    logits, cache = forward_batch(cfg, params, x[np.newaxis])
    return logits[0], cache


def backward_batch(
    cfg: ClassifierConfig,
    params: ModelParams,
    cache: ForwardCache,
    dlogits: np.ndarray,
) -> GradientSet:
    """Gradients of sum_b loss_b given per-sample dlogits of shape (B, 3)."""
    dlogits = np.asarray(dlogits, dtype=np.float64)
    b = cache.hidden.shape[0]
    if dlogits.shape != (b, cfg.num_classes):
        raise ShapeError(
            f"dlogits shape {dlogits.shape} does not match batch ({b}, {cfg.num_classes})"
        )
    f, tprime = cfg.conv_filters, cfg.conv_output_length

    dfc2_w = dlogits.T @ cache.hidden
    dfc2_b = dlogits.sum(axis=0)
    dhidden = dlogits @ params.fc2_w

    dfc1_w = dhidden.T @ cache.flat
    dfc1_b = dhidden.sum(axis=0)
    dflat = dhidden @ params.fc1_w

    dact = dflat.reshape(b, f, tprime).transpose(0, 2, 1)  # (B, T', F)
    dconv_pre = np.where(cache.conv_pre > 0.0, dact, 0.0)
    dconv_w = np.tensordot(dconv_pre, cache.cols, axes=([0, 1], [0, 1]))  # (F, C*K)
    dconv_b = dconv_pre.sum(axis=(0, 1))

    return GradientSet(
        conv_w=dconv_w.reshape(params.conv_w.shape),
        conv_b=dconv_b,
        fc1_w=dfc1_w,
        fc1_b=dfc1_b,
        fc2_w=dfc2_w,
        fc2_b=dfc2_b,
    )


def backward(
    cfg: ClassifierConfig,
    params: ModelParams,
    cache: ForwardCache,
    dlogits: np.ndarray,
) -> GradientSet:
    """Single-sample gradients from a matching `forward` call."""
    dlogits = np.asarray(dlogits, dtype=np.float64)
    if dlogits.shape != (cfg.num_classes,):
        raise ShapeError(f"dlogits must have shape ({cfg.num_classes},), got {dlogits.shape}")
    return backward_batch(cfg, params, cache, dlogits[np.newaxis])


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax along the last axis (max subtraction)."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(
    logits: np.ndarray, label: SentenceType
) -> Tuple[float, np.ndarray]:
    """Loss -ln softmax(logits)[label] and its gradient p - onehot(label)."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape != (NUM_CLASSES,):
        raise ShapeError(f"logits must have shape ({NUM_CLASSES},), got {logits.shape}")
    shifted = logits - logits.max()
    logsumexp = np.log(np.exp(shifted).sum())
    loss = float(logsumexp - shifted[int(label)])
    p = np.exp(shifted - logsumexp)
    dlogits = p.copy()
    dlogits[int(label)] -= 1.0
    return loss, dlogits


def softmax_cross_entropy_batch(
    logits: np.ndarray, labels: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized per-sample losses and unscaled dlogits for a (B, 3) batch."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    shifted = logits - logits.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(logits.shape[0])
    losses = logsumexp - shifted[rows, labels]
    p = np.exp(shifted - logsumexp[:, np.newaxis])
    dlogits = p
    dlogits[rows, labels] -= 1.0
    return losses, dlogits


@dataclass(frozen=True, eq=False)
class AdamState:
    """First/second moment accumulators, shape-congruent with the parameters."""

    m: GradientSet
    v: GradientSet

    @classmethod
    def zeros(cls, params: ModelParams) -> "AdamState":
        return cls(
            m=GradientSet(**{name: np.zeros_like(a) for name, a in params.tensors()}),
            v=GradientSet(**{name: np.zeros_like(a) for name, a in params.tensors()}),
        )


ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def adam_step(
    params: ModelParams,
    grads: GradientSet,
    state: AdamState,
    lr: float,
    step: int,
) -> Tuple[ModelParams, AdamState]:
    """One bias-corrected adaptive-moment update; pure, returns new bundles."""
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    bc1 = 1.0 - ADAM_BETA1**step
    bc2 = 1.0 - ADAM_BETA2**step
    new_p, new_m, new_v = {}, {}, {}
    for (name, p), (_, g), (_, m), (_, v) in zip(
        params.tensors(), grads.tensors(), state.m.tensors(), state.v.tensors()
    ):
        m2 = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
        v2 = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * (g * g)
        update = (m2 / bc1) / (np.sqrt(v2 / bc2) + ADAM_EPS)
        new_p[name] = p - lr * update
        new_m[name] = m2
        new_v[name] = v2
    return ModelParams(**new_p), AdamState(m=GradientSet(**new_m), v=GradientSet(**new_v))
