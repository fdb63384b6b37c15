"""Minimal network engine for the frequency-domain SR model: 3x3 dense and
depthwise convolutions with hand-written backward passes, residual blocks,
L1 loss, Adam, a deterministic training loop, and FSRW weight files.

Tensors are plain float64 ndarrays shaped (1, channels, height, width);
the batch axis is fixed at 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accel import CONV_USE_NUMBA
from .dct_model import FreqTensor
from .errors import EmptyDataset, FormatError, ShapeMismatch
from .formats import read_fsrw, write_fsrw
from . import net_kernels


def _check4(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[0] != 1:
        raise ShapeMismatch(f"expected (1, C, H, W), got {x.shape}")
    return x


def _pad1(x3: np.ndarray) -> np.ndarray:
    return np.pad(x3, ((0, 0), (1, 1), (1, 1)))


def _conv_fwd(xpad, w, b, depthwise: bool) -> np.ndarray:
    h, wd = xpad.shape[1] - 2, xpad.shape[2] - 2
    cout = w.shape[0]
    if CONV_USE_NUMBA:
        out = np.empty((cout, h, wd), dtype=np.float64)
        if depthwise:
            net_kernels.conv_depthwise(xpad, w, b, out)
        else:
            net_kernels.conv_dense(xpad, w, b, out)
        return out
    if depthwise:
        out = np.broadcast_to(b[:, None, None], (cout, h, wd)).copy()
        for di in range(3):
            for dj in range(3):
                out += w[:, di, dj][:, None, None] * xpad[:, di : di + h, dj : dj + wd]
        return out
    out = np.broadcast_to(b[:, None, None], (cout, h, wd)).copy()
    for di in range(3):
        for dj in range(3):
            out += np.tensordot(w[:, :, di, dj], xpad[:, di : di + h, dj : dj + wd], axes=([1], [0]))
    return out


def _conv_grad_w(xpad, gy, gw, gb, depthwise: bool):
    h, wd = gy.shape[1], gy.shape[2]
    if CONV_USE_NUMBA:
        if depthwise:
            net_kernels.conv_depthwise_grad_w(xpad, gy, gw, gb)
        else:
            net_kernels.conv_dense_grad_w(xpad, gy, gw, gb)
        return
    gb += gy.sum(axis=(1, 2))
    for di in range(3):
        for dj in range(3):
            win = xpad[:, di : di + h, dj : dj + wd]
            if depthwise:
                gw[:, di, dj] += (gy * win).sum(axis=(1, 2))
            else:
                gw[:, :, di, dj] += np.tensordot(gy, win, axes=([1, 2], [1, 2]))


class Conv2d:
    """3x3, stride 1, zero padding 1; spatial dims preserved."""

    def __init__(self, in_channels: int, out_channels: int, depthwise: bool = False):
        if depthwise and in_channels != out_channels:
            raise ShapeMismatch("depthwise conv needs in_channels == out_channels")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.depthwise = depthwise
        shape = (out_channels, 3, 3) if depthwise else (out_channels, in_channels, 3, 3)
        self.w = np.zeros(shape, dtype=np.float64)
        self.b = np.zeros(out_channels, dtype=np.float64)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._xpad = None

    def init_weights(self, rng: np.random.Generator):
        # Kaiming-uniform, fan-in, ReLU gain: bound = sqrt(6 / fan_in)
        fan_in = 9 if self.depthwise else self.in_channels * 9
        bound = np.sqrt(6.0 / fan_in)
        self.w[...] = rng.uniform(-bound, bound, self.w.shape)
        self.b[...] = 0.0

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = _check4(x)
        if x.shape[1] != self.in_channels:
            raise ShapeMismatch(f"expected {self.in_channels} channels, got {x.shape[1]}")
        self._xpad = _pad1(x[0])
        return _conv_fwd(self._xpad, self.w, self.b, self.depthwise)[None]

    def backward(self, gy: np.ndarray) -> np.ndarray:
        gy3 = _check4(gy)[0]
        _conv_grad_w(self._xpad, gy3, self.gw, self.gb, self.depthwise)
        gypad = _pad1(gy3)
        if self.depthwise:
            wflip = self.w[:, ::-1, ::-1]
        else:
            # swap in/out channels and flip spatially: correlation transpose
            wflip = self.w.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1]
        zero_b = np.zeros(self.in_channels, dtype=np.float64)
        return _conv_fwd(gypad, np.ascontiguousarray(wflip), zero_b, self.depthwise)[None]

    def zero_grad(self):
        self.gw[...] = 0.0
        self.gb[...] = 0.0


class ReLU:
    def __init__(self):
        self._mask = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, gy: np.ndarray) -> np.ndarray:
        return np.where(self._mask, gy, 0.0)


class ResidualBlock:
    """y = x + conv2(relu(conv1(x))); both convs share the depthwise flag."""

    def __init__(self, channels: int, depthwise: bool):
        self.conv1 = Conv2d(channels, channels, depthwise)
        self.relu = ReLU()
        self.conv2 = Conv2d(channels, channels, depthwise)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x + self.conv2.forward(self.relu.forward(self.conv1.forward(x)))

    def backward(self, gy: np.ndarray) -> np.ndarray:
        return gy + self.conv1.backward(self.relu.backward(self.conv2.backward(gy)))


@dataclass(frozen=True)
class FreqSrConfig:
    in_channels: int = 64
    feature_width: int = 64
    num_depthwise_blocks: int = 4
    num_standard_blocks: int = 4
    out_channels: int = 64

    def __post_init__(self):
        if self.num_depthwise_blocks < 0 or self.num_standard_blocks < 0:
            raise ValueError("block counts must be >= 0")


def parameter_count(cfg: FreqSrConfig) -> int:
    """head + blocks + tail; the closed-form sum is documented in the README."""
    f = cfg.feature_width
    head = cfg.in_channels * f * 9 + f
    dw = cfg.num_depthwise_blocks * 2 * (f * 9 + f)
    std = cfg.num_standard_blocks * 2 * (f * f * 9 + f)
    tail = f * cfg.out_channels * 9 + cfg.out_channels
    return head + dw + std + tail


class FreqSrModel:
    """Head conv, depthwise residual blocks, standard residual blocks, tail conv."""

    def __init__(self, cfg: FreqSrConfig = FreqSrConfig()):
        self.cfg = cfg
        f = cfg.feature_width
        self.head = Conv2d(cfg.in_channels, f)
        self.dw_blocks = [ResidualBlock(f, depthwise=True) for _ in range(cfg.num_depthwise_blocks)]
        self.std_blocks = [ResidualBlock(f, depthwise=False) for _ in range(cfg.num_standard_blocks)]
        self.tail = Conv2d(f, cfg.out_channels)
        self.step_count = 0
        self._adam_m = None
        self._adam_v = None

    def init_weights(self, seed: int = 0):
        rng = np.random.default_rng(seed)
        for _, conv in self._convs():
            conv.init_weights(rng)

    def _convs(self):
        yield "head", self.head
        for i, blk in enumerate(self.dw_blocks):
            yield f"dw{i}.c1", blk.conv1
            yield f"dw{i}.c2", blk.conv2
        for i, blk in enumerate(self.std_blocks):
            yield f"std{i}.c1", blk.conv1
            yield f"std{i}.c2", blk.conv2
        yield "tail", self.tail

    def parameters(self) -> list[tuple[str, np.ndarray, np.ndarray]]:
        out = []
        for name, conv in self._convs():
            out.append((f"{name}.w", conv.w, conv.gw))
            out.append((f"{name}.b", conv.b, conv.gb))
        return out

    def num_parameters(self) -> int:
        return sum(p.size for _, p, _ in self.parameters())

    def zero_grad(self):
        for _, conv in self._convs():
            conv.zero_grad()

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = _check4(x)
        if x.shape[1] != self.cfg.in_channels:
            raise ShapeMismatch(f"expected {self.cfg.in_channels} input channels")
        h = self.head.forward(x)
        for blk in self.dw_blocks:
            h = blk.forward(h)
        for blk in self.std_blocks:
            h = blk.forward(h)
        return self.tail.forward(h)

    def backward(self, gy: np.ndarray) -> np.ndarray:
        g = self.tail.backward(gy)
        for blk in reversed(self.std_blocks):
            g = blk.backward(g)
        for blk in reversed(self.dw_blocks):
            g = blk.backward(g)
        return self.head.backward(g)

    def adam_step(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        """Bias-corrected Adam on the accumulated gradients."""
        params = self.parameters()
        if self._adam_m is None:
            self._adam_m = {n: np.zeros_like(p) for n, p, _ in params}
            self._adam_v = {n: np.zeros_like(p) for n, p, _ in params}
        self.step_count += 1
        t = self.step_count
        for name, p, g in params:
            m = self._adam_m[name]
            v = self._adam_v[name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            mhat = m / (1.0 - beta1**t)
            vhat = v / (1.0 - beta2**t)
            p -= lr * mhat / (np.sqrt(vhat) + eps)

    def save_weights(self, path):
        tensors: dict[str, np.ndarray] = {}
        for name, p, _ in self.parameters():
            tensors[name] = p
        tensors["opt.step"] = np.array([self.step_count], dtype=np.float64)
        if self._adam_m is not None:
            for name, p, _ in self.parameters():
                tensors[f"opt.m.{name}"] = self._adam_m[name]
                tensors[f"opt.v.{name}"] = self._adam_v[name]
        write_fsrw(path, tensors)

    @classmethod
    def load_weights(cls, path) -> "FreqSrModel":
        tensors = read_fsrw(path)
        if "head.w" not in tensors or "tail.w" not in tensors:
            raise FormatError("weight file lacks head/tail tensors")
        f, in_c = tensors["head.w"].shape[0], tensors["head.w"].shape[1]
        out_c = tensors["tail.w"].shape[0]
        n_dw = sum(1 for k in tensors if k.startswith("dw") and k.endswith(".c1.w"))
        n_std = sum(1 for k in tensors if k.startswith("std") and k.endswith(".c1.w"))
        cfg = FreqSrConfig(in_c, f, n_dw, n_std, out_c)
        model = cls(cfg)
        for name, p, _ in model.parameters():
            if name not in tensors:
                raise FormatError(f"missing tensor {name}")
            if tensors[name].shape != p.shape:
                raise FormatError(f"tensor {name} has shape {tensors[name].shape}, expected {p.shape}")
            p[...] = tensors[name]
        model.step_count = int(tensors.get("opt.step", np.zeros(1))[0])
        if any(k.startswith("opt.m.") for k in tensors):
            model._adam_m = {}
            model._adam_v = {}
            for name, p, _ in model.parameters():
                model._adam_m[name] = tensors[f"opt.m.{name}"].reshape(p.shape).copy()
                model._adam_v[name] = tensors[f"opt.v.{name}"].reshape(p.shape).copy()
        return model


def l1_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean absolute error and its subgradient (sign(0) = 0)."""
    if pred.shape != target.shape:
        raise ShapeMismatch(f"loss shapes differ: {pred.shape} vs {target.shape}")
    d = pred - target
    loss = float(np.mean(np.abs(d)))
    return loss, np.sign(d) / d.size


def tensor_to_net(t: FreqTensor) -> np.ndarray:
    """(rows, cols, 64) -> (1, 64, rows, cols)."""
    return np.ascontiguousarray(t.data.transpose(2, 0, 1))[None]


def net_to_tensor(x: np.ndarray) -> FreqTensor:
    return FreqTensor(np.ascontiguousarray(_check4(x)[0].transpose(1, 2, 0)))


def train(
    dataset: list[tuple[np.ndarray, np.ndarray]],
    cfg: FreqSrConfig = FreqSrConfig(),
    epochs: int = 1,
    lr: float = 1e-4,
    seed: int = 0,
) -> tuple[FreqSrModel, list[float]]:
    """Seeded training loop over (lr, hr) network-layout pairs.

    Returns the model and the per-epoch mean L1 history; the run is
    bit-reproducible for a fixed seed.
    """
    if not dataset:
        raise EmptyDataset("training needs at least one pair")
    for x, y in dataset:
        if x.shape != dataset[0][0].shape or y.shape != x.shape:
            raise ShapeMismatch("dataset pairs must share one shape")
    model = FreqSrModel(cfg)
    model.init_weights(seed)
    order_rng = np.random.default_rng(seed + 1)
    history: list[float] = []
    for _ in range(epochs):
        order = order_rng.permutation(len(dataset))
        total = 0.0
        for idx in order:
            x, y = dataset[idx]
            pred = model.forward(x)
            loss, g = l1_loss(pred, y)
            model.zero_grad()
            model.backward(g)
            model.adam_step(lr)
            total += loss
        history.append(total / len(dataset))
    return model, history
