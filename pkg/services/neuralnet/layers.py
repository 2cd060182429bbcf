"""
网络层实现
每个层对象只描述结构（无状态），参数由外部 ParamStore 按层索引保存。
张量布局统一为 (batch, length, channels) 或 (batch, units)。
"""
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from core.protocols import Params, Shape


# ---- 激活函数（导数均用输出表示，缓存只需保留输出） ----

def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0)


def elu(z: np.ndarray) -> np.ndarray:
    """alpha=1 的 ELU：x>0 取 x，否则 e^x - 1"""
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0)))


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


_ACTIVATIONS = {"relu": relu, "elu": elu, "linear": lambda z: z, "softmax": softmax}


def activate(name: str, z: np.ndarray) -> np.ndarray:
    return _ACTIVATIONS[name](z)


def activation_backward(name: str, y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """给定激活输出 y 与上游梯度 dy，返回对激活前输入的梯度"""
    if name == "relu":
        return dy * (y > 0)
    if name == "elu":
        # y = e^z - 1 (z<=0) => dy/dz = y + 1
        return dy * np.where(y > 0, 1, y + 1)
    if name == "softmax":
        return y * (dy - np.sum(dy * y, axis=-1, keepdims=True))
    return dy


def glorot_uniform(
    shape: Shape, fan_in: int, fan_out: int, rng: np.random.Generator, dtype: np.dtype
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class _ParamLayer:
    """参数数量与初始化的公共实现：子类只需给出 param_shapes"""

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        return {}

    def param_count(self, in_shape: Shape) -> int:
        return int(sum(np.prod(shape) for shape in self.param_shapes(in_shape).values()))

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        return {}


@dataclass(frozen=True)
class Conv1D(_ParamLayer):
    """步长1、same填充的一维卷积，激活函数内置"""
    filters: int
    kernel: int
    activation: str = "relu"
    kind: ClassVar[str] = "Conv1D"

    def output_shape(self, in_shape: Shape) -> Shape:
        return (in_shape[0], self.filters)

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        return {"W": (self.kernel, in_shape[1], self.filters), "b": (self.filters,)}

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        channels = in_shape[1]
        return {
            "W": glorot_uniform(
                (self.kernel, channels, self.filters),
                self.kernel * channels,
                self.kernel * self.filters,
                rng,
                dtype,
            ),
            "b": np.zeros(self.filters, dtype=dtype),
        }

    def _pads(self) -> tuple[int, int]:
        left = (self.kernel - 1) // 2
        return left, self.kernel - 1 - left

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        length = x.shape[1]
        left, right = self._pads()
        padded = np.pad(x, ((0, 0), (left, right), (0, 0)))
        weights = params["W"]
        z = np.broadcast_to(params["b"], (x.shape[0], length, self.filters)).copy()
        for tap in range(self.kernel):
            z += padded[:, tap:tap + length, :] @ weights[tap]
        y = activate(self.activation, z)
        return y, (padded, y)

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        padded, y = cache
        batch, length, _ = y.shape
        channels = padded.shape[2]
        weights = params["W"]
        dz = activation_backward(self.activation, y, dy)
        dz_flat = dz.reshape(-1, self.filters)

        d_weights = np.empty_like(weights)
        d_padded = np.zeros_like(padded)
        for tap in range(self.kernel):
            window = padded[:, tap:tap + length, :].reshape(-1, channels)
            d_weights[tap] = window.T @ dz_flat
            d_padded[:, tap:tap + length, :] += dz @ weights[tap].T

        left, _ = self._pads()
        dx = d_padded[:, left:left + length, :]
        return dx, {"W": d_weights, "b": dz.sum(axis=(0, 1))}


@dataclass(frozen=True)
class MaxPool1D(_ParamLayer):
    """池化窗口2、步长2，末尾不足一个窗口的部分丢弃"""
    pool: int = 2
    kind: ClassVar[str] = "MaxPooling1D"

    def output_shape(self, in_shape: Shape) -> Shape:
        return (in_shape[0] // self.pool, in_shape[1])

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        batch, length, channels = x.shape
        out_len = length // self.pool
        grouped = x[:, : out_len * self.pool].reshape(batch, out_len, self.pool, channels)
        index = np.argmax(grouped, axis=2)[:, :, None, :]
        y = np.take_along_axis(grouped, index, axis=2)[:, :, 0, :]
        return y, (x.shape, index)

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        in_shape, index = cache
        batch, length, channels = in_shape
        out_len = dy.shape[1]
        grouped = np.zeros((batch, out_len, self.pool, channels), dtype=dy.dtype)
        np.put_along_axis(grouped, index, dy[:, :, None, :], axis=2)
        dx = np.zeros(in_shape, dtype=dy.dtype)
        dx[:, : out_len * self.pool] = grouped.reshape(batch, out_len * self.pool, channels)
        return dx, {}


@dataclass(frozen=True)
class BatchNorm(_ParamLayer):
    """
    沿最后一维（通道）归一化
    训练模式使用批统计量并就地更新滑动统计量，推理模式使用滑动统计量
    """
    momentum: float = 0.99
    epsilon: float = 1e-3
    kind: ClassVar[str] = "BatchNormalization"

    def output_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        channels = (in_shape[-1],)
        return {"gamma": channels, "beta": channels, "moving_mean": channels, "moving_var": channels}

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        channels = in_shape[-1]
        return {
            "gamma": np.ones(channels, dtype=dtype),
            "beta": np.zeros(channels, dtype=dtype),
            "moving_mean": np.zeros(channels, dtype=dtype),
            "moving_var": np.ones(channels, dtype=dtype),
        }

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        axes = tuple(range(x.ndim - 1))
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            params["moving_mean"][...] = self.momentum * params["moving_mean"] + (1 - self.momentum) * mean
            params["moving_var"][...] = self.momentum * params["moving_var"] + (1 - self.momentum) * var
        else:
            mean = params["moving_mean"]
            var = params["moving_var"]
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        x_hat = (x - mean) * inv_std
        y = params["gamma"] * x_hat + params["beta"]
        return y, (x_hat, inv_std)

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        x_hat, inv_std = cache
        axes = tuple(range(dy.ndim - 1))
        count = dy.size // dy.shape[-1]
        d_gamma = np.sum(dy * x_hat, axis=axes)
        d_beta = np.sum(dy, axis=axes)
        d_xhat = dy * params["gamma"]
        dx = (inv_std / count) * (
            count * d_xhat
            - np.sum(d_xhat, axis=axes)
            - x_hat * np.sum(d_xhat * x_hat, axis=axes)
        )
        return dx, {"gamma": d_gamma, "beta": d_beta}


@dataclass(frozen=True)
class Dropout(_ParamLayer):
    """训练模式按 rate 置零并把保留单元放大 1/(1-rate)，推理模式为恒等映射"""
    rate: float = 0.2
    kind: ClassVar[str] = "Dropout"

    def output_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        if not training or self.rate == 0:
            return x, None
        mask = (rng.random(x.shape) >= self.rate).astype(x.dtype) / x.dtype.type(1.0 - self.rate)
        return x * mask, mask

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        if cache is None:
            return dy, {}
        return dy * cache, {}


@dataclass(frozen=True)
class LSTM(_ParamLayer):
    """
    LSTM层，门顺序 i, f, c, o；门激活 sigmoid，候选/输出激活 tanh
    return_sequences 为真时输出整段序列，否则只输出最后时刻的隐状态
    """
    units: int
    return_sequences: bool = False
    kind: ClassVar[str] = "LSTM"

    def output_shape(self, in_shape: Shape) -> Shape:
        return (in_shape[0], self.units) if self.return_sequences else (self.units,)

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        gates = 4 * self.units
        return {
            "kernel": (in_shape[-1], gates),
            "recurrent_kernel": (self.units, gates),
            "bias": (gates,),
        }

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        features, units = in_shape[-1], self.units
        bias = np.zeros(4 * units, dtype=dtype)
        bias[units:2 * units] = 1.0  # 遗忘门偏置
        return {
            "kernel": glorot_uniform((features, 4 * units), features, 4 * units, rng, dtype),
            "recurrent_kernel": glorot_uniform((units, 4 * units), units, 4 * units, rng, dtype),
            "bias": bias,
        }

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        batch, steps, _ = x.shape
        u = self.units
        recurrent = params["recurrent_kernel"]
        projected = x @ params["kernel"] + params["bias"]

        gates = np.empty((steps, batch, 4 * u), dtype=x.dtype)
        cells = np.empty((steps, batch, u), dtype=x.dtype)
        hidden = np.empty((steps, batch, u), dtype=x.dtype)
        h = np.zeros((batch, u), dtype=x.dtype)
        c = np.zeros((batch, u), dtype=x.dtype)
        for t in range(steps):
            z = projected[:, t] + h @ recurrent
            g = gates[t]
            g[:, : 2 * u] = sigmoid(z[:, : 2 * u])
            g[:, 2 * u:3 * u] = np.tanh(z[:, 2 * u:3 * u])
            g[:, 3 * u:] = sigmoid(z[:, 3 * u:])
            c = g[:, u:2 * u] * c + g[:, :u] * g[:, 2 * u:3 * u]
            h = g[:, 3 * u:] * np.tanh(c)
            cells[t] = c
            hidden[t] = h

        y = hidden.transpose(1, 0, 2).copy() if self.return_sequences else h.copy()
        return y, (x, gates, cells, hidden)

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        x, gates, cells, hidden = cache
        steps, batch, u = hidden.shape
        recurrent = params["recurrent_kernel"]

        if self.return_sequences:
            d_hidden = dy.transpose(1, 0, 2)
        else:
            d_hidden = np.zeros_like(hidden)
            d_hidden[-1] = dy

        d_gates = np.empty_like(gates)
        dh_next = np.zeros((batch, u), dtype=hidden.dtype)
        dc_next = np.zeros((batch, u), dtype=hidden.dtype)
        zeros = np.zeros((batch, u), dtype=hidden.dtype)
        for t in reversed(range(steps)):
            g = gates[t]
            i, f, cand, o = g[:, :u], g[:, u:2 * u], g[:, 2 * u:3 * u], g[:, 3 * u:]
            c_prev = cells[t - 1] if t > 0 else zeros
            tanh_c = np.tanh(cells[t])

            dh = d_hidden[t] + dh_next
            dc = dc_next + dh * o * (1 - tanh_c**2)
            dz = d_gates[t]
            dz[:, :u] = dc * cand * i * (1 - i)
            dz[:, u:2 * u] = dc * c_prev * f * (1 - f)
            dz[:, 2 * u:3 * u] = dc * i * (1 - cand**2)
            dz[:, 3 * u:] = dh * tanh_c * o * (1 - o)

            dc_next = dc * f
            dh_next = dz @ recurrent.T

        features = x.shape[2]
        dz_bt = d_gates.transpose(1, 0, 2)  # (batch, steps, 4u)
        h_prev = np.concatenate([zeros[None], hidden[:-1]], axis=0)
        grads = {
            "kernel": x.reshape(-1, features).T @ dz_bt.reshape(-1, 4 * u),
            "recurrent_kernel": h_prev.reshape(-1, u).T @ d_gates.reshape(-1, 4 * u),
            "bias": d_gates.sum(axis=(0, 1)),
        }
        dx = dz_bt @ params["kernel"].T
        return dx, grads


@dataclass(frozen=True)
class Dense(_ParamLayer):
    """全连接层，激活函数 relu / elu / softmax / linear"""
    units: int
    activation: str = "elu"
    kind: ClassVar[str] = "Dense"

    def output_shape(self, in_shape: Shape) -> Shape:
        return (self.units,)

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        return {"W": (in_shape[-1], self.units), "b": (self.units,)}

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        fan_in = in_shape[-1]
        return {
            "W": glorot_uniform((fan_in, self.units), fan_in, self.units, rng, dtype),
            "b": np.zeros(self.units, dtype=dtype),
        }

    def forward(self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator):
        y = activate(self.activation, x @ params["W"] + params["b"])
        return y, (x, y)

    def backward(self, params: Params, cache: Any, dy: np.ndarray):
        x, y = cache
        dz = activation_backward(self.activation, y, dy)
        return dz @ params["W"].T, {"W": x.T @ dz, "b": dz.sum(axis=0)}
