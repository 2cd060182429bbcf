"""
Conv1D-LSTM 网络的构建、前向与反向传播
"""
from typing import Literal

import numpy as np

from core.exceptions import NonFiniteActivation, ShapeMismatch
from core.models import NUM_CLASSES
from infrastructure.logging import get_logger

from .layers import LSTM, BatchNorm, Conv1D, Dense, Dropout, MaxPool1D
from .models import Activation, ForwardResult, ModelConfig, ModelSpec, ParamStore

logger = get_logger(__name__)

PROB_FLOOR = 1e-12

Mode = Literal["train", "infer"]


def build_spec(config: ModelConfig | None = None, num_classes: int = NUM_CLASSES) -> ModelSpec:
    """
    按配置组装23层结构：
    3个卷积块 -> 2个LSTM -> 3个全连接块 -> softmax 输出
    """
    cfg = config or ModelConfig()
    act = cfg.conv_activation
    dense_act = cfg.dense_activation
    f1, f2, f3 = cfg.conv_filters
    k1, k2, k3 = cfg.conv_kernels
    u1, u2 = cfg.lstm_units
    d1, d2, d3 = cfg.dense_units

    def bn() -> BatchNorm:
        return BatchNorm(momentum=cfg.bn_momentum, epsilon=cfg.bn_epsilon)

    def drop() -> Dropout:
        return Dropout(rate=cfg.dropout)

    layers = (
        Conv1D(f1, k1, act), MaxPool1D(), bn(), drop(),
        Conv1D(f2, k2, act), bn(), MaxPool1D(), drop(),
        Conv1D(f3, k3, act), bn(), MaxPool1D(),
        LSTM(u1, return_sequences=True), drop(),
        LSTM(u2, return_sequences=False), drop(),
        Dense(d1, dense_act), bn(),
        Dense(d2, dense_act), bn(),
        Dense(d3, dense_act), bn(), drop(),
        Dense(num_classes, "softmax"),
    )
    return ModelSpec(
        layers=layers,
        input_shape=(cfg.input_length, 1),
        conv_activation=Activation(act),
        dense_activation=Activation(dense_act),
        num_classes=num_classes,
        dtype=cfg.dtype,
    )


def init_params(spec: ModelSpec, seed: int) -> ParamStore:
    """Glorot均匀初始化权重，偏置置零（LSTM遗忘门偏置为1）"""
    rng = np.random.default_rng(seed)
    dtype = np.dtype(spec.dtype)
    shapes = spec.shapes()
    return ParamStore([layer.init_params(shapes[i], rng, dtype) for i, layer in enumerate(spec.layers)])


def build_model(
    conv_activation: str = "relu",
    seed: int = 0,
    config: ModelConfig | None = None,
) -> tuple[ModelSpec, ParamStore]:
    """
    构建网络结构并初始化参数

    Args:
        conv_activation: 卷积层激活函数 relu / elu，覆盖 config 中的值
        seed: 初始化种子
        config: 结构配置，为空时使用默认的全尺寸网络

    Returns:
        tuple: (ModelSpec, ParamStore)
    """
    cfg = (config or ModelConfig()).model_copy(update={"conv_activation": conv_activation})
    spec = build_spec(cfg)
    params = init_params(spec, seed)
    logger.debug("neuralnet", f"网络构建完成: {len(spec.layers)} 层, {params.total()} 个参数")
    return spec, params


def param_count(spec: ModelSpec) -> list[int]:
    """逐层参数数量（闭式计算）"""
    return [row.params for row in spec.summary()]


def _prepare_batch(spec: ModelSpec, batch: np.ndarray) -> np.ndarray:
    x = np.asarray(batch, dtype=np.dtype(spec.dtype))
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or x.shape[1:] != tuple(spec.input_shape):
        raise ShapeMismatch(f"输入形状 {np.shape(batch)} 与网络输入 {spec.input_shape} 不一致")
    return x


def forward(
    spec: ModelSpec,
    params: ParamStore,
    batch: np.ndarray,
    mode: Mode = "infer",
    rng: np.random.Generator | None = None,
) -> ForwardResult:
    """
    前向传播

    Args:
        batch: 形状 (B, input_length) 或 (B, input_length, 1)
        mode: train 时启用 Dropout 并使用批统计量（同时更新滑动统计量）
        rng: Dropout 掩码随机源，训练模式下为空时使用种子0

    Raises:
        ShapeMismatch: 输入形状不符
        NonFiniteActivation: 任一层输出出现 NaN/Inf
    """
    training = mode == "train"
    if training and rng is None:
        rng = np.random.default_rng(0)
    x = _prepare_batch(spec, batch)
    caches = []
    for index, layer in enumerate(spec.layers):
        x, cache = layer.forward(params[index], x, training, rng)
        if not np.all(np.isfinite(x)):
            raise NonFiniteActivation(f"第 {index} 层 ({layer.kind}) 输出出现 NaN/Inf")
        caches.append(cache)
    return ForwardResult(probs=x, caches=caches, training=training)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """平均类别交叉熵，概率下限 1e-12"""
    labels = np.asarray(labels, dtype=np.int64)
    picked = probs[np.arange(labels.shape[0]), labels]
    return float(-np.mean(np.log(np.maximum(picked, PROB_FLOOR))))


def backward(
    spec: ModelSpec,
    params: ParamStore,
    result: ForwardResult,
    labels: np.ndarray,
) -> list[dict[str, np.ndarray]]:
    """
    计算平均交叉熵对全部可训练参数的梯度

    Returns:
        list: 与层一一对应的梯度字典（不含滑动统计量）
    """
    probs = result.probs
    labels = np.asarray(labels, dtype=np.int64)
    batch = probs.shape[0]
    rows = np.arange(batch)

    picked = probs[rows, labels]
    d_probs = np.zeros_like(probs)
    # 被截断到下限的概率对损失没有梯度
    d_probs[rows, labels] = np.where(
        picked > PROB_FLOOR, -1.0 / (batch * np.maximum(picked, PROB_FLOOR)), 0.0
    )

    grads: list[dict[str, np.ndarray]] = [{} for _ in spec.layers]
    dy = d_probs
    for index in reversed(range(len(spec.layers))):
        dy, grads[index] = spec.layers[index].backward(params[index], result.caches[index], dy)
    return grads


def predict(
    spec: ModelSpec, params: ParamStore, features: np.ndarray, batch_size: int = 256
) -> np.ndarray:
    """推理模式下分批计算类别概率"""
    features = np.asarray(features)
    outputs = [
        forward(spec, params, features[start:start + batch_size], mode="infer").probs
        for start in range(0, features.shape[0], batch_size)
    ]
    if not outputs:
        return np.zeros((0, spec.num_classes), dtype=np.dtype(spec.dtype))
    return np.concatenate(outputs, axis=0)
