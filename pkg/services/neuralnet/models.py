"""
神经网络专用数据模型
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

import numpy as np

from core.protocols import Layer, Params, Shape
from infrastructure.config.settings import ModelConfig

__all__ = [
    "Activation",
    "ForwardResult",
    "LayerSummary",
    "ModelConfig",
    "ModelSpec",
    "ParamStore",
]


class Activation(str, Enum):
    """卷积/全连接隐藏层激活函数，值即检查点中的标签"""
    RELU = "relu"
    ELU = "elu"

    @property
    def tag(self) -> int:
        return 0 if self is Activation.RELU else 1

    @classmethod
    def from_tag(cls, tag: int) -> "Activation":
        if tag == 0:
            return cls.RELU
        if tag == 1:
            return cls.ELU
        raise ValueError(f"未知的激活函数标签: {tag}")


@dataclass(frozen=True)
class LayerSummary:
    """模型结构表中的一行"""
    index: int
    kind: str
    output_shape: Shape
    params: int


@dataclass(frozen=True)
class ModelSpec:
    """
    网络结构描述：有序层列表 + 输入形状
    不含参数，参数由 ParamStore 持有
    """
    layers: tuple[Layer, ...]
    input_shape: Shape
    conv_activation: Activation
    dense_activation: Activation
    num_classes: int
    dtype: str = "float32"

    def shapes(self) -> list[Shape]:
        """每层的输入形状，末尾附加最终输出形状"""
        shapes = [self.input_shape]
        for layer in self.layers:
            shapes.append(layer.output_shape(shapes[-1]))
        return shapes

    def summary(self) -> list[LayerSummary]:
        shapes = self.shapes()
        return [
            LayerSummary(
                index=i,
                kind=layer.kind,
                output_shape=shapes[i + 1],
                params=layer.param_count(shapes[i]),
            )
            for i, layer in enumerate(self.layers)
        ]

    @property
    def feature_dim(self) -> int:
        return self.input_shape[0]


@dataclass
class ParamStore:
    """
    按层索引保存参数，每层一个 名称->数组 的字典（无参数层为空字典）
    """
    layers: list[Params]

    def __getitem__(self, index: int) -> Params:
        return self.layers[index]

    def __len__(self) -> int:
        return len(self.layers)

    def items(self) -> Iterator[tuple[int, str, np.ndarray]]:
        for index, params in enumerate(self.layers):
            for name, array in params.items():
                yield index, name, array

    def total(self) -> int:
        return int(sum(array.size for _, _, array in self.items()))

    def copy(self) -> "ParamStore":
        return ParamStore([{name: array.copy() for name, array in p.items()} for p in self.layers])


@dataclass
class ForwardResult:
    """前向传播结果：类别概率及每层缓存"""
    probs: np.ndarray
    caches: list[Any] = field(default_factory=list)
    training: bool = False
