"""
协议定义
定义随机源与网络层必须实现的接口标准
"""
from typing import Any, Protocol

import numpy as np

Shape = tuple[int, ...]
Params = dict[str, np.ndarray]


class RandomSource(Protocol):
    """增强流水线使用的可复现随机源"""

    def uniform(self) -> float:
        """返回 [0, 1) 上的一个均匀分布样本"""
        ...

    def uniforms(self, count: int) -> np.ndarray:
        """返回 count 个 [0, 1) 均匀分布样本"""
        ...

    def gaussians(self, count: int) -> np.ndarray:
        """返回 count 个标准正态分布样本"""
        ...


class Layer(Protocol):
    """
    网络层的标准接口协议

    形状均不含 batch 维，例如 (length, channels) 或 (units,)。
    层对象本身无状态，参数保存在外部的 ParamStore 中。
    """

    kind: str

    def output_shape(self, in_shape: Shape) -> Shape:
        """
        根据输入形状推导输出形状

        Args:
            in_shape: 输入形状（不含batch维）

        Returns:
            Shape: 输出形状
        """
        ...

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:
        """按固定顺序列出本层参数的名称与形状（检查点按此顺序序列化）"""
        ...

    def init_params(self, in_shape: Shape, rng: np.random.Generator, dtype: np.dtype) -> Params:
        """初始化本层参数，无参数层返回空字典"""
        ...

    def param_count(self, in_shape: Shape) -> int:
        """闭式计算参数数量"""
        ...

    def forward(
        self, params: Params, x: np.ndarray, training: bool, rng: np.random.Generator
    ) -> tuple[np.ndarray, Any]:
        """
        前向传播

        Returns:
            tuple: (输出, 反向传播所需缓存)
        """
        ...

    def backward(self, params: Params, cache: Any, dy: np.ndarray) -> tuple[np.ndarray, Params]:
        """
        反向传播

        Returns:
            tuple: (对输入的梯度, 对可训练参数的梯度)
        """
        ...
