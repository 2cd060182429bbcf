"""
Adam 优化器
"""
from dataclasses import dataclass, field

import numpy as np

from .models import ParamStore

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class AdamState:
    """一阶/二阶矩估计，按 (层索引, 参数名) 惰性创建"""
    step: int = 0
    m: dict[tuple[int, str], np.ndarray] = field(default_factory=dict)
    v: dict[tuple[int, str], np.ndarray] = field(default_factory=dict)


def adam_step(
    params: ParamStore,
    grads: list[dict[str, np.ndarray]],
    state: AdamState,
    lr: float,
    beta1: float = BETA1,
    beta2: float = BETA2,
    eps: float = EPSILON,
) -> AdamState:
    """
    带偏差校正的 Adam 更新，就地修改 params

    只有出现在 grads 中的参数会被更新（BatchNorm 滑动统计量不在其中）。
    """
    state.step += 1
    t = state.step
    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t
    for index, layer_grads in enumerate(grads):
        for name, grad in layer_grads.items():
            key = (index, name)
            if key not in state.m:
                state.m[key] = np.zeros_like(grad)
                state.v[key] = np.zeros_like(grad)
            m = state.m[key]
            v = state.v[key]
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            m_hat = m / correction1
            v_hat = v / correction2
            target = params[index][name]
            target -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(target.dtype)
    return state
