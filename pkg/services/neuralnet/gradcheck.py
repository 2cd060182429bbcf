"""
有限差分梯度校验
每次前向使用同一种子的随机源，保证 Dropout 掩码一致
"""
from dataclasses import dataclass

import numpy as np

from .models import ModelSpec, ParamStore
from .network import backward, cross_entropy, forward

DEFAULT_EPS = 1e-4
# 解析梯度与数值梯度都接近0时，相对误差的分母下限
DENOMINATOR_FLOOR = 1e-7


@dataclass(frozen=True)
class GradCheckResult:
    layer: int
    name: str
    max_rel_error: float
    checked: int


def _loss(spec: ModelSpec, params: ParamStore, x: np.ndarray, labels: np.ndarray, seed: int) -> float:
    result = forward(spec, params, x, mode="train", rng=np.random.default_rng(seed))
    return cross_entropy(result.probs, labels)


def gradient_check(
    spec: ModelSpec,
    params: ParamStore,
    x: np.ndarray,
    labels: np.ndarray,
    eps: float = DEFAULT_EPS,
    seed: int = 0,
    max_elements: int | None = None,
    floor: float = DENOMINATOR_FLOOR,
) -> list[GradCheckResult]:
    """
    对比反向传播梯度与中心差分梯度

    Args:
        spec: 网络结构（建议 float64）
        params: 参数，校验过程中会被临时扰动后还原
        max_elements: 每个参数张量最多校验的元素个数，为空时全部校验
        floor: 相对误差分母下限，梯度本身接近0时退化为绝对误差

    Returns:
        list: 每个可训练参数张量的最大相对误差
    """
    result = forward(spec, params, x, mode="train", rng=np.random.default_rng(seed))
    grads = backward(spec, params, result, labels)

    report = []
    for index, layer_grads in enumerate(grads):
        for name, analytic in layer_grads.items():
            target = params[index][name]
            flat = target.reshape(-1)
            positions = range(flat.size) if max_elements is None else range(min(flat.size, max_elements))
            analytic_flat = analytic.reshape(-1)
            worst = 0.0
            for pos in positions:
                original = flat[pos]
                flat[pos] = original + eps
                plus = _loss(spec, params, x, labels, seed)
                flat[pos] = original - eps
                minus = _loss(spec, params, x, labels, seed)
                flat[pos] = original
                numeric = (plus - minus) / (2 * eps)
                denom = max(abs(numeric) + abs(analytic_flat[pos]), floor)
                worst = max(worst, abs(numeric - analytic_flat[pos]) / denom)
            report.append(GradCheckResult(index, name, worst, len(positions)))
    return report
