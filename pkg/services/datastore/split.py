"""
按片段分层划分训练/验证/测试集
同一片段的全部增强变体共享 clip_id，因此总落在同一个子集中
"""
from collections import defaultdict
from typing import Iterable, Protocol

import numpy as np

from core.models import EmotionLabel

from .models import SplitResult


class _Labelled(Protocol):
    clip_id: str
    label: EmotionLabel


def _round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


def stratified_split(
    entries: Iterable[_Labelled],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> SplitResult:
    """
    在唯一 clip_id 上逐类别划分

    每个类别内：n_val = round(n * r_val)，n_test = round(n * r_test)，其余进入训练集。

    Args:
        entries: 清单条目或特征记录（需有 clip_id 与 label）
        ratios: (train, val, test)，和为1
        seed: 打乱种子

    Returns:
        SplitResult: 三个互不相交的 clip_id 集合
    """
    if abs(sum(ratios) - 1.0) > 1e-9 or any(r < 0 for r in ratios):
        raise ValueError(f"划分比例之和必须为1，实际为 {ratios}")
    _, r_val, r_test = ratios

    by_class: dict[int, set[str]] = defaultdict(set)
    owner: dict[str, int] = {}
    for entry in entries:
        label = int(entry.label)
        if owner.setdefault(entry.clip_id, label) != label:
            raise ValueError(f"片段 {entry.clip_id} 的记录标签不一致")
        by_class[label].add(entry.clip_id)

    rng = np.random.default_rng(seed)
    train, val, test = set(), set(), set()
    for label in sorted(by_class):
        clips = sorted(by_class[label])
        order = [clips[i] for i in rng.permutation(len(clips))]
        n_test = min(_round_half_up(len(clips) * r_test), len(clips))
        n_val = min(_round_half_up(len(clips) * r_val), len(clips) - n_test)
        test.update(order[:n_test])
        val.update(order[n_test:n_test + n_val])
        train.update(order[n_test + n_val:])

    return SplitResult(train=frozenset(train), val=frozenset(val), test=frozenset(test))
