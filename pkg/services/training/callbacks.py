"""
学习率平台衰减与早停
两者各自维护计数器，均以验证准确率提升超过 min_delta 作为“有提升”
"""
from typing import Sequence

from .models import StopDecision, TrainConfig, TrainHistory


def _val_accuracies(history: TrainHistory | Sequence[float]) -> list[float]:
    if isinstance(history, TrainHistory):
        return history.val_accuracies()
    return list(history)


class PlateauScheduler:
    """验证准确率连续 patience 轮无提升时，学习率乘以 factor（不低于 min_lr）"""

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.lr = cfg.lr0
        self.best = float("-inf")
        self.wait = 0

    def update(self, val_acc: float) -> float:
        """记录一轮的验证准确率，返回下一轮使用的学习率"""
        if val_acc > self.best + self.cfg.min_delta:
            self.best = val_acc
            self.wait = 0
        else:
            self.wait += 1
            if self.wait >= self.cfg.plateau_patience:
                self.lr = max(self.lr * self.cfg.plateau_factor, self.cfg.min_lr)
                self.wait = 0
        return self.lr


class EarlyStopping:
    """验证准确率连续 patience 轮无提升时停止，并记住最佳轮次"""

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.best = float("-inf")
        self.best_epoch = -1
        self.wait = 0

    def update(self, epoch: int, val_acc: float) -> bool:
        """
        记录一轮的验证准确率

        Returns:
            bool: 本轮是否为新的最佳轮次
        """
        if val_acc > self.best + self.cfg.min_delta:
            self.best = val_acc
            self.best_epoch = epoch
            self.wait = 0
            return True
        self.wait += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.wait >= self.cfg.early_stop_patience


def lr_schedule_step(history: TrainHistory | Sequence[float], cfg: TrainConfig) -> float:
    """
    按历史验证准确率重放平台衰减规则

    Returns:
        float: 最近一轮结束后的学习率
    """
    accuracies = _val_accuracies(history)
    if not accuracies:
        raise ValueError("至少需要一轮训练记录")
    scheduler = PlateauScheduler(cfg)
    for acc in accuracies:
        scheduler.update(acc)
    return scheduler.lr


def early_stop_check(history: TrainHistory | Sequence[float], cfg: TrainConfig) -> StopDecision:
    """按历史验证准确率判断是否应当早停"""
    accuracies = _val_accuracies(history)
    if not accuracies:
        raise ValueError("至少需要一轮训练记录")
    stopper = EarlyStopping(cfg)
    for epoch, acc in enumerate(accuracies):
        stopper.update(epoch, acc)
    return StopDecision.STOP if stopper.should_stop else StopDecision.CONTINUE
