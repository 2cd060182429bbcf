"""
训练服务实现
小批量训练循环 + 平台衰减 + 早停 + 最佳权重快照
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.exceptions import EmptyDataset, NonFiniteActivation, TrainingDiverged
from infrastructure.config.settings import ModelConfig
from infrastructure.logging import get_logger
from services.datastore import FeatureCache, SplitResult, stratified_split
from services.neuralnet import (
    AdamState,
    ModelSpec,
    ParamStore,
    adam_step,
    backward,
    build_model,
    cross_entropy,
    forward,
    predict,
)

from .callbacks import EarlyStopping, PlateauScheduler
from .metrics import evaluate
from .models import EpochRecord, EvalReport, LabelledSet, Standardizer, TrainConfig, TrainHistory

logger = get_logger(__name__)

EpochCallback = Callable[[EpochRecord], None]


def train(
    spec: ModelSpec,
    params: ParamStore,
    train_set: LabelledSet,
    val_set: LabelledSet,
    cfg: TrainConfig,
    on_epoch: EpochCallback | None = None,
) -> tuple[ParamStore, TrainHistory]:
    """
    训练网络，返回验证准确率最高轮次的参数快照

    Args:
        spec: 网络结构
        params: 初始参数（训练过程中被就地更新）
        train_set: 已标准化的训练集
        val_set: 已标准化的验证集
        cfg: 训练配置
        on_epoch: 每轮结束后的回调

    Returns:
        tuple: (最佳参数快照, 训练历史)

    Raises:
        EmptyDataset: 训练集或验证集为空
        TrainingDiverged: 损失或激活出现 NaN/Inf
    """
    if len(train_set) == 0:
        raise EmptyDataset("训练集为空")
    if len(val_set) == 0:
        raise EmptyDataset("验证集为空")

    scheduler = PlateauScheduler(cfg)
    stopper = EarlyStopping(cfg)
    adam = AdamState()
    history = TrainHistory()
    best_params = params.copy()
    n = len(train_set)

    for epoch in range(cfg.max_epochs):
        lr = scheduler.lr
        rng = np.random.default_rng([cfg.seed, epoch])
        order = rng.permutation(n)
        loss_sum, correct = 0.0, 0

        for start in range(0, n, cfg.batch_size):
            index = order[start:start + cfg.batch_size]
            labels = train_set.labels[index]
            try:
                result = forward(spec, params, train_set.features[index], mode="train", rng=rng)
            except NonFiniteActivation as e:
                raise TrainingDiverged(epoch, math.nan) from e
            loss = cross_entropy(result.probs, labels)
            if not math.isfinite(loss):
                raise TrainingDiverged(epoch, loss)
            grads = backward(spec, params, result, labels)
            adam_step(params, grads, adam, lr)
            loss_sum += loss * index.size
            correct += int(np.sum(np.argmax(result.probs, axis=1) == labels))

        try:
            val_probs = predict(spec, params, val_set.features)
        except NonFiniteActivation as e:
            raise TrainingDiverged(epoch, math.nan) from e
        val_loss = cross_entropy(val_probs, val_set.labels)
        val_acc = float(np.mean(np.argmax(val_probs, axis=1) == val_set.labels))

        record = EpochRecord(
            epoch=epoch,
            train_loss=loss_sum / n,
            train_acc=correct / n,
            val_loss=val_loss,
            val_acc=val_acc,
            lr=lr,
        )
        history.append(record)
        if stopper.update(epoch, val_acc):
            best_params = params.copy()
            history.best_epoch = epoch
        scheduler.update(val_acc)

        logger.info(
            "train",
            f"第 {epoch} 轮结束",
            train_loss=round(record.train_loss, 6),
            train_acc=round(record.train_acc, 4),
            val_loss=round(val_loss, 6),
            val_acc=round(val_acc, 4),
            lr=lr,
        )
        if on_epoch is not None:
            on_epoch(record)
        if stopper.should_stop:
            logger.info("train", f"验证准确率连续 {stopper.wait} 轮无提升，提前停止")
            break

    return best_params, history


@dataclass(eq=False)
class PreparedData:
    """划分并标准化后的数据"""
    train: LabelledSet
    val: LabelledSet
    test: LabelledSet
    standardizer: Standardizer
    split: SplitResult


@dataclass(eq=False)
class TrainedModel:
    spec: ModelSpec
    params: ParamStore
    history: TrainHistory
    standardizer: Standardizer


def _labelled(cache: FeatureCache, standardizer: Standardizer | None = None) -> LabelledSet:
    features = cache.matrix()
    if standardizer is not None:
        features = standardizer.apply(features)
    return LabelledSet(features=features, labels=cache.labels())


class TrainingService:
    """
    训练服务类
    负责从特征缓存划分数据、标准化、构建网络并训练
    """

    def __init__(self, config: TrainConfig | None = None, model_config: ModelConfig | None = None):
        self.config = config or TrainConfig()
        self.model_config = model_config or ModelConfig()
        self.service_name = "training"

    def prepare(self, cache: FeatureCache) -> PreparedData:
        """
        按 clip_id 分层划分；训练/验证集包含全部增强变体，测试集只取变体0

        验证集或测试集因样本过少为空时，退回使用训练集对应部分并给出警告
        """
        if len(cache) == 0:
            raise EmptyDataset("特征缓存为空")
        cfg = self.config
        split = stratified_split(cache.records, cfg.split_ratios, cfg.seed)

        train_cache = cache.select(split.train)
        if len(train_cache) == 0:
            raise EmptyDataset("划分后训练集为空")
        val_cache = cache.select(split.val)
        if len(val_cache) == 0:
            logger.warning("train", "验证集为空，使用训练集做验证")
            val_cache = train_cache
        test_cache = cache.select(split.test, variant=0)
        if len(test_cache) == 0:
            logger.warning("train", "测试集为空，使用训练集的原始片段做评估")
            test_cache = train_cache.select(split.train, variant=0)

        train_raw = train_cache.matrix()
        standardizer = Standardizer.fit(train_raw) if cfg.standardize else Standardizer.identity(cache.dim)
        logger.info(
            "train",
            "数据划分完成",
            train=len(train_cache),
            val=len(val_cache),
            test=len(test_cache),
        )
        return PreparedData(
            train=LabelledSet(features=standardizer.apply(train_raw), labels=train_cache.labels()),
            val=_labelled(val_cache, standardizer),
            test=_labelled(test_cache, standardizer),
            standardizer=standardizer,
            split=split,
        )

    def fit(
        self,
        data: PreparedData,
        conv_activation: str | None = None,
        on_epoch: EpochCallback | None = None,
    ) -> TrainedModel:
        activation = conv_activation or self.model_config.conv_activation
        model_cfg = self.model_config.model_copy(update={"input_length": data.train.features.shape[1]})
        spec, params = build_model(activation, seed=self.config.seed, config=model_cfg)
        logger.info("train", f"开始训练: 卷积激活 {activation}, 参数量 {params.total()}")
        best, history = train(spec, params, data.train, data.val, self.config, on_epoch)
        return TrainedModel(spec=spec, params=best, history=history, standardizer=data.standardizer)

    def evaluate(self, model: TrainedModel, dataset: LabelledSet) -> EvalReport:
        return evaluate(model.spec, model.params, dataset)
