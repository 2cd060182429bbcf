"""
应用层核心实现
流水线把各服务串联起来：读取 -> 规范化 -> 增强 -> 特征 -> 训练/推理
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, TypeVar

import numpy as np

from .models import AudioClip, EmotionLabel, ManifestEntry

T = TypeVar("T")
R = TypeVar("R")

Progress = Callable[[int, int, ManifestEntry], None]


def map_ordered(
    func: Callable[[T], R], items: Iterable[T], threads: int = 1
) -> list[R]:
    """
    对每个元素执行 func，结果按输入顺序返回

    threads 为1时串行执行；多线程时输出与串行完全相同
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True, eq=False)
class Prediction:
    """单个文件的推理结果"""
    path: str
    probabilities: np.ndarray
    label: str


class ServiceRegistry:
    """
    服务注册表
    负责服务的注册与查找
    """

    def __init__(self):
        self._services: dict[str, object] = {}

    def register(self, name: str, service: object) -> None:
        self._services[name] = service

    def get(self, name: str):
        """
        获取服务实例

        Raises:
            KeyError: 当服务不存在时
        """
        if name not in self._services:
            raise KeyError(f"服务 '{name}' 未注册")
        return self._services[name]

    def list_services(self) -> list[str]:
        return list(self._services.keys())


class Pipeline:
    """
    流水线核心类
    提供逐文件处理的统一入口，CLI 只负责参数解析与退出码
    """

    def __init__(self, config, registry: ServiceRegistry):
        """
        Args:
            config: PipelineConfig 配置实例
            registry: 已注册 augmentation / features / training 的服务注册表
        """
        from infrastructure.logging import get_logger

        self.config = config
        self.registry = registry
        self.window = config.audio.window()
        self.logger = get_logger(__name__)

    @property
    def augmentation(self):
        return self.registry.get("augmentation")

    @property
    def features(self):
        return self.registry.get("features")

    @property
    def training(self):
        return self.registry.get("training")

    def load_canonical(self, path: str | Path) -> AudioClip:
        """读取 WAV 并规范化到固定窗口"""
        from infrastructure.audio import canonicalize, load_wav

        return canonicalize(load_wav(path), self.window)

    def variants(self, entry: ManifestEntry, seed: int, augment: bool = True) -> list[AudioClip]:
        """返回片段的全部变体（不增强时只有变体0）"""
        from services.augmentation import clip_seed

        clip = self.load_canonical(entry.path)
        if not augment:
            return [clip]
        return self.augmentation.generate_variants(clip, clip_seed(seed, entry.clip_id))

    def featurize(self, entry: ManifestEntry, seed: int, augment: bool = True) -> list:
        """
        单个清单条目 -> 特征记录列表（内存中增强，不写中间文件）
        """
        from services.datastore import FeatureRecord

        return [
            FeatureRecord(
                clip_id=entry.clip_id,
                variant=index,
                label=entry.label,
                values=self.features.extract(variant).values.astype(np.float32),
            )
            for index, variant in enumerate(self.variants(entry, seed, augment))
        ]

    def extract(
        self,
        entries: list[ManifestEntry],
        seed: int,
        augment: bool = True,
        threads: int = 1,
        progress: Progress | None = None,
    ) -> list:
        """
        批量提取特征，记录按清单顺序、变体顺序排列

        Raises:
            AudioError: 任一文件无法解码（异常中带有文件路径）
        """
        total = len(entries)

        def work(item: tuple[int, ManifestEntry]) -> list:
            index, entry = item
            records = self.featurize(entry, seed, augment)
            if progress is not None:
                progress(index, total, entry)
            return records

        batches = map_ordered(work, enumerate(entries), threads)
        records = [record for batch in batches for record in batch]
        self.logger.info("extract", "特征提取完成", clips=total, records=len(records))
        return records

    def augment_to_dir(
        self,
        entries: list[ManifestEntry],
        out_dir: str | Path,
        seed: int,
        threads: int = 1,
        progress: Progress | None = None,
    ) -> list[Path]:
        """
        为每个片段写出10个变体，文件名 <stem>__v<k>.wav
        """
        from infrastructure.audio import save_wav

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        total = len(entries)

        def work(item: tuple[int, ManifestEntry]) -> list[Path]:
            index, entry = item
            stem = Path(entry.path).stem
            written = []
            for k, variant in enumerate(self.variants(entry, seed, augment=True)):
                target = out / f"{stem}__v{k}.wav"
                save_wav(variant, target)
                written.append(target)
            if progress is not None:
                progress(index, total, entry)
            return written

        batches = map_ordered(work, enumerate(entries), threads)
        return [path for batch in batches for path in batch]

    def predict_file(self, wav_path: str | Path, checkpoint) -> Prediction:
        """
        单文件推理：读取 -> 规范化 -> 特征 -> 检查点标准化 -> 前向(推理模式)

        Args:
            checkpoint: (ModelSpec, Checkpoint) 二元组
        """
        from services.neuralnet import forward

        spec, ckpt = checkpoint
        values = self.features.extract(self.load_canonical(wav_path)).values
        standardized = ((values - ckpt.mean) / ckpt.std).astype(np.float32)
        probs = forward(spec, ckpt.params, standardized[None, :], mode="infer").probs[0]
        label = EmotionLabel(int(np.argmax(probs))).label_name
        return Prediction(path=str(wav_path), probabilities=probs.astype(np.float64), label=label)


class PipelineBuilder:
    """
    流水线构建器
    负责按配置创建服务并注册
    """

    @staticmethod
    def create(config=None) -> Pipeline:
        """
        创建完整配置的流水线实例

        Args:
            config: PipelineConfig，为空时使用全局配置
        """
        from infrastructure.config import get_settings
        from infrastructure.logging import get_logger
        from services.augmentation import AugmentationService
        from services.features import FeatureService
        from services.training import TrainingService

        logger = get_logger(__name__)
        config = config or get_settings()

        registry = ServiceRegistry()
        registry.register("augmentation", AugmentationService(config.augment))
        registry.register("features", FeatureService(config.features))
        registry.register("training", TrainingService(config.train, config.model))
        logger.debug("application", f"已注册服务: {', '.join(registry.list_services())}")

        return Pipeline(config, registry)
