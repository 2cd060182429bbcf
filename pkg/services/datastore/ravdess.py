"""
RAVDESS 文件名解析与目录扫描

文件名形如 03-01-05-01-02-01-12.wav，七个两位数字字段，第三个字段为情感编码。
"""
from pathlib import Path

from core.exceptions import BadFilename, EmptyDataset, UnknownEmotionCode
from core.models import EmotionLabel, ManifestEntry
from infrastructure.logging import get_logger

logger = get_logger(__name__)

CALM_CODE = "02"

EMOTION_CODES: dict[str, EmotionLabel] = {
    "01": EmotionLabel.NEUTRAL,
    CALM_CODE: EmotionLabel.NEUTRAL,  # calm 并入 neutral
    "03": EmotionLabel.HAPPY,
    "04": EmotionLabel.SAD,
    "05": EmotionLabel.ANGRY,
    "06": EmotionLabel.FEAR,
    "07": EmotionLabel.DISGUST,
    "08": EmotionLabel.SURPRISE,
}


def _emotion_field(name: str) -> str:
    stem = Path(name).stem
    fields = stem.split("-")
    if len(fields) != 7 or not all(len(f) == 2 and f.isdigit() for f in fields):
        raise BadFilename("文件名应为7个以'-'分隔的两位数字字段", name)
    return fields[2]


def is_calm(name: str) -> bool:
    return _emotion_field(name) == CALM_CODE


def parse_ravdess_filename(name: str) -> EmotionLabel:
    """
    解析 RAVDESS 文件名中的情感编码

    Args:
        name: 文件名或路径

    Returns:
        EmotionLabel: 七类标签之一（calm 归入 neutral）

    Raises:
        BadFilename: 字段数量或格式不对
        UnknownEmotionCode: 编码不在 01-08 之内
    """
    code = _emotion_field(name)
    if code not in EMOTION_CODES:
        raise UnknownEmotionCode(f"未知的情感编码 {code}", name)
    return EMOTION_CODES[code]


def scan_ravdess_dir(root: str | Path, drop_calm: bool = False) -> list[ManifestEntry]:
    """
    递归扫描目录下的 *.wav，按文件名解析标签，文件名主干作为 clip_id

    Args:
        root: 语料根目录
        drop_calm: 为真时跳过 calm 片段，否则并入 neutral

    Returns:
        list: 按路径排序的清单条目
    """
    root = Path(root)
    files = sorted(p for p in root.rglob("*") if p.suffix.lower() == ".wav")
    entries = []
    skipped = 0
    for path in files:
        if drop_calm and is_calm(path.name):
            skipped += 1
            continue
        label = parse_ravdess_filename(path.name)
        entries.append(ManifestEntry(path=str(path), label=label, clip_id=path.stem))

    if not entries:
        raise EmptyDataset("目录中没有可用的 RAVDESS 音频", str(root))
    logger.info("ravdess", f"扫描到 {len(entries)} 个片段", skipped_calm=skipped)
    return entries
