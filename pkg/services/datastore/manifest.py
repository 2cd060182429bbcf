"""
数据清单读写（CSV，表头 path,label,clip_id）
"""
from pathlib import Path

import pandas as pd

from core.exceptions import BadHeader, DuplicatePath, EmptyDataset, UnknownLabel
from core.models import EmotionLabel, ManifestEntry
from infrastructure.logging import get_logger

logger = get_logger(__name__)

MANIFEST_COLUMNS = ["path", "label", "clip_id"]


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """
    读取数据清单，相对路径相对于清单所在目录解析

    Args:
        path: 清单 CSV 路径

    Returns:
        list: 按文件顺序排列的清单条目

    Raises:
        BadHeader: 表头不是 path,label,clip_id
        UnknownLabel: 标签不在七类情感名称之内（如 calm 需调用方预先映射）
        DuplicatePath: 同一路径出现多次
    """
    manifest_path = Path(path)
    source = str(manifest_path)
    try:
        frame = pd.read_csv(manifest_path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise BadHeader("清单为空，缺少表头", source) from e

    columns = [str(c).strip() for c in frame.columns]
    if columns != MANIFEST_COLUMNS:
        raise BadHeader(f"表头应为 {','.join(MANIFEST_COLUMNS)}，实际为 {','.join(columns)}", source)
    frame.columns = MANIFEST_COLUMNS
    frame = frame.fillna("")

    base = manifest_path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for row_no, row in enumerate(frame.itertuples(index=False), start=2):
        raw_label = row.label.strip().lower()
        if raw_label not in EmotionLabel.names():
            raise UnknownLabel(f"第 {row_no} 行标签 '{row.label}' 不在七类情感之内", source)

        audio_path = Path(row.path.strip())
        if not audio_path.is_absolute():
            audio_path = base / audio_path
        resolved = str(audio_path)
        if resolved in seen:
            raise DuplicatePath(f"第 {row_no} 行路径重复 '{row.path}'", source)
        seen.add(resolved)

        entries.append(
            ManifestEntry(
                path=resolved,
                label=EmotionLabel.from_name(raw_label),
                clip_id=row.clip_id.strip(),
            )
        )

    logger.debug("manifest", f"读取清单 {source}: {len(entries)} 条")
    return entries


def require_entries(entries: list[ManifestEntry], source: str) -> list[ManifestEntry]:
    if not entries:
        raise EmptyDataset("清单中没有任何条目", source)
    return entries


def write_manifest(entries: list[ManifestEntry], path: str | Path, relative: bool = True) -> None:
    """
    写出数据清单

    Args:
        relative: 为真时把位于清单目录下的路径写成相对路径
    """
    manifest_path = Path(path)
    base = manifest_path.parent.resolve()
    rows = []
    for entry in entries:
        audio_path = Path(entry.path)
        if relative:
            try:
                audio_path = audio_path.resolve().relative_to(base)
            except ValueError:
                pass
        rows.append({"path": audio_path.as_posix(), "label": entry.label.label_name, "clip_id": entry.clip_id})

    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=MANIFEST_COLUMNS).to_csv(manifest_path, index=False)
