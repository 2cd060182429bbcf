"""
特征缓存二进制格式（小端）

    "EAFV" | u16 版本=1 | u64 记录数 | u32 维度
    每条记录：u16 长度 + UTF-8 clip_id | u8 变体 | u8 标签 | f32[维度]
"""
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from core.exceptions import BadMagic, DimMismatch, FormatError, TruncatedFile, VersionMismatch
from core.models import FEATURE_DIM, NUM_CLASSES
from infrastructure.logging import get_logger

from .models import CACHE_MAGIC, CACHE_VERSION, FeatureCache, FeatureRecord

logger = get_logger(__name__)

_HEADER = struct.Struct("<4sHQI")
_ID_LEN = struct.Struct("<H")
_TAIL = struct.Struct("<BB")


def write_cache(records: Iterable[FeatureRecord], path: str | Path, dim: int = FEATURE_DIM) -> int:
    """
    写出特征缓存（单写者）

    Returns:
        int: 写入的记录数

    Raises:
        DimMismatch: 某条记录的特征长度不等于 dim
    """
    records = list(records)
    target = str(path)
    parts = [_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, len(records), dim)]
    for record in records:
        values = np.asarray(record.values)
        if values.shape != (dim,):
            raise DimMismatch(f"记录 {record.clip_id}/v{record.variant} 维度为 {values.shape}，期望 {dim}", target)
        clip_id = record.clip_id.encode("utf-8")
        if len(clip_id) > 0xFFFF:
            raise ValueError(f"clip_id 过长: {record.clip_id[:32]}...")
        parts.append(_ID_LEN.pack(len(clip_id)))
        parts.append(clip_id)
        parts.append(_TAIL.pack(record.variant, int(record.label)))
        parts.append(values.astype("<f4").tobytes())

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(b"".join(parts))
    logger.info("cache", f"写入特征缓存 {out}", records=len(records), dim=dim)
    return len(records)


def _need(data: bytes, offset: int, size: int, source: str, what: str) -> None:
    if offset + size > len(data):
        raise TruncatedFile(f"读取{what}时文件已结束 (偏移 {offset})", source)


def read_cache(path: str | Path, expected_dim: int | None = FEATURE_DIM) -> FeatureCache:
    """
    读取特征缓存（可并发读取）

    Args:
        expected_dim: 期望的特征维度，为空时接受文件中的维度

    Raises:
        BadMagic, VersionMismatch, TruncatedFile, DimMismatch
    """
    source = str(path)
    data = Path(path).read_bytes()
    if data[:4] != CACHE_MAGIC:
        raise BadMagic(f"文件标识应为 {CACHE_MAGIC!r}，实际为 {data[:4]!r}", source)
    _need(data, 0, _HEADER.size, source, "文件头")
    _magic, version, count, dim = _HEADER.unpack_from(data, 0)
    if version != CACHE_VERSION:
        raise VersionMismatch(f"不支持的缓存版本 {version}", source)
    if expected_dim is not None and dim != expected_dim:
        raise DimMismatch(f"缓存维度为 {dim}，期望 {expected_dim}", source)

    offset = _HEADER.size
    records = []
    for _ in range(count):
        _need(data, offset, _ID_LEN.size, source, "clip_id 长度")
        (id_len,) = _ID_LEN.unpack_from(data, offset)
        offset += _ID_LEN.size
        _need(data, offset, id_len + _TAIL.size + 4 * dim, source, "记录")
        clip_id = data[offset:offset + id_len].decode("utf-8")
        offset += id_len
        variant, label = _TAIL.unpack_from(data, offset)
        offset += _TAIL.size
        if label >= NUM_CLASSES:
            raise FormatError(f"记录 {clip_id} 的标签编码 {label} 超出范围", source)
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float32)
        offset += 4 * dim
        records.append(FeatureRecord(clip_id=clip_id, variant=variant, label=label, values=values))

    if offset != len(data):
        raise TruncatedFile(f"记录数与文件长度不一致，末尾多出 {len(data) - offset} 字节", source)
    return FeatureCache(records=records, dim=dim)
