"""
模型检查点读写（小端二进制）

布局：
    "EANN" | u16 版本 | u8 激活标签 (relu=0, elu=1)
    f32[dim] 标准化均值 | f32[dim] 标准化标准差
    每个有参数的层：u16 层索引 | u64 参数个数 | f32[参数个数]
参数按层内固定顺序（param_shapes 的顺序）展平拼接。
"""
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.exceptions import CheckpointError
from infrastructure.logging import get_logger

from .models import Activation, ModelSpec, ParamStore

logger = get_logger(__name__)

MAGIC = b"EANN"
VERSION = 1
_HEADER = struct.Struct("<4sHB")
_LAYER_HEADER = struct.Struct("<HQ")


@dataclass(eq=False)
class Checkpoint:
    """检查点内容：激活函数、标准化统计量与参数"""
    activation: Activation
    mean: np.ndarray
    std: np.ndarray
    params: ParamStore


def save_checkpoint(
    path: str | Path,
    spec: ModelSpec,
    params: ParamStore,
    mean: np.ndarray,
    std: np.ndarray,
) -> None:
    """写出检查点，父目录不存在时自动创建"""
    dim = spec.feature_dim
    mean = np.asarray(mean, dtype="<f4")
    std = np.asarray(std, dtype="<f4")
    if mean.shape != (dim,) or std.shape != (dim,):
        raise CheckpointError(f"标准化统计量维度应为 {dim}", str(path))

    parts = [_HEADER.pack(MAGIC, VERSION, spec.conv_activation.tag), mean.tobytes(), std.tobytes()]
    shapes = spec.shapes()
    for index, layer in enumerate(spec.layers):
        names = list(layer.param_shapes(shapes[index]))
        if not names:
            continue
        blob = np.concatenate([params[index][name].reshape(-1) for name in names]).astype("<f4")
        parts.append(_LAYER_HEADER.pack(index, blob.size))
        parts.append(blob.tobytes())

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(b"".join(parts))
    logger.info("checkpoint", f"检查点已保存: {target} ({params.total()} 个参数)")


def _read_header(data: bytes, path: str) -> Activation:
    if len(data) < _HEADER.size:
        raise CheckpointError("文件过短，缺少文件头", path)
    magic, version, tag = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CheckpointError(f"文件标识错误: {magic!r}", path)
    if version != VERSION:
        raise CheckpointError(f"不支持的检查点版本: {version}", path)
    try:
        return Activation.from_tag(tag)
    except ValueError as e:
        raise CheckpointError(str(e), path) from e


def read_activation(path: str | Path) -> Activation:
    """只读取文件头中的激活函数标签，用于在加载参数前构建匹配的网络结构"""
    try:
        with open(path, "rb") as f:
            head = f.read(_HEADER.size)
    except OSError as e:
        raise CheckpointError(f"无法读取检查点: {e}", str(path)) from e
    return _read_header(head, str(path))


def load_checkpoint(path: str | Path, spec: ModelSpec) -> Checkpoint:
    """
    读取检查点并按给定结构还原参数

    Raises:
        CheckpointError: 文件头、激活标签、层索引或参数数量与结构不符
    """
    source = str(path)
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"无法读取检查点: {e}", source) from e

    activation = _read_header(data, source)
    if activation != spec.conv_activation:
        raise CheckpointError(
            f"检查点激活函数 {activation.value} 与网络结构 {spec.conv_activation.value} 不符", source
        )

    dim = spec.feature_dim
    offset = _HEADER.size
    if len(data) < offset + 8 * dim:
        raise CheckpointError("标准化统计量不完整", source)
    mean = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
    std = np.frombuffer(data, dtype="<f4", count=dim, offset=offset + 4 * dim).copy()
    offset += 8 * dim

    dtype = np.dtype(spec.dtype)
    shapes = spec.shapes()
    layers = []
    for index, layer in enumerate(spec.layers):
        param_shapes = layer.param_shapes(shapes[index])
        if not param_shapes:
            layers.append({})
            continue
        if len(data) < offset + _LAYER_HEADER.size:
            raise CheckpointError(f"第 {index} 层参数缺失", source)
        stored_index, count = _LAYER_HEADER.unpack_from(data, offset)
        offset += _LAYER_HEADER.size
        expected = sum(int(np.prod(shape)) for shape in param_shapes.values())
        if stored_index != index or count != expected:
            raise CheckpointError(
                f"层不匹配: 期望第 {index} 层 {expected} 个参数，"
                f"文件中为第 {stored_index} 层 {count} 个参数",
                source,
            )
        if len(data) < offset + 4 * count:
            raise CheckpointError(f"第 {index} 层参数被截断", source)
        blob = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        offset += 4 * count

        params, start = {}, 0
        for name, shape in param_shapes.items():
            size = int(np.prod(shape))
            params[name] = blob[start:start + size].reshape(shape).astype(dtype)
            start += size
        layers.append(params)

    if offset != len(data):
        raise CheckpointError(f"文件末尾存在 {len(data) - offset} 字节多余数据", source)
    return Checkpoint(activation=activation, mean=mean, std=std, params=ParamStore(layers))
