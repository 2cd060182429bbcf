"""
WAV 读写
只接受 RIFF 小端 PCM16 / IEEE-float32，写出统一为单声道 PCM16
"""
import struct
from pathlib import Path

import numpy as np

from core.exceptions import AudioError, EmptyAudio, MalformedWav, UnsupportedEncoding
from core.models import AudioClip
from infrastructure.logging.logger import get_logger

logger = get_logger(__name__)

PCM = 0x0001
IEEE_FLOAT = 0x0003
EXTENSIBLE = 0xFFFE

PCM16_SCALE = 32768.0


def _parse_fmt(body: bytes, path: str) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise MalformedWav("fmt 块长度不足16字节", path)
    format_tag, channels, sample_rate, _byte_rate, _block_align, bits = struct.unpack(
        "<HHIIHH", body[:16]
    )
    if format_tag == EXTENSIBLE:
        # cbSize(2) + validBits(2) + channelMask(4) + SubFormat GUID(16)
        if len(body) < 40:
            raise MalformedWav("WAVE_FORMAT_EXTENSIBLE 扩展块不完整", path)
        format_tag = struct.unpack("<H", body[24:26])[0]
    return format_tag, channels, sample_rate, bits


def _iter_chunks(data: bytes, path: str):
    offset = 12
    while offset + 8 <= len(data):
        chunk_id, size = struct.unpack("<4sI", data[offset:offset + 8])
        start = offset + 8
        end = start + size
        if end > len(data):
            raise MalformedWav(f"块 {chunk_id!r} 超出文件末尾", path)
        yield chunk_id, data[start:end]
        # 块按字对齐
        offset = end + (size & 1)


def load_wav(path: str | Path) -> AudioClip:
    """
    读取WAV文件，立体声按通道均值混为单声道

    Args:
        path: 文件路径

    Returns:
        AudioClip: [-1, 1] 范围内的单声道波形

    Raises:
        MalformedWav: 头或块结构损坏
        UnsupportedEncoding: 压缩格式、24位等
        EmptyAudio: 没有采样帧
    """
    path_str = str(path)
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise AudioError("音频文件不存在", path_str) from None
    except OSError as e:
        raise AudioError(f"无法读取音频文件 ({e.strerror})", path_str) from e

    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav("不是 RIFF/WAVE 文件", path_str)

    fmt = None
    payload = None
    for chunk_id, body in _iter_chunks(data, path_str):
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body, path_str)
        elif chunk_id == b"data":
            payload = body
            break

    if fmt is None or payload is None:
        raise MalformedWav("缺少 fmt 或 data 块", path_str)

    format_tag, channels, sample_rate, bits = fmt
    if (format_tag, bits) == (PCM, 16):
        dtype, scale = np.dtype("<i2"), 1.0 / PCM16_SCALE
    elif (format_tag, bits) == (IEEE_FLOAT, 32):
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedEncoding(f"不支持的编码 (format={format_tag:#06x}, bits={bits})", path_str)
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"不支持的声道数 {channels}", path_str)
    if sample_rate <= 0:
        raise MalformedWav("采样率为0", path_str)

    frame_bytes = dtype.itemsize * channels
    n_frames = len(payload) // frame_bytes
    if n_frames == 0:
        raise EmptyAudio("音频没有采样帧", path_str)

    raw = np.frombuffer(payload[: n_frames * frame_bytes], dtype=dtype).astype(np.float64)
    samples = raw.reshape(n_frames, channels).mean(axis=1) * scale
    if not np.all(np.isfinite(samples)):
        raise MalformedWav("浮点采样中存在 NaN/Inf", path_str)

    logger.debug("wav", f"读取 {path_str}", frames=n_frames, channels=channels, rate=sample_rate)
    return AudioClip(samples=np.clip(samples, -1.0, 1.0), sample_rate=sample_rate)


def encode_pcm16(samples: np.ndarray) -> np.ndarray:
    """裁剪到 [-1, 1] 后量化为 int16（1.0 饱和到 32767）"""
    scaled = np.round(np.clip(samples, -1.0, 1.0) * PCM16_SCALE)
    return np.clip(scaled, -32768, 32767).astype("<i2")


def save_wav(clip: AudioClip, path: str | Path) -> None:
    """
    写出单声道 PCM16 WAV

    Args:
        clip: 音频片段
        path: 目标路径，父目录不存在时自动创建
    """
    pcm = encode_pcm16(clip.samples).tobytes()
    header = b"".join([
        b"RIFF",
        struct.pack("<I", 36 + len(pcm)),
        b"WAVE",
        b"fmt ",
        struct.pack("<IHHIIHH", 16, PCM, 1, clip.sample_rate, clip.sample_rate * 2, 2, 16),
        b"data",
        struct.pack("<I", len(pcm)),
    ])
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(header + pcm + (b"\x00" if len(pcm) & 1 else b""))
    except OSError as e:
        raise AudioError(f"写入音频失败 ({e.strerror})", str(target)) from e
