"""
测试公共夹具
"""
import struct

import numpy as np
import pytest

from core.models import CANONICAL_RATE, AudioClip
from infrastructure.config import ModelConfig, PipelineConfig


def make_sine(freq: float, seconds: float, rate: int = CANONICAL_RATE, amp: float = 0.5) -> AudioClip:
    """生成纯音片段"""
    t = np.arange(int(round(seconds * rate))) / rate
    return AudioClip(samples=amp * np.sin(2 * np.pi * freq * t), sample_rate=rate)


def peak_frequency(samples: np.ndarray, rate: int) -> float:
    """用 numpy 参考 FFT 求主峰频率"""
    spectrum = np.abs(np.fft.rfft(samples * np.hanning(len(samples))))
    return float(np.argmax(spectrum) * rate / len(samples))


def wav_bytes(payload: bytes, format_tag: int = 1, channels: int = 1, rate: int = 22050, bits: int = 16) -> bytes:
    """手工拼装 RIFF/WAVE 字节串"""
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", format_tag, channels, rate, rate * block, block, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", len(body)) + body


@pytest.fixture
def sine_440() -> AudioClip:
    return make_sine(440.0, 2.5)


@pytest.fixture
def mini_model_config() -> ModelConfig:
    """输入长度32、各层都很窄的微型网络（梯度校验用）"""
    return ModelConfig(
        input_length=32,
        conv_filters=(4, 6, 4),
        conv_kernels=(5, 3, 3),
        lstm_units=(5, 5),
        dense_units=(8, 6, 4),
        dtype="float64",
    )


@pytest.fixture
def small_pipeline_config() -> PipelineConfig:
    """CLI 测试用的窄网络配置"""
    return PipelineConfig(
        model=ModelConfig(conv_filters=(8, 8, 8), lstm_units=(8, 8), dense_units=(16, 8, 8)),
    )
