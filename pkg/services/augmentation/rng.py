"""
SplitMix64 随机源
固定整数运算与 IEEE-754 双精度运算，保证跨平台逐位可复现
"""
import zlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(GOLDEN_GAMMA)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """
    SplitMix64 生成器
    状态按黄金比例常数递增，输出经两轮乘法混合
    """

    def __init__(self, seed: int):
        self._state = seed & MASK64

    @property
    def state(self) -> int:
        return self._state

    def next_u64s(self, count: int) -> np.ndarray:
        """返回接下来的 count 个 64 位输出"""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self._state) + steps * _GAMMA
            outputs = _mix(states)
        self._state = (self._state + count * GOLDEN_GAMMA) & MASK64
        return outputs

    def next_u64(self) -> int:
        return int(self.next_u64s(1)[0])

    def uniforms(self, count: int) -> np.ndarray:
        """[0, 1) 均匀分布，取高53位"""
        return (self.next_u64s(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def gaussians(self, count: int) -> np.ndarray:
        """Box-Muller 变换，每对均匀样本产生 (r*cos, r*sin) 两个正态样本"""
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs)
        radius = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(theta)
        out[1::2] = radius * np.sin(theta)
        return out[:count]


def variant_seed(base_seed: int, variant_index: int) -> int:
    """每个变体的独立种子：SplitMix64(base_seed XOR variant_index) 的首个输出"""
    return SplitMix64((base_seed ^ variant_index) & MASK64).next_u64()


def clip_seed(base_seed: int, clip_id: str) -> int:
    """语料中每个片段的基础种子，由运行种子与 clip_id 的 CRC32 混合得到"""
    return SplitMix64((base_seed ^ zlib.crc32(clip_id.encode("utf-8"))) & MASK64).next_u64()
