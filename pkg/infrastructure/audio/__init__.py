"""
音频读写与规范化模块
"""
from .processing import canonicalize, fit_length, fix_window, resample, resample_array
from .wav import load_wav, save_wav

__all__ = [
    "canonicalize",
    "fit_length",
    "fix_window",
    "load_wav",
    "resample",
    "resample_array",
    "save_wav",
]
