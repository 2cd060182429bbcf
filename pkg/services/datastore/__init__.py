"""
数据存储服务模块
数据清单、RAVDESS 文件名解析、特征缓存与数据集划分
"""
from .cache import read_cache, write_cache
from .manifest import load_manifest, require_entries, write_manifest
from .models import FeatureCache, FeatureRecord, SplitResult
from .ravdess import EMOTION_CODES, is_calm, parse_ravdess_filename, scan_ravdess_dir
from .split import stratified_split
from .synthetic import class_frequency, generate_corpus, synth_clip

__all__ = [
    "EMOTION_CODES",
    "FeatureCache",
    "FeatureRecord",
    "SplitResult",
    "class_frequency",
    "generate_corpus",
    "is_calm",
    "load_manifest",
    "parse_ravdess_filename",
    "read_cache",
    "require_entries",
    "scan_ravdess_dir",
    "stratified_split",
    "synth_clip",
    "write_cache",
    "write_manifest",
]
