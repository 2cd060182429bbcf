"""
日志系统模块
包含结构化日志记录和管理功能
"""
from .logger import get_logger, setup_logging

__all__ = ["setup_logging", "get_logger"]
