"""
CLI接口模块
提供命令行界面功能
"""
from .commands import cli

__all__ = ["cli"]
