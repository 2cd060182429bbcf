#!/usr/bin/env python3
"""
EmoAugNet 语音情感识别流水线

运行方式：
- python main.py <子命令> 或 uv run main.py <子命令>
- 安装后: uv run emoaugnet <子命令>
"""

from interfaces.cli.commands import cli

if __name__ == "__main__":
    cli()
