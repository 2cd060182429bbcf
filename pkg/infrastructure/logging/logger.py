"""
日志模块
提供简洁的日志接口: logger.info("tag", "消息", epoch=3)
"""
import logging
import logging.handlers
from pathlib import Path
from typing import Any

import structlog


def setup_logging(
    log_level: str = "INFO",
    log_file: str = "logs/emoaugnet.log",
    enable_console: bool = True,
    enable_file: bool = False,
) -> None:
    """
    配置structlog日志系统

    控制台日志写到 stderr，stdout 只留给命令的结果输出
    """
    processors = [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    if enable_console:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))
    else:
        processors.append(structlog.processors.JSONRenderer())

    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )

    level = getattr(logging, log_level.upper(), logging.INFO)
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    # 清除现有handlers
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    if enable_console:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        root_logger.addHandler(console_handler)

    if enable_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
        )
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)


class SimpleLogger:
    """简化的日志记录器，tag+消息格式，可附带键值上下文"""

    def __init__(self, module_name: str):
        self.module_name = module_name.replace("__main__", "main")
        self._logger = structlog.get_logger(self.module_name)

    def info(self, tag: str, message: str, **context: Any) -> None:
        """记录信息日志"""
        self._logger.info(f"[{tag}] {message}", **context)

    def error(self, tag: str, message: str, **context: Any) -> None:
        """记录错误日志"""
        self._logger.error(f"[{tag}] {message}", **context)

    def warning(self, tag: str, message: str, **context: Any) -> None:
        """记录警告日志"""
        self._logger.warning(f"[{tag}] {message}", **context)

    def debug(self, tag: str, message: str, **context: Any) -> None:
        """记录调试日志"""
        self._logger.debug(f"[{tag}] {message}", **context)


def get_logger(name: str) -> SimpleLogger:
    """
    获取简化的日志记录器

    Args:
        name: 日志记录器名称，通常使用 __name__

    Returns:
        SimpleLogger实例

    使用示例：
        logger = get_logger(__name__)
        logger.info("extract", "写入缓存", records=30)
    """
    return SimpleLogger(name)
