"""
基础设施模块
配置、日志、音频读写与信号处理
"""
