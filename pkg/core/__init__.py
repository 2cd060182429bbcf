"""
EmoAugNet 核心模块
定义共享数据模型、异常、协议与流水线装配
"""
