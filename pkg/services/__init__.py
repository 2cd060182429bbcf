"""
业务服务模块
包含增强、特征、网络、训练与数据存储的实现
"""
