"""
接口模块
对外提供命令行接口
"""
