"""认证流水线测试。"""
