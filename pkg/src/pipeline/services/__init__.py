"""认证流水线服务包。"""
