"""分段服务包。"""
