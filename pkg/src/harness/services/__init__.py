"""实验服务包。"""
