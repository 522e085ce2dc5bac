"""信道仿真服务包。"""
