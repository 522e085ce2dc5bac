"""信道仿真测试。"""
