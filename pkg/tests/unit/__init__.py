"""单元测试。"""
