"""防御机制测试。"""
