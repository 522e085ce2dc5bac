"""分段测试。"""
