"""监控测试。"""
