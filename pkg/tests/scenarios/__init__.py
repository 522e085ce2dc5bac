"""攻击场景测试。"""
