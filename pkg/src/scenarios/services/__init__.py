"""攻击场景服务包。"""
