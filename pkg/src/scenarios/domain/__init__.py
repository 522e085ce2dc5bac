"""攻击场景领域模型。"""
