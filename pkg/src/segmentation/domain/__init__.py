"""分段领域模型包。"""
