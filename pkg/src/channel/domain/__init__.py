"""信道领域模型包。"""
