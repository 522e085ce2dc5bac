"""检测领域模型包。"""
