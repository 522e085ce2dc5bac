"""特征领域模型包。"""
