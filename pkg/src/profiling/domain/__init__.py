"""画像领域模型包。"""
