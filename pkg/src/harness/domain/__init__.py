"""实验领域模型。"""
