"""防御领域模型与纯计算。"""
