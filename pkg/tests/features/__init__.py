"""特征提取测试。"""
