"""特征提取服务包。"""
