"""单类 SVM 服务包。"""
