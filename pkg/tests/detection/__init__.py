"""单类 SVM 检测测试。"""
