"""DTW 画像测试。"""
