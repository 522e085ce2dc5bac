"""画像构建服务包。"""
