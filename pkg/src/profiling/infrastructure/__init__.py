"""画像导出基础设施包。"""
