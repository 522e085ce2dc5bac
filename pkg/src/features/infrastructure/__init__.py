"""特征导出基础设施包。"""
